#include "antn/grad.hpp"

#include <cmath>

namespace antn {

BlockId ParamStore::add_block(const std::string& name, std::size_t size) {
  for (const auto& b : blocks_) {
    if (b.name == name) throw Error("ParamStore: duplicate block '" + name + "'");
  }
  blocks_.push_back(Block{name, values_.size(), size});
  values_.resize(values_.size() + size, 0.0);
  grads_.resize(values_.size(), 0.0);
  return blocks_.size() - 1;
}

BlockId ParamStore::add_block(const std::string& name,
                              const std::vector<double>& init) {
  const BlockId b = add_block(name, init.size());
  auto vals = block_values(b);
  for (std::size_t i = 0; i < init.size(); ++i) vals[i] = init[i];
  return b;
}

BlockId ParamStore::find_block(const std::string& name) const {
  for (std::size_t i = 0; i < blocks_.size(); ++i) {
    if (blocks_[i].name == name) return i;
  }
  throw Error("ParamStore: no block named '" + name + "'");
}

void ParamStore::zero_grads() {
  std::fill(grads_.begin(), grads_.end(), 0.0);
}

void Tape::reset() {
  val_.clear();
  ops_.clear();
  aux_.clear();
  pool_.clear();
  adj_.clear();
  backward_done_ = false;
}

const char* Tape::op_name(OpKind k) {
  switch (k) {
    case OpKind::kConst: return "const";
    case OpKind::kParam: return "param";
    case OpKind::kAdd: return "add";
    case OpKind::kSub: return "sub";
    case OpKind::kMul: return "mul";
    case OpKind::kDiv: return "div";
    case OpKind::kNeg: return "neg";
    case OpKind::kExp: return "exp";
    case OpKind::kLog: return "log";
    case OpKind::kTanh: return "tanh";
    case OpKind::kSqrt: return "sqrt";
    case OpKind::kSoftplus: return "softplus";
    case OpKind::kAtan2: return "atan2";
    case OpKind::kAxpby: return "axpby";
    case OpKind::kDot: return "dot";
  }
  return "?";
}

Node Tape::push(OpKind kind, double value, std::uint32_t a, std::uint32_t b,
                std::uint32_t c) {
  if (!std::isfinite(value)) {
    throw NumericalError(std::string("tape: op '") + op_name(kind) +
                         "' produced a non-finite value");
  }
  val_.push_back(value);
  ops_.push_back(Op{kind, a, b, c});
  return Node{static_cast<std::uint32_t>(val_.size() - 1)};
}

Node Tape::constant(double v) { return push(OpKind::kConst, v); }

Node Tape::param(std::size_t gi) {
  return push(OpKind::kParam, params_->value(gi),
              static_cast<std::uint32_t>(gi));
}

Node Tape::add(Node a, Node b) {
  return push(OpKind::kAdd, val_[a.id] + val_[b.id], a.id, b.id);
}
Node Tape::sub(Node a, Node b) {
  return push(OpKind::kSub, val_[a.id] - val_[b.id], a.id, b.id);
}
Node Tape::mul(Node a, Node b) {
  return push(OpKind::kMul, val_[a.id] * val_[b.id], a.id, b.id);
}
Node Tape::div(Node a, Node b) {
  return push(OpKind::kDiv, val_[a.id] / val_[b.id], a.id, b.id);
}
Node Tape::neg(Node a) { return push(OpKind::kNeg, -val_[a.id], a.id); }
Node Tape::exp_(Node a) {
  return push(OpKind::kExp, std::exp(val_[a.id]), a.id);
}
Node Tape::log_(Node a) {
  return push(OpKind::kLog, std::log(val_[a.id]), a.id);
}
Node Tape::tanh_(Node a) {
  return push(OpKind::kTanh, std::tanh(val_[a.id]), a.id);
}
Node Tape::sqrt_(Node a) {
  return push(OpKind::kSqrt, std::sqrt(val_[a.id]), a.id);
}
Node Tape::softplus(Node a) {
  const double x = val_[a.id];
  const double v = x > 0 ? x + std::log1p(std::exp(-x)) : std::log1p(std::exp(x));
  return push(OpKind::kSoftplus, v, a.id);
}
Node Tape::atan2_(Node y, Node x) {
  return push(OpKind::kAtan2, std::atan2(val_[y.id], val_[x.id]), y.id, x.id);
}
Node Tape::axpby(double c1, Node a, double c2, Node b) {
  aux_.push_back(c1);
  aux_.push_back(c2);
  return push(OpKind::kAxpby, c1 * val_[a.id] + c2 * val_[b.id], a.id, b.id,
              static_cast<std::uint32_t>(aux_.size() - 2));
}

Node Tape::dot(std::size_t row_offset, std::span<const Node> inputs) {
  const std::uint32_t start = static_cast<std::uint32_t>(pool_.size());
  double acc = params_->value(row_offset + inputs.size());  // bias
  for (std::size_t k = 0; k < inputs.size(); ++k) {
    pool_.push_back(inputs[k].id);
    acc += params_->value(row_offset + k) * val_[inputs[k].id];
  }
  return push(OpKind::kDot, acc, static_cast<std::uint32_t>(row_offset), start,
              static_cast<std::uint32_t>(inputs.size()));
}

void Tape::backward(Node loss, double seed, ParamStore& store) {
  backward(loss, seed, store.flat_grads());
}

void Tape::backward(Node loss, double seed, std::span<double> grad_out) {
  if (backward_done_)
    throw Error("tape: backward called twice without reset");
  if (grad_out.size() != params_->total())
    throw Error("tape: gradient buffer size mismatch");
  backward_done_ = true;

  adj_.assign(val_.size(), 0.0);
  adj_[loss.id] = seed;

  for (std::size_t i = ops_.size(); i-- > 0;) {
    const double g = adj_[i];
    if (g == 0.0) continue;
    const Op& op = ops_[i];
    switch (op.kind) {
      case OpKind::kConst:
        break;
      case OpKind::kParam:
        grad_out[op.a] += g;
        break;
      case OpKind::kAdd:
        adj_[op.a] += g;
        adj_[op.b] += g;
        break;
      case OpKind::kSub:
        adj_[op.a] += g;
        adj_[op.b] -= g;
        break;
      case OpKind::kMul:
        adj_[op.a] += g * val_[op.b];
        adj_[op.b] += g * val_[op.a];
        break;
      case OpKind::kDiv: {
        const double inv_b = 1.0 / val_[op.b];
        adj_[op.a] += g * inv_b;
        adj_[op.b] -= g * val_[i] * inv_b;
        break;
      }
      case OpKind::kNeg:
        adj_[op.a] -= g;
        break;
      case OpKind::kExp:
        adj_[op.a] += g * val_[i];
        break;
      case OpKind::kLog:
        adj_[op.a] += g / val_[op.a];
        break;
      case OpKind::kTanh:
        adj_[op.a] += g * (1.0 - val_[i] * val_[i]);
        break;
      case OpKind::kSqrt:
        adj_[op.a] += g * 0.5 / val_[i];
        break;
      case OpKind::kSoftplus:
        adj_[op.a] += g / (1.0 + std::exp(-val_[op.a]));
        break;
      case OpKind::kAtan2: {
        const double y = val_[op.a];
        const double x = val_[op.b];
        const double inv_r2 = 1.0 / (x * x + y * y);
        adj_[op.a] += g * x * inv_r2;
        adj_[op.b] -= g * y * inv_r2;
        break;
      }
      case OpKind::kAxpby:
        adj_[op.a] += g * aux_[op.c];
        adj_[op.b] += g * aux_[op.c + 1];
        break;
      case OpKind::kDot: {
        const std::size_t row = op.a;
        const std::uint32_t* ids = pool_.data() + op.b;
        for (std::uint32_t k = 0; k < op.c; ++k) {
          grad_out[row + k] += g * val_[ids[k]];
          adj_[ids[k]] += g * params_->value(row + k);
        }
        grad_out[row + op.c] += g;  // bias
        break;
      }
    }
  }
}

}  // namespace antn
