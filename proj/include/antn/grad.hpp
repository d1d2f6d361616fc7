#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "antn/common.hpp"

namespace antn {

using BlockId = std::size_t;

/// Named blocks of real trainable parameters with matching gradient buffers.
/// Blocks live in one flat array so tape ops can address parameters by a
/// single global index.
class ParamStore {
 public:
  BlockId add_block(const std::string& name, std::size_t size);
  BlockId add_block(const std::string& name, const std::vector<double>& init);

  std::size_t n_blocks() const { return blocks_.size(); }
  std::size_t total() const { return values_.size(); }

  const std::string& block_name(BlockId b) const { return blocks_[b].name; }
  std::size_t block_offset(BlockId b) const { return blocks_[b].offset; }
  std::size_t block_size(BlockId b) const { return blocks_[b].size; }
  BlockId find_block(const std::string& name) const;

  std::span<double> block_values(BlockId b) {
    return {values_.data() + blocks_[b].offset, blocks_[b].size};
  }
  std::span<const double> block_values(BlockId b) const {
    return {values_.data() + blocks_[b].offset, blocks_[b].size};
  }
  std::span<double> block_grads(BlockId b) {
    return {grads_.data() + blocks_[b].offset, blocks_[b].size};
  }

  std::span<double> flat_values() { return values_; }
  std::span<const double> flat_values() const { return values_; }
  std::span<double> flat_grads() { return grads_; }
  std::span<const double> flat_grads() const { return grads_; }

  double value(std::size_t global_index) const { return values_[global_index]; }
  void zero_grads();

 private:
  struct Block {
    std::string name;
    std::size_t offset;
    std::size_t size;
  };
  std::vector<Block> blocks_;
  std::vector<double> values_;
  std::vector<double> grads_;
};

/// Handle to a scalar node on a Tape.
struct Node {
  std::uint32_t id = 0;
};

/// Define-by-run reverse-mode tape over real scalars. One tape per worker
/// thread; rebuilt per evaluated configuration. Every recorded op checks its
/// forward value for finiteness.
class Tape {
 public:
  explicit Tape(const ParamStore& params) : params_(&params) {}

  void reset();
  std::size_t size() const { return ops_.size(); }
  double value(Node n) const { return val_[n.id]; }

  Node constant(double v);
  Node param(std::size_t global_index);
  Node param(const ParamStore& ps, BlockId b, std::size_t i) {
    return param(ps.block_offset(b) + i);
  }

  Node add(Node a, Node b);
  Node sub(Node a, Node b);
  Node mul(Node a, Node b);
  Node div(Node a, Node b);
  Node neg(Node a);
  Node exp_(Node a);
  Node log_(Node a);
  Node tanh_(Node a);
  Node sqrt_(Node a);
  /// log(1 + exp(a)), evaluated piecewise for large |a|.
  Node softplus(Node a);
  Node atan2_(Node y, Node x);
  /// c1 * a + c2 * b with constant coefficients.
  Node axpby(double c1, Node a, double c2, Node b);

  /// Fused inner product against a parameter row laid out as
  /// [w_0 .. w_{len-1}, bias] starting at params[row_offset]:
  ///   out = bias + sum_k w_k * value(inputs[k]).
  Node dot(std::size_t row_offset, std::span<const Node> inputs);

  /// Accumulates seed * d(loss)/d(p) into the store's gradient buffers.
  /// A second call without reset() is an error.
  void backward(Node loss, double seed, ParamStore& store);

  /// Same, but into a caller-owned flat buffer (size = params.total()).
  void backward(Node loss, double seed, std::span<double> grad_out);

 private:
  enum class OpKind : std::uint8_t {
    kConst,
    kParam,
    kAdd,
    kSub,
    kMul,
    kDiv,
    kNeg,
    kExp,
    kLog,
    kTanh,
    kSqrt,
    kSoftplus,
    kAtan2,
    kAxpby,
    kDot,
  };
  struct Op {
    OpKind kind;
    std::uint32_t a = 0;
    std::uint32_t b = 0;
    std::uint32_t c = 0;
  };

  Node push(OpKind kind, double value, std::uint32_t a = 0, std::uint32_t b = 0,
            std::uint32_t c = 0);
  static const char* op_name(OpKind k);

  const ParamStore* params_;
  std::vector<double> val_;
  std::vector<Op> ops_;
  std::vector<double> aux_;           // coefficients for kAxpby
  std::vector<std::uint32_t> pool_;   // input node ids for kDot
  std::vector<double> adj_;
  bool backward_done_ = false;
};

/// Complex value as a (real, imaginary) pair of tape nodes.
struct CNode {
  Node re, im;
};

inline CNode cconst(Tape& t, Complex z) {
  return {t.constant(z.real()), t.constant(z.imag())};
}
inline CNode cadd(Tape& t, CNode a, CNode b) {
  return {t.add(a.re, b.re), t.add(a.im, b.im)};
}
inline CNode cmul(Tape& t, CNode a, CNode b) {
  return {t.sub(t.mul(a.re, b.re), t.mul(a.im, b.im)),
          t.add(t.mul(a.re, b.im), t.mul(a.im, b.re))};
}
inline CNode cscale(Tape& t, Node s, CNode a) {
  return {t.mul(s, a.re), t.mul(s, a.im)};
}
/// |z|^2 as a node.
inline Node cnorm2(Tape& t, CNode a) {
  return t.add(t.mul(a.re, a.re), t.mul(a.im, a.im));
}

}  // namespace antn
