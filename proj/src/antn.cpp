#include "antn/antn.hpp"

#include <cmath>

namespace antn {

namespace {

Mps random_component(std::size_t n, std::size_t chi, Rng& rng) {
  return random_mps(n, chi, rng);
}

}  // namespace

AntnModel::AntnModel(AntnMode mode, std::vector<std::size_t> bond,
                     std::size_t depth, std::size_t h_dim, SymmetryFlags flags)
    : mode_(mode), n_(bond.size() - 1), bond_(std::move(bond)), flags_(flags) {
  validate_symmetry(flags_, n_);
  (void)depth;
  (void)h_dim;
}

std::vector<std::size_t> AntnModel::net_out_shape() const {
  std::vector<std::size_t> shape(n_);
  for (std::size_t i = 0; i < n_; ++i)
    shape[i] = mode_ == AntnMode::kElementwise
                   ? 2 * bond_[i] * bond_[i + 1]
                   : 2;
  return shape;
}

void AntnModel::load_mps(const Mps& mps) {
  for (std::size_t i = 0; i < n_; ++i) {
    const Tensor3& t = mps.tensors[i];
    std::vector<double> re(t.entries.size()), im(t.entries.size());
    for (std::size_t k = 0; k < t.entries.size(); ++k) {
      re[k] = t.entries[k].real();
      im[k] = t.entries[k].imag();
    }
    const std::string tag = "mps.t" + std::to_string(i);
    mps_re_.push_back(params_.add_block(tag + ".re", re));
    mps_im_.push_back(params_.add_block(tag + ".im", im));
  }
}

AntnModel::AntnModel(AntnMode mode, const Mps& mps, std::size_t depth,
                     std::size_t h_dim, SymmetryFlags flags, Rng& rng,
                     bool zero_net_output, double weight_scale,
                     double head_scale)
    : AntnModel(mode,
                [&] {
                  mps.check_bonds();
                  std::vector<std::size_t> b(mps.n_sites() + 1, 1);
                  for (std::size_t i = 0; i < mps.n_sites(); ++i)
                    b[i + 1] = mps.tensors[i].chi_r;
                  return b;
                }(),
                depth, h_dim, flags) {
  load_mps(mps);
  net_ = std::make_unique<MaskedNet>(n_, depth, h_dim, net_out_shape(),
                                     params_, rng, weight_scale, head_scale,
                                     zero_net_output, "net");
}

AntnModel AntnModel::random(AntnMode mode, std::size_t n, std::size_t chi,
                            std::size_t depth, std::size_t h_dim,
                            SymmetryFlags flags, Rng& rng, double weight_scale,
                            double head_scale) {
  Mps mps = random_component(n, chi, rng);
  return AntnModel(mode, mps, depth, h_dim, flags, rng,
                   /*zero_net_output=*/false, weight_scale, head_scale);
}

std::size_t AntnModel::max_bond() const {
  std::size_t m = 1;
  for (std::size_t b : bond_) m = std::max(m, b);
  return m;
}

// Shared evaluation over both backends. Walks the conditional chain,
// accumulating log q and carrying the rescaled left contraction; the phase
// is the argument of the final scalar (per-step rescales are positive and
// do not move it). Returns false when the amplitude is exactly zero.
template <class B>
bool AntnModel::eval_impl(B& b, const SpinConfig& x_in,
                          typename B::R& log_mag,
                          typename B::R& phase) const {
  using R = typename B::R;
  using C = detail::Cx<B>;

  bool flipped = false;
  const SpinConfig x =
      flags_.z2_flip ? z2_representative(x_in, flipped) : x_in;

  std::vector<R> raw;
  net_->forward(b, x, raw);

  std::vector<C> state{C{b.c(1.0), b.c(0.0)}};
  R lm = b.c(0.0);
  std::size_t ups = 0, downs = 0;

  std::vector<C> w[2];
  for (std::size_t i = 0; i < n_; ++i) {
    const std::size_t cl = bond_[i], cr = bond_[i + 1];
    const std::size_t re_off = params_.block_offset(mps_re_[i]);
    const std::size_t im_off = params_.block_offset(mps_im_[i]);
    U1Mask mask;
    if (flags_.u1_target) mask = u1_mask(*flags_.u1_target, n_, i, ups, downs);
    const bool z2_site0 = flags_.z2_flip && i == 0;
    const std::size_t chosen = x[i];
    if (!z2_site0 && !mask.allow[chosen]) return false;

    // sum of state entries, reused by the blockwise broadcast
    C ssum{b.c(0.0), b.c(0.0)};
    if (mode_ == AntnMode::kBlockwise) {
      ssum = state[0];
      for (std::size_t l = 1; l < cl; ++l) ssum = cx_add(b, ssum, state[l]);
    }

    R n2[2];
    for (std::size_t v = 0; v < 2; ++v) {
      if (z2_site0 && v == 1) continue;  // canonical bit is always 0
      auto& wv = w[v];
      wv.assign(cr, C{b.c(0.0), b.c(0.0)});
      if (mode_ == AntnMode::kElementwise) {
        const R* f = raw.data() + net_->out_offset(i, v);
        for (std::size_t l = 0; l < cl; ++l) {
          for (std::size_t r = 0; r < cr; ++r) {
            const std::size_t me = (l * 2 + v) * cr + r;
            const std::size_t fe = 2 * (l * cr + r);
            C entry{b.add(b.param(re_off + me), f[fe]),
                    b.add(b.param(im_off + me), f[fe + 1])};
            wv[r] = cx_add(b, wv[r], cx_mul(b, state[l], entry));
          }
        }
      } else {
        const R* f = raw.data() + net_->out_offset(i, v);
        const C fv{f[0], f[1]};
        const C bcast = cx_mul(b, ssum, fv);
        for (std::size_t l = 0; l < cl; ++l) {
          for (std::size_t r = 0; r < cr; ++r) {
            const std::size_t me = (l * 2 + v) * cr + r;
            C entry{b.param(re_off + me), b.param(im_off + me)};
            wv[r] = cx_add(b, wv[r], cx_mul(b, state[l], entry));
          }
        }
        for (std::size_t r = 0; r < cr; ++r) wv[r] = cx_add(b, wv[r], bcast);
      }
      R acc = cx_norm2(b, wv[0]);
      for (std::size_t r = 1; r < cr; ++r)
        acc = b.add(acc, cx_norm2(b, wv[r]));
      n2[v] = acc;
    }

    std::size_t keep;
    if (z2_site0) {
      if (b.value(n2[0]) == 0.0) return false;
      lm = b.add(lm, b.c(-0.5 * std::log(2.0)));
      keep = 0;
    } else {
      keep = chosen;
      if (b.value(n2[keep]) == 0.0) return false;
      const bool forced = !(mask.allow[0] && mask.allow[1]);
      if (!forced) {
        const R denom = b.add(n2[0], n2[1]);
        lm = b.add(lm, b.mul(b.c(0.5), b.sub(b.log_(n2[keep]), b.log_(denom))));
      }
    }

    const R nrm = b.sqrt_(n2[keep]);
    state.resize(cr);
    for (std::size_t r = 0; r < cr; ++r) {
      state[r] = C{b.div(w[keep][r].re, nrm), b.div(w[keep][r].im, nrm)};
    }
    (x[i] ? downs : ups) += 1;
  }

  log_mag = lm;
  phase = b.atan2_(state[0].im, state[0].re);
  return true;
}

template bool AntnModel::eval_impl<detail::PlainBackend>(
    detail::PlainBackend&, const SpinConfig&, double&, double&) const;
template bool AntnModel::eval_impl<detail::TapeBackend>(
    detail::TapeBackend&, const SpinConfig&, Node&, Node&) const;

LogAmp AntnModel::log_amplitude(const SpinConfig& x) const {
  if (x.size() != n_) throw Error("antn: config length mismatch");
  detail::PlainBackend b(params_);
  double lm = 0, ph = 0;
  if (!eval_impl(b, x, lm, ph)) return LogAmp{kNegInf, 0};
  return LogAmp{lm, ph};
}

TapeLogAmp AntnModel::log_amplitude_tape(Tape& tape,
                                         const SpinConfig& x) const {
  if (x.size() != n_) throw Error("antn: config length mismatch");
  detail::TapeBackend b(tape);
  Node lm, ph;
  if (!eval_impl(b, x, lm, ph)) return TapeLogAmp{{}, {}, true};
  return TapeLogAmp{lm, ph, false};
}

ComplexMatrix AntnModel::cond_tensor(std::size_t i, std::size_t x_i,
                                     const SpinConfig& x_prefix) const {
  if (i >= n_ || x_i > 1) throw Error("cond_tensor: bad site or value");
  SpinConfig x(n_);
  for (std::size_t j = 0; j < std::min(x_prefix.size(), n_); ++j)
    x[j] = x_prefix[j];
  detail::PlainBackend b(params_);
  std::vector<double> raw;
  net_->forward(b, x, raw);

  const std::size_t cl = bond_[i], cr = bond_[i + 1];
  const auto re = params_.block_values(mps_re_[i]);
  const auto im = params_.block_values(mps_im_[i]);
  const double* f = raw.data() + net_->out_offset(i, x_i);
  ComplexMatrix out(cl, cr);
  for (std::size_t l = 0; l < cl; ++l) {
    for (std::size_t r = 0; r < cr; ++r) {
      const std::size_t me = (l * 2 + x_i) * cr + r;
      Complex fv = mode_ == AntnMode::kElementwise
                       ? Complex(f[2 * (l * cr + r)], f[2 * (l * cr + r) + 1])
                       : Complex(f[0], f[1]);
      out(l, r) = Complex(re[me], im[me]) + fv;
    }
  }
  return out;
}

LeftState AntnModel::step(const LeftState& state, std::size_t i,
                          std::size_t x_i, const SpinConfig& x_prefix) const {
  const std::size_t cl = bond_[i], cr = bond_[i + 1];
  if (state.vec.size() != cl) throw Error("step: state dimension mismatch");
  ComplexMatrix t = cond_tensor(i, x_i, x_prefix);
  LeftState out;
  out.vec.assign(cr, Complex(0, 0));
  for (std::size_t l = 0; l < cl; ++l)
    for (std::size_t r = 0; r < cr; ++r) out.vec[r] += state.vec[l] * t(l, r);
  double n2 = 0;
  for (const Complex& z : out.vec) n2 += std::norm(z);
  if (n2 == 0.0) {
    out.log_norm = kNegInf;
    return out;
  }
  const double nrm = std::sqrt(n2);
  for (Complex& z : out.vec) z /= nrm;
  out.log_norm = state.log_norm + std::log(nrm);
  return out;
}

std::pair<double, double> AntnModel::conditional_prob(
    const LeftState& state, std::size_t i, const SpinConfig& x_prefix) const {
  U1Mask mask;
  if (flags_.u1_target) {
    std::size_t ups = 0, downs = 0;
    for (std::size_t j = 0; j < i; ++j)
      (x_prefix[j] ? downs : ups) += 1;
    mask = u1_mask(*flags_.u1_target, n_, i, ups, downs);
  }
  double q[2] = {0, 0};
  for (std::size_t v = 0; v < 2; ++v) {
    if (!mask.allow[v]) continue;
    LeftState next = step(state, i, v, x_prefix);
    if (std::isinf(next.log_norm)) continue;
    q[v] = std::exp(2.0 * (next.log_norm - state.log_norm));
  }
  const double sum = q[0] + q[1];
  if (sum == 0.0) throw Error("conditional_prob: both candidates vanish");
  return {q[0] / sum, q[1] / sum};
}

SpinConfig AntnModel::sample(Rng& rng) const {
  SpinConfig physical(n_);
  MaskedNet::SamplerState st = net_->sampler_begin();
  std::vector<double> slots;
  std::vector<Complex> state{Complex(1, 0)};
  std::vector<Complex> w[2];
  bool flip = false;
  std::size_t ups = 0, downs = 0;

  for (std::size_t i = 0; i < n_; ++i) {
    const std::size_t cl = bond_[i], cr = bond_[i + 1];
    const auto re = params_.block_values(mps_re_[i]);
    const auto im = params_.block_values(mps_im_[i]);
    U1Mask mask;
    if (flags_.u1_target) mask = u1_mask(*flags_.u1_target, n_, i, ups, downs);
    net_->sampler_site_outputs(params_, st, i, slots);

    Complex ssum(0, 0);
    if (mode_ == AntnMode::kBlockwise)
      for (std::size_t l = 0; l < cl; ++l) ssum += state[l];

    const bool z2_site0 = flags_.z2_flip && i == 0;
    double n2[2] = {0, 0};
    for (std::size_t v = 0; v < 2; ++v) {
      if (z2_site0 && v == 1) continue;
      auto& wv = w[v];
      wv.assign(cr, Complex(0, 0));
      const double* f = slots.data() + v * net_->out_reals(i);
      if (mode_ == AntnMode::kElementwise) {
        for (std::size_t l = 0; l < cl; ++l) {
          const Complex sl = state[l];
          for (std::size_t r = 0; r < cr; ++r) {
            const std::size_t me = (l * 2 + v) * cr + r;
            wv[r] += sl * Complex(re[me] + f[2 * (l * cr + r)],
                                  im[me] + f[2 * (l * cr + r) + 1]);
          }
        }
      } else {
        const Complex bcast = ssum * Complex(f[0], f[1]);
        for (std::size_t l = 0; l < cl; ++l) {
          const Complex sl = state[l];
          for (std::size_t r = 0; r < cr; ++r) {
            const std::size_t me = (l * 2 + v) * cr + r;
            wv[r] += sl * Complex(re[me], im[me]);
          }
        }
        for (std::size_t r = 0; r < cr; ++r) wv[r] += bcast;
      }
      for (const Complex& z : wv) n2[v] += std::norm(z);
    }

    std::uint8_t canonical_bit;
    if (z2_site0) {
      const bool one = rng.uniform() >= 0.5;
      physical[0] = one ? 1 : 0;
      flip = one;
      canonical_bit = 0;
    } else {
      const double q0 = mask.allow[0] ? n2[0] : 0.0;
      const double q1 = mask.allow[1] ? n2[1] : 0.0;
      if (q0 + q1 == 0.0)
        throw NumericalError("antn sample: conditional annihilated");
      canonical_bit = rng.uniform() < q1 / (q0 + q1) ? 1 : 0;
      physical[i] = canonical_bit ^ (flip ? 1 : 0);
    }

    const double nrm = std::sqrt(n2[canonical_bit]);
    state.assign(w[canonical_bit].begin(), w[canonical_bit].end());
    for (Complex& z : state) z /= nrm;
    net_->sampler_fix_bit(st, i, canonical_bit);
    (canonical_bit ? downs : ups) += 1;
  }
  return physical;
}

}  // namespace antn
