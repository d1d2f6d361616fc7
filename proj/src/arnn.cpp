#include "antn/arnn.hpp"

#include <algorithm>
#include <cmath>

namespace antn {

void validate_symmetry(const SymmetryFlags& flags, std::size_t n) {
  if (flags.u1_target) {
    const int t = *flags.u1_target;
    if (std::abs(t) > static_cast<int>(n))
      throw ConfigError("u1 target magnetization exceeds system size");
    if ((static_cast<int>(n) - std::abs(t)) % 2 != 0)
      throw ConfigError("u1 target magnetization has wrong parity");
    if (flags.z2_flip && t != 0)
      throw ConfigError("z2 flip symmetry requires u1 target 0");
  }
}

U1Mask u1_mask(int target, std::size_t n, std::size_t site, std::size_t ups,
               std::size_t downs) {
  U1Mask m;
  const int remaining = static_cast<int>(n - site - 1);
  for (int v = 0; v < 2; ++v) {
    const int mag = static_cast<int>(ups + (v == 0 ? 1 : 0)) -
                    static_cast<int>(downs + (v == 1 ? 1 : 0));
    m.allow[v] = std::abs(target - mag) <= remaining;
  }
  if (!m.allow[0] && !m.allow[1])
    throw Error("u1 mask: both conditionals masked (infeasible target)");
  return m;
}

MaskedNet::MaskedNet(std::size_t n, std::size_t depth, std::size_t h_dim,
                     std::vector<std::size_t> out_reals_per_value,
                     ParamStore& params, Rng& rng, double weight_scale,
                     double head_scale, bool zero_output_layer,
                     const std::string& block_prefix)
    : n_(n), depth_(depth), h_dim_(h_dim), out_reals_(std::move(out_reals_per_value)) {
  if (n < 1) throw ConfigError("masked net: need at least one site");
  if (depth < 1 || h_dim < 1)
    throw ConfigError("masked net: depth and h_dim must be >= 1");
  if (out_reals_.size() != n) throw Error("masked net: output shape mismatch");

  // Ascending degrees spread over [1, n-1] (n = 1 keeps a dummy degree 1;
  // no output reads those units).
  degree_.resize(h_dim_);
  const std::size_t dmax = n_ > 1 ? n_ - 1 : 1;
  for (std::size_t u = 0; u < h_dim_; ++u)
    degree_[u] = 1 + (u * dmax) / h_dim_;
  prefix_.assign(n_ + 1, 0);
  for (std::size_t d = 1; d <= n_; ++d) {
    std::size_t cnt = 0;
    while (cnt < h_dim_ && degree_[cnt] <= d) ++cnt;
    prefix_[d] = cnt;
  }

  auto init_rows = [&](const std::string& name,
                       const std::vector<std::size_t>& lengths, double scale,
                       bool zero, bool random_bias,
                       std::vector<std::size_t>& rows) {
    std::size_t total = 0;
    for (std::size_t len : lengths) total += len + 1;
    std::vector<double> values(total, 0.0);
    std::size_t off = 0;
    rows.clear();
    for (std::size_t len : lengths) {
      rows.push_back(off);
      if (!zero) {
        const double s = scale / std::sqrt(static_cast<double>(std::max<std::size_t>(1, len)));
        for (std::size_t k = 0; k < len; ++k) values[off + k] = s * rng.normal();
        // head biases must not all vanish: a bias-only output slice (site 0)
        // would otherwise emit an exactly-zero conditional pair
        if (random_bias) values[off + len] = scale * rng.normal();
      }
      off += len + 1;
    }
    const BlockId b = params.add_block(name, values);
    const std::size_t base = params.block_offset(b);
    for (auto& r : rows) r += base;
  };

  hidden_row_.resize(depth_);
  for (std::size_t l = 0; l < depth_; ++l) {
    std::vector<std::size_t> lengths(h_dim_);
    for (std::size_t u = 0; u < h_dim_; ++u)
      lengths[u] = l == 0 ? std::min(degree_[u], n_) : prefix_[degree_[u]];
    init_rows(block_prefix + ".l" + std::to_string(l) + ".w", lengths,
              weight_scale, false, false, hidden_row_[l]);
  }

  out_offset_.assign(n_ * 2 + 1, 0);
  std::vector<std::size_t> out_lengths;
  for (std::size_t i = 0; i < n_; ++i) {
    for (std::size_t v = 0; v < 2; ++v) {
      out_offset_[i * 2 + v + 1] =
          out_offset_[i * 2 + v] + out_reals_[i];
      for (std::size_t k = 0; k < out_reals_[i]; ++k)
        out_lengths.push_back(prefix_[i]);
    }
  }
  init_rows(block_prefix + ".out.w", out_lengths, weight_scale * head_scale,
            zero_output_layer, true, out_row_);
}

MaskedNet::SamplerState MaskedNet::sampler_begin() const {
  SamplerState st;
  st.inputs.assign(n_, 0.0);
  st.hidden.assign(depth_, std::vector<double>(h_dim_, 0.0));
  st.frontier = 0;
  return st;
}

void MaskedNet::sampler_fix_bit(SamplerState& st, std::size_t site,
                                std::uint8_t bit) const {
  st.inputs[site] = 1.0 - 2.0 * static_cast<double>(bit);
}

void MaskedNet::sampler_site_outputs(const ParamStore& ps, SamplerState& st,
                                     std::size_t site,
                                     std::vector<double>& out) const {
  detail::PlainBackend b(ps);
  for (std::size_t d = st.frontier + 1; d <= site; ++d) {
    for (std::size_t l = 0; l < depth_; ++l) {
      const auto& prev = l == 0 ? st.inputs : st.hidden[l - 1];
      for (std::size_t u = prefix_[d - 1]; u < prefix_[d]; ++u)
        compute_hidden_unit(b, l, u, prev, st.hidden[l]);
    }
  }
  st.frontier = std::max(st.frontier, site);

  const std::size_t len = prefix_[site];
  const double* last = st.hidden[depth_ - 1].data();
  out.clear();
  const std::size_t slot0 = out_offset(site, 0);
  for (std::size_t k = 0; k < 2 * out_reals_[site]; ++k)
    out.push_back(b.dot(out_row_[slot0 + k], last, len));
}

namespace {

// One site's contribution given the raw head slots for both values.
// Returns false when the evaluated configuration has amplitude exactly zero.
template <class B>
bool site_contribution(B& b, ArnnHead head, const typename B::R* slot0,
                       const typename B::R* slot1, std::size_t chosen,
                       const U1Mask& mask, typename B::R& log_mag,
                       typename B::R& phase) {
  if (!mask.allow[chosen]) return false;
  const bool forced = !(mask.allow[0] && mask.allow[1]);
  if (head == ArnnHead::kLogitPhase) {
    const typename B::R a_c = chosen ? slot1[0] : slot0[0];
    const typename B::R phi_c = chosen ? slot1[1] : slot0[1];
    if (!forced) {
      const typename B::R a_o = chosen ? slot0[0] : slot1[0];
      // log q = -softplus(-2 (a_c - a_o))
      const auto delta = b.sub(a_c, a_o);
      log_mag = b.sub(log_mag,
                      b.mul(b.c(0.5), b.softplus(b.mul(b.c(-2.0), delta))));
    }
    phase = b.add(phase, phi_c);
  } else {
    detail::Cx<B> c0{slot0[0], slot0[1]}, c1{slot1[0], slot1[1]};
    const auto n2_0 = cx_norm2(b, c0);
    const auto n2_1 = cx_norm2(b, c1);
    const auto& c_c = chosen ? c1 : c0;
    const auto n2_c = chosen ? n2_1 : n2_0;
    if (b.value(n2_c) == 0.0) return false;
    if (!forced) {
      const auto denom = b.add(n2_0, n2_1);
      log_mag = b.add(log_mag,
                      b.mul(b.c(0.5), b.sub(b.log_(n2_c), b.log_(denom))));
    }
    phase = b.add(phase, b.atan2_(c_c.im, c_c.re));
  }
  return true;
}

template <class B>
bool arnn_eval(const MaskedNet& net, const SymmetryFlags& flags, ArnnHead head,
               B& b, const SpinConfig& x_in, typename B::R& log_mag,
               typename B::R& phase) {
  const std::size_t n = net.n_sites();
  bool flipped = false;
  const SpinConfig x =
      flags.z2_flip ? z2_representative(x_in, flipped) : x_in;

  std::vector<typename B::R> raw;
  net.forward(b, x, raw);

  log_mag = b.c(0.0);
  phase = b.c(0.0);
  std::size_t ups = 0, downs = 0;
  for (std::size_t i = 0; i < n; ++i) {
    U1Mask mask;
    if (flags.u1_target) mask = u1_mask(*flags.u1_target, n, i, ups, downs);
    const std::size_t chosen = x[i];
    if (flags.z2_flip && i == 0) {
      // symmetric site-0 conditional: amplitude 1/sqrt(2), phase shared
      log_mag = b.add(log_mag, b.c(-0.5 * std::log(2.0)));
      const typename B::R* s0 = raw.data() + net.out_offset(0, 0);
      phase = b.add(phase, head == ArnnHead::kLogitPhase
                               ? s0[1]
                               : b.atan2_(s0[1], s0[0]));
    } else {
      if (!site_contribution(b, head, raw.data() + net.out_offset(i, 0),
                             raw.data() + net.out_offset(i, 1), chosen, mask,
                             log_mag, phase))
        return false;
    }
    (chosen ? downs : ups) += 1;
  }
  return true;
}

}  // namespace

ArnnWavefunction::ArnnWavefunction(std::size_t n, std::size_t depth,
                                   std::size_t h_dim, SymmetryFlags flags,
                                   Rng& rng, ArnnHead head,
                                   double weight_scale, double head_scale)
    : n_(n),
      flags_(flags),
      head_(head),
      net_(n, depth, h_dim, std::vector<std::size_t>(n, 2), params_, rng,
           weight_scale, head_scale, /*zero_output_layer=*/false) {
  validate_symmetry(flags_, n_);
}

LogAmp ArnnWavefunction::log_amplitude(const SpinConfig& x) const {
  if (x.size() != n_) throw Error("arnn: config length mismatch");
  detail::PlainBackend b(params_);
  double lm = 0, ph = 0;
  if (!arnn_eval(net_, flags_, head_, b, x, lm, ph)) return LogAmp{kNegInf, 0};
  return LogAmp{lm, ph};
}

TapeLogAmp ArnnWavefunction::log_amplitude_tape(Tape& tape,
                                                const SpinConfig& x) const {
  if (x.size() != n_) throw Error("arnn: config length mismatch");
  detail::TapeBackend b(tape);
  Node lm, ph;
  if (!arnn_eval(net_, flags_, head_, b, x, lm, ph))
    return TapeLogAmp{{}, {}, true};
  return TapeLogAmp{lm, ph, false};
}

std::vector<ArnnWavefunction::SitePair> ArnnWavefunction::conditionals(
    const SpinConfig& x) const {
  if (x.size() != n_) throw Error("arnn: config length mismatch");
  bool flipped = false;
  const SpinConfig xc =
      flags_.z2_flip ? z2_representative(x, flipped) : x;
  detail::PlainBackend b(params_);
  std::vector<double> raw;
  net_.forward(b, xc, raw);

  std::vector<SitePair> out(n_);
  std::size_t ups = 0, downs = 0;
  for (std::size_t i = 0; i < n_; ++i) {
    U1Mask mask;
    if (flags_.u1_target) mask = u1_mask(*flags_.u1_target, n_, i, ups, downs);
    const double* s0 = raw.data() + net_.out_offset(i, 0);
    const double* s1 = raw.data() + net_.out_offset(i, 1);
    Complex c[2];
    if (flags_.z2_flip && i == 0) {
      const double phi =
          head_ == ArnnHead::kLogitPhase ? s0[1] : std::atan2(s0[1], s0[0]);
      c[0] = c[1] = std::polar(1.0 / std::sqrt(2.0), phi);
    } else if (head_ == ArnnHead::kLogitPhase) {
      double m = -1e300;
      for (int v = 0; v < 2; ++v)
        if (mask.allow[v]) m = std::max(m, (v ? s1 : s0)[0]);
      double q[2] = {0, 0};
      for (int v = 0; v < 2; ++v)
        if (mask.allow[v]) q[v] = std::exp(2.0 * ((v ? s1 : s0)[0] - m));
      const double sum = q[0] + q[1];
      for (int v = 0; v < 2; ++v)
        c[v] = std::polar(std::sqrt(q[v] / sum), (v ? s1 : s0)[1]);
    } else {
      const Complex raw_c[2] = {Complex(s0[0], s0[1]), Complex(s1[0], s1[1])};
      double n2[2];
      for (int v = 0; v < 2; ++v)
        n2[v] = mask.allow[v] ? std::norm(raw_c[v]) : 0.0;
      const double denom = std::sqrt(n2[0] + n2[1]);
      for (int v = 0; v < 2; ++v)
        c[v] = mask.allow[v] ? raw_c[v] / denom : Complex(0, 0);
    }
    // report in physical labels
    out[i].c[0] = flipped ? c[1] : c[0];
    out[i].c[1] = flipped ? c[0] : c[1];
    (xc[i] ? downs : ups) += 1;
  }
  return out;
}

SpinConfig ArnnWavefunction::sample(Rng& rng) const {
  SpinConfig physical(n_);
  MaskedNet::SamplerState st = net_.sampler_begin();
  std::vector<double> slots;
  bool flip = false;
  std::size_t ups = 0, downs = 0;
  for (std::size_t i = 0; i < n_; ++i) {
    U1Mask mask;
    if (flags_.u1_target) mask = u1_mask(*flags_.u1_target, n_, i, ups, downs);
    net_.sampler_site_outputs(params_, st, i, slots);
    std::uint8_t canonical_bit;
    if (flags_.z2_flip && i == 0) {
      const bool one = rng.uniform() >= 0.5;
      physical[0] = one ? 1 : 0;
      flip = one;
      canonical_bit = 0;
    } else {
      double q[2];
      if (head_ == ArnnHead::kLogitPhase) {
        double m = -1e300;
        for (int v = 0; v < 2; ++v)
          if (mask.allow[v]) m = std::max(m, slots[v * 2]);
        for (int v = 0; v < 2; ++v)
          q[v] = mask.allow[v] ? std::exp(2.0 * (slots[v * 2] - m)) : 0.0;
      } else {
        for (int v = 0; v < 2; ++v)
          q[v] = mask.allow[v]
                     ? slots[v * 2] * slots[v * 2] + slots[v * 2 + 1] * slots[v * 2 + 1]
                     : 0.0;
      }
      const double p1 = q[1] / (q[0] + q[1]);
      canonical_bit = rng.uniform() < p1 ? 1 : 0;
      physical[i] = canonical_bit ^ (flip ? 1 : 0);
    }
    net_.sampler_fix_bit(st, i, canonical_bit);
    (canonical_bit ? downs : ups) += 1;
  }
  return physical;
}

}  // namespace antn
