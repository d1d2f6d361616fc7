#pragma once

#include <optional>
#include <string>
#include <vector>

#include "antn/detail/backend.hpp"
#include "antn/wavefunction.hpp"

namespace antn {

struct SymmetryFlags {
  /// Conserved magnetization n_up - n_down; masks conditionals that would
  /// make the target unreachable or overshoot it.
  std::optional<int> u1_target;
  /// Global spin-flip symmetry psi(x) = psi(1-x), imposed by evaluating on
  /// the representative with x_0 = 0.
  bool z2_flip = false;
};

void validate_symmetry(const SymmetryFlags& flags, std::size_t n);

/// Feasibility mask for the next bit given the running up/down counts.
struct U1Mask {
  bool allow[2] = {true, true};
};
U1Mask u1_mask(int target, std::size_t n, std::size_t site, std::size_t ups,
               std::size_t downs);

/// Masked dense autoregressive body: hidden units carry degrees and
/// connect by prefix (unit of degree d sees inputs x_0..x_{d-1}; outputs
/// for site i see hidden units of degree <= i), so the output slice for
/// site i depends on x_{<i} only. Inputs are fed as +-1. Rows are stored
/// ragged as [w..., bias] in one block per layer.
class MaskedNet {
 public:
  /// out_reals_per_value[i] = real slots emitted per (site i, value).
  MaskedNet(std::size_t n, std::size_t depth, std::size_t h_dim,
            std::vector<std::size_t> out_reals_per_value, ParamStore& params,
            Rng& rng, double weight_scale = 1.0, double head_scale = 1.0,
            bool zero_output_layer = false,
            const std::string& block_prefix = "net");

  std::size_t n_sites() const { return n_; }
  std::size_t depth() const { return depth_; }
  std::size_t h_dim() const { return h_dim_; }
  std::size_t out_size() const { return out_offset_.back(); }
  std::size_t out_offset(std::size_t site, std::size_t value) const {
    return out_offset_[site * 2 + value];
  }
  std::size_t out_reals(std::size_t site) const { return out_reals_[site]; }
  /// Global parameter index of an output row; its bias sits at
  /// row + prefix_count(site).
  std::size_t out_row_offset(std::size_t slot) const { return out_row_[slot]; }
  /// Number of last-layer units visible to site i's outputs.
  std::size_t prefix_count(std::size_t d) const { return prefix_[d]; }

  /// Full forward pass; out holds every (site, value, slot) raw output.
  template <class B>
  void forward(B& b, const SpinConfig& x,
               std::vector<typename B::R>& out) const;

  /// Incremental per-site forward used by ancestral sampling: hidden units
  /// are finalized in degree order, so a whole sample costs one forward
  /// pass in total.
  struct SamplerState {
    std::vector<double> inputs;               // +-1, filled as bits land
    std::vector<std::vector<double>> hidden;  // per layer
    std::size_t frontier = 0;                 // degrees <= frontier computed
  };
  SamplerState sampler_begin() const;
  void sampler_fix_bit(SamplerState& st, std::size_t site,
                       std::uint8_t bit) const;
  /// Raw outputs for both values of `site`; requires bits < site fixed.
  void sampler_site_outputs(const ParamStore& ps, SamplerState& st,
                            std::size_t site, std::vector<double>& out) const;

 private:
  template <class B>
  void compute_hidden_unit(B& b, std::size_t layer, std::size_t unit,
                           const std::vector<typename B::R>& prev,
                           std::vector<typename B::R>& cur) const;

  std::size_t n_, depth_, h_dim_;
  std::vector<std::size_t> degree_;        // per hidden unit, ascending
  std::vector<std::size_t> prefix_;        // units with degree <= d, d in [0..n]
  std::vector<std::size_t> out_reals_;     // per site
  std::vector<std::size_t> out_offset_;    // per (site, value), plus total
  // global parameter row offsets
  std::vector<std::vector<std::size_t>> hidden_row_;  // [layer][unit]
  std::vector<std::size_t> out_row_;                  // per output slot
};

enum class ArnnHead {
  kLogitPhase,   // conditional = exp(a + i phi), then normalized
  kComplexPair,  // conditional = (re + i im), then normalized
};

/// Fully connected masked autoregressive wavefunction with normalized
/// per-site complex conditionals.
class ArnnWavefunction : public TrainableWavefunction {
 public:
  ArnnWavefunction(std::size_t n, std::size_t depth, std::size_t h_dim,
                   SymmetryFlags flags, Rng& rng,
                   ArnnHead head = ArnnHead::kLogitPhase,
                   double weight_scale = 1.0, double head_scale = 1.0);

  std::size_t n_sites() const override { return n_; }
  LogAmp log_amplitude(const SpinConfig& x) const override;
  SpinConfig sample(Rng& rng) const override;
  ParamStore& params() override { return params_; }
  const ParamStore& params() const override { return params_; }
  TapeLogAmp log_amplitude_tape(Tape& tape, const SpinConfig& x) const override;

  /// Normalized conditional pair psi(v | x_{<i}) for every site.
  struct SitePair {
    Complex c[2];
  };
  std::vector<SitePair> conditionals(const SpinConfig& x) const;

  const MaskedNet& net() const { return net_; }
  const SymmetryFlags& symmetry() const { return flags_; }
  ArnnHead head() const { return head_; }

 private:
  std::size_t n_;
  SymmetryFlags flags_;
  ArnnHead head_;
  ParamStore params_;
  MaskedNet net_;
};

/// Representative of {x, 1-x}: flips all bits when x_0 = 1.
inline SpinConfig z2_representative(const SpinConfig& x, bool& flipped) {
  flipped = !x.bits.empty() && x.bits[0] == 1;
  return flipped ? x.flipped_all() : x;
}

template <class B>
void MaskedNet::compute_hidden_unit(B& b, std::size_t layer, std::size_t unit,
                                    const std::vector<typename B::R>& prev,
                                    std::vector<typename B::R>& cur) const {
  const std::size_t len =
      layer == 0 ? std::min(degree_[unit], n_) : prefix_[degree_[unit]];
  cur[unit] = b.tanh_(b.dot(hidden_row_[layer][unit], prev.data(), len));
}

template <class B>
void MaskedNet::forward(B& b, const SpinConfig& x,
                        std::vector<typename B::R>& out) const {
  using R = typename B::R;
  std::vector<R> prev(n_);
  for (std::size_t j = 0; j < n_; ++j)
    prev[j] = b.c(1.0 - 2.0 * static_cast<double>(x[j]));
  std::vector<R> cur(h_dim_, R{});
  for (std::size_t l = 0; l < depth_; ++l) {
    for (std::size_t u = 0; u < h_dim_; ++u)
      compute_hidden_unit(b, l, u, prev, cur);
    std::swap(prev, cur);
    if (l == 0) cur.assign(h_dim_, R{});
  }
  out.clear();
  out.reserve(out_size());
  std::size_t slot = 0;
  for (std::size_t i = 0; i < n_; ++i) {
    const std::size_t len = prefix_[i];
    for (std::size_t v = 0; v < 2; ++v)
      for (std::size_t k = 0; k < out_reals_[i]; ++k)
        out.push_back(b.dot(out_row_[slot++], prev.data(), len));
  }
}

}  // namespace antn
