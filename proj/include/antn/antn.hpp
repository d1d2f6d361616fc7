#pragma once

#include <memory>
#include <string>
#include <vector>

#include "antn/arnn.hpp"
#include "antn/mps.hpp"

namespace antn {

enum class AntnMode { kElementwise, kBlockwise };

/// Left partial contraction carried during evaluation and sampling: the
/// bond vector is kept at unit 2-norm with the rescale absorbed into
/// log_norm. A -inf log_norm marks an annihilated amplitude.
struct LeftState {
  std::vector<Complex> vec;
  double log_norm = 0.0;
};

/// Autoregressive neural tensor network: per-site conditional wavefunction
/// tensors psi~(x_i | x_<i) = M(x_i) + f_NN(x_i | x_<i), with conditionals
/// from norms of left partial contractions and the phase from the full
/// contraction.
class AntnModel : public TrainableWavefunction {
 public:
  /// The tensor component is loaded from `mps` (bond profile and values);
  /// pass zero_net_output = true to make the initial model equal that
  /// state exactly.
  AntnModel(AntnMode mode, const Mps& mps, std::size_t depth,
            std::size_t h_dim, SymmetryFlags flags, Rng& rng,
            bool zero_net_output, double weight_scale = 1.0,
            double head_scale = 1.0);

  /// Random tensor component with the capped bond profile for chi.
  static AntnModel random(AntnMode mode, std::size_t n, std::size_t chi,
                          std::size_t depth, std::size_t h_dim,
                          SymmetryFlags flags, Rng& rng,
                          double weight_scale = 1.0, double head_scale = 1.0);

  std::size_t n_sites() const override { return n_; }
  LogAmp log_amplitude(const SpinConfig& x) const override;
  SpinConfig sample(Rng& rng) const override;
  ParamStore& params() override { return params_; }
  const ParamStore& params() const override { return params_; }
  TapeLogAmp log_amplitude_tape(Tape& tape, const SpinConfig& x) const override;

  AntnMode mode() const { return mode_; }
  const SymmetryFlags& symmetry() const { return flags_; }
  const MaskedNet& net() const { return *net_; }
  std::size_t bond(std::size_t cut) const { return bond_[cut]; }
  std::size_t max_bond() const;
  std::size_t net_depth() const { return net_->depth(); }
  std::size_t net_h_dim() const { return net_->h_dim(); }

  /// Conditional tensor psi~(x_i | x_<i) as a (chi_{i-1} x chi_i) matrix;
  /// bits of x at positions >= i are ignored.
  ComplexMatrix cond_tensor(std::size_t i, std::size_t x_i,
                            const SpinConfig& x_prefix) const;

  /// state' = state^T psi~_i(x_i | x_<i), rescaled to unit norm.
  LeftState step(const LeftState& state, std::size_t i, std::size_t x_i,
                 const SpinConfig& x_prefix) const;

  /// (q(0 | x_<i), q(1 | x_<i)) from the carried state, mask applied.
  std::pair<double, double> conditional_prob(const LeftState& state,
                                             std::size_t i,
                                             const SpinConfig& x_prefix) const;

  LeftState initial_state() const {
    return LeftState{{Complex(1, 0)}, 0.0};
  }

 private:
  template <class B>
  bool eval_impl(B& b, const SpinConfig& x, typename B::R& log_mag,
                 typename B::R& phase) const;

  AntnModel(AntnMode mode, std::vector<std::size_t> bond, std::size_t depth,
            std::size_t h_dim, SymmetryFlags flags);

  void load_mps(const Mps& mps);
  std::vector<std::size_t> net_out_shape() const;

  AntnMode mode_;
  std::size_t n_ = 0;
  std::vector<std::size_t> bond_;  // bond_[0..n], boundary 1
  SymmetryFlags flags_;
  ParamStore params_;
  std::vector<BlockId> mps_re_, mps_im_;
  std::unique_ptr<MaskedNet> net_;
};

}  // namespace antn
