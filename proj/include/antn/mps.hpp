#pragma once

#include <memory>
#include <vector>

#include "antn/numerics.hpp"
#include "antn/wavefunction.hpp"

namespace antn {

enum class CanonicalForm { kNone, kRight };

/// Matrix product state: a chain of rank-3 tensors T[i] with dims
/// (chi_{i-1}, 2, chi_i) and chi_0 = chi_n = 1.
struct Mps {
  std::vector<Tensor3> tensors;
  CanonicalForm canonical = CanonicalForm::kNone;

  std::size_t n_sites() const { return tensors.size(); }
  std::size_t max_bond() const;
  void check_bonds() const;  // throws on inconsistent adjacent dims
};

/// Random MPS with the capped bond profile chi_i = min(chi, 2^i, 2^(n-i)),
/// complex Gaussian entries scaled by 1/sqrt(chi_l * d).
Mps random_mps(std::size_t n, std::size_t chi, Rng& rng);

/// Full left-to-right contraction; exact for any n via internal rescaling.
Complex mps_evaluate(const Mps& mps, const SpinConfig& x);
LogAmp mps_log_evaluate(const Mps& mps, const SpinConfig& x);

/// Gauge the state into right canonical form; the result is normalized
/// (sum_x |psi|^2 = 1). Throws NumericalError on a zero-norm state.
Mps right_canonicalize(const Mps& mps);

/// Marginal probability q(x_{<=j}) of the first `prefix_len` bits.
/// Requires right canonical form.
double mps_marginal(const Mps& mps, const SpinConfig& x,
                    std::size_t prefix_len);

/// Exact ancestral sample; requires right canonical form. Cost O(n chi^2).
SpinConfig mps_sample(const Mps& mps, Rng& rng);

/// Trainable wrapper: tensor entries are copied into a ParamStore as
/// per-site (real, imag) blocks; evaluation reads the store, so gradient
/// checks and training act on the same parameters.
class MpsWavefunction : public TrainableWavefunction {
 public:
  explicit MpsWavefunction(const Mps& mps);

  std::size_t n_sites() const override { return shape_.size(); }
  LogAmp log_amplitude(const SpinConfig& x) const override;
  SpinConfig sample(Rng& rng) const override;
  ParamStore& params() override { return params_; }
  const ParamStore& params() const override { return params_; }
  TapeLogAmp log_amplitude_tape(Tape& tape, const SpinConfig& x) const override;

  /// Rebuilds a Mps snapshot from the current parameter values.
  Mps to_mps() const;
  bool canonical() const { return canonical_ == CanonicalForm::kRight; }

 private:
  struct SiteShape {
    std::size_t chi_l, chi_r;
    BlockId re, im;
  };
  std::vector<SiteShape> shape_;
  ParamStore params_;
  CanonicalForm canonical_;
};

}  // namespace antn
