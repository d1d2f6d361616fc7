#pragma once

#include <cmath>

#include "antn/common.hpp"
#include "antn/grad.hpp"
#include "antn/lattice.hpp"

namespace antn {

/// Amplitude in log form; log_mag = -inf marks an exactly-zero amplitude.
struct LogAmp {
  double log_mag = 0.0;
  double phase = 0.0;

  bool is_zero() const { return std::isinf(log_mag) && log_mag < 0; }
  Complex amplitude() const {
    if (is_zero()) return Complex(0, 0);
    return std::exp(log_mag) * Complex(std::cos(phase), std::sin(phase));
  }
};

/// Read-only view of a normalized wavefunction: evaluation and exact
/// ancestral sampling. Implementations must be safe to call concurrently
/// from multiple threads (each thread passes its own Rng).
class Wavefunction {
 public:
  virtual ~Wavefunction() = default;
  virtual std::size_t n_sites() const = 0;
  virtual LogAmp log_amplitude(const SpinConfig& x) const = 0;
  virtual SpinConfig sample(Rng& rng) const = 0;

  Complex amplitude(const SpinConfig& x) const {
    return log_amplitude(x).amplitude();
  }
};

/// Log-amplitude nodes recorded on a tape; zero-amplitude configurations
/// carry no nodes and set the flag instead.
struct TapeLogAmp {
  Node log_mag, phase;
  bool zero = false;
};

/// A wavefunction whose parameters live in a ParamStore and whose
/// log-amplitude can be recorded on a Tape for reverse-mode gradients.
class TrainableWavefunction : public Wavefunction {
 public:
  virtual ParamStore& params() = 0;
  virtual const ParamStore& params() const = 0;
  virtual TapeLogAmp log_amplitude_tape(Tape& tape,
                                        const SpinConfig& x) const = 0;
};

}  // namespace antn
