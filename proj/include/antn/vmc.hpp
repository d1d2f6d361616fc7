#pragma once

#include <functional>
#include <span>
#include <vector>

#include "antn/lattice.hpp"
#include "antn/wavefunction.hpp"

namespace antn {

struct EnergyEstimate {
  Complex mean;            // imaginary part is a consistency diagnostic
  double std_error = 0.0;  // standard error of Re E_loc
  double im_std_error = 0.0;
  std::size_t batch = 0;
};

/// E_loc(x) = sum_y <y|H|x> psi(y) / psi(x), ratios taken in log space.
/// Throws if psi(x) = 0 (cannot happen for exactly sampled x).
Complex local_energy(const Wavefunction& psi, const HamiltonianTerms& terms,
                     const SpinConfig& x);

struct BatchEval {
  std::vector<SpinConfig> samples;
  std::vector<Complex> e_loc;
  EnergyEstimate estimate;
};

/// Draws `batch` exact samples and evaluates their local energies. Each
/// sample uses an independent stream keyed by (seed, step, index), so the
/// result is identical for any thread count.
BatchEval sample_and_measure(const Wavefunction& psi,
                             const HamiltonianTerms& terms, std::size_t batch,
                             std::uint64_t seed, std::size_t step,
                             bool parallel);

EnergyEstimate estimate_from(const std::vector<Complex>& e_loc);

/// Variance-controlled gradient of <H>:
///   (2/N) sum_k Re{ (E_loc(x_k) - mean) d/dtheta log psi*(x_k) },
/// accumulated into grad (size = params.total()). Per-thread buffers are
/// reduced in thread order; single-threaded runs are bit-reproducible.
void gradient_batch(const TrainableWavefunction& psi,
                    const BatchEval& batch, std::span<double> grad,
                    bool parallel, bool variance_control = true);

struct AdamState {
  std::vector<double> m, v;
  std::size_t t = 0;
};

void adam_step(AdamState& state, std::span<double> params,
               std::span<const double> grad, double lr, double beta1 = 0.9,
               double beta2 = 0.999, double eps = 1e-8);

struct LrSchedule {
  double initial = 0.01;
  std::vector<std::size_t> milestones = {100,  500,  1000, 1800,
                                         2500, 4000, 6000, 8000};
  /// Halved at every milestone <= step.
  double at(std::size_t step) const;
};

struct TrainOptions {
  std::size_t batch = 1024;
  std::size_t steps = 2000;
  std::size_t start_step = 0;  // resume point
  std::uint64_t seed = 1;
  bool parallel = true;
  LrSchedule schedule;
  std::size_t checkpoint_interval = 100;
  double beta1 = 0.9, beta2 = 0.999, eps = 1e-8;
};

struct StepRecord {
  std::size_t step = 0;  // 1-based in logs
  double energy = 0.0;
  double energy_per_site = 0.0;
  double std_err = 0.0;
  double im_energy = 0.0;
  double lr = 0.0;
  double wall_ms = 0.0;
};

struct TrainCallbacks {
  std::function<void(const StepRecord&)> on_step;
  /// Called every checkpoint_interval steps and before aborting on a
  /// numerical failure, so the last good state is always preserved.
  std::function<void(std::size_t completed_steps)> on_checkpoint;
};

struct TrainResult {
  std::vector<StepRecord> records;
  double final_energy = 0.0;
};

/// Gradient-descent ground-state search; the caller owns the Adam state so
/// checkpoints can capture and restore it.
TrainResult train(TrainableWavefunction& model, const HamiltonianTerms& terms,
                  const TrainOptions& options, AdamState& adam,
                  const TrainCallbacks& callbacks = {});

}  // namespace antn
