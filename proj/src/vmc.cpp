#include "antn/vmc.hpp"

#include <omp.h>

#include <chrono>
#include <cmath>

namespace antn {

Complex local_energy(const Wavefunction& psi, const HamiltonianTerms& terms,
                     const SpinConfig& x) {
  const LogAmp la_x = psi.log_amplitude(x);
  if (la_x.is_zero())
    throw NumericalError("local_energy: psi(x) = 0 on the given configuration");
  Complex acc(0, 0);
  SpinConfig y = x;
  for_each_connected(terms, x, [&](std::size_t p, std::size_t q, double elem) {
    if (p == static_cast<std::size_t>(-1)) {
      acc += elem;
      return;
    }
    y.bits[p] ^= 1u;
    y.bits[q] ^= 1u;
    const LogAmp la_y = psi.log_amplitude(y);
    if (!la_y.is_zero()) {
      const double r = std::exp(la_y.log_mag - la_x.log_mag);
      const double dphi = la_y.phase - la_x.phase;
      acc += elem * r * Complex(std::cos(dphi), std::sin(dphi));
    }
    y.bits[p] ^= 1u;
    y.bits[q] ^= 1u;
  });
  return acc;
}

EnergyEstimate estimate_from(const std::vector<Complex>& e_loc) {
  EnergyEstimate est;
  est.batch = e_loc.size();
  if (e_loc.empty()) throw Error("estimate_from: empty batch");
  Complex mean(0, 0);
  for (const Complex& e : e_loc) mean += e;
  mean /= static_cast<double>(e_loc.size());
  est.mean = mean;
  double var_re = 0, var_im = 0;
  for (const Complex& e : e_loc) {
    var_re += (e.real() - mean.real()) * (e.real() - mean.real());
    var_im += (e.imag() - mean.imag()) * (e.imag() - mean.imag());
  }
  const double n = static_cast<double>(e_loc.size());
  if (e_loc.size() > 1) {
    est.std_error = std::sqrt(var_re / (n - 1) / n);
    est.im_std_error = std::sqrt(var_im / (n - 1) / n);
  }
  return est;
}

BatchEval sample_and_measure(const Wavefunction& psi,
                             const HamiltonianTerms& terms, std::size_t batch,
                             std::uint64_t seed, std::size_t step,
                             bool parallel) {
  if (batch == 0) throw ConfigError("batch size must be >= 1");
  BatchEval out;
  out.samples.assign(batch, SpinConfig(psi.n_sites()));
  out.e_loc.assign(batch, Complex(0, 0));
#pragma omp parallel for schedule(static) if (parallel)
  for (std::int64_t k = 0; k < static_cast<std::int64_t>(batch); ++k) {
    Rng rng = Rng::substream(seed, step, static_cast<std::uint64_t>(k));
    out.samples[k] = psi.sample(rng);
    out.e_loc[k] = local_energy(psi, terms, out.samples[k]);
  }
  out.estimate = estimate_from(out.e_loc);
  return out;
}

void gradient_batch(const TrainableWavefunction& psi, const BatchEval& batch,
                    std::span<double> grad, bool parallel,
                    bool variance_control) {
  const std::size_t n_samples = batch.samples.size();
  if (n_samples == 0) throw Error("gradient_batch: empty batch");
  const ParamStore& params = psi.params();
  if (grad.size() != params.total())
    throw Error("gradient_batch: gradient buffer size mismatch");

  const Complex baseline =
      variance_control ? batch.estimate.mean : Complex(0, 0);
  const double scale = 2.0 / static_cast<double>(n_samples);
  const int n_threads = parallel ? omp_get_max_threads() : 1;
  std::vector<std::vector<double>> buffers(
      n_threads, std::vector<double>(params.total(), 0.0));

#pragma omp parallel num_threads(n_threads) if (parallel)
  {
    Tape tape(params);
    std::vector<double>& buf = buffers[omp_get_thread_num()];
#pragma omp for schedule(static)
    for (std::int64_t k = 0; k < static_cast<std::int64_t>(n_samples); ++k) {
      tape.reset();
      const TapeLogAmp la = psi.log_amplitude_tape(tape, batch.samples[k]);
      if (la.zero)
        throw NumericalError("gradient_batch: zero amplitude in batch");
      const Complex e_ctrl = batch.e_loc[k] - baseline;
      const Node loss =
          tape.axpby(e_ctrl.real(), la.log_mag, e_ctrl.imag(), la.phase);
      tape.backward(loss, scale, std::span<double>(buf));
    }
  }
  // deterministic ordered reduction
  for (int t = 0; t < n_threads; ++t)
    for (std::size_t i = 0; i < grad.size(); ++i) grad[i] += buffers[t][i];
}

void adam_step(AdamState& state, std::span<double> params,
               std::span<const double> grad, double lr, double beta1,
               double beta2, double eps) {
  if (params.size() != grad.size())
    throw Error("adam_step: shape mismatch");
  if (state.m.empty()) {
    state.m.assign(params.size(), 0.0);
    state.v.assign(params.size(), 0.0);
  }
  if (state.m.size() != params.size())
    throw Error("adam_step: state shape mismatch");
  for (double g : grad) {
    if (!std::isfinite(g))
      throw NumericalError("adam_step: non-finite gradient");
  }
  state.t += 1;
  const double bc1 = 1.0 - std::pow(beta1, static_cast<double>(state.t));
  const double bc2 = 1.0 - std::pow(beta2, static_cast<double>(state.t));
  for (std::size_t i = 0; i < params.size(); ++i) {
    state.m[i] = beta1 * state.m[i] + (1.0 - beta1) * grad[i];
    state.v[i] = beta2 * state.v[i] + (1.0 - beta2) * grad[i] * grad[i];
    const double mhat = state.m[i] / bc1;
    const double vhat = state.v[i] / bc2;
    params[i] -= lr * mhat / (std::sqrt(vhat) + eps);
  }
}

double LrSchedule::at(std::size_t step) const {
  double lr = initial;
  for (std::size_t m : milestones) {
    if (step >= m) lr *= 0.5;
  }
  return lr;
}

TrainResult train(TrainableWavefunction& model, const HamiltonianTerms& terms,
                  const TrainOptions& opt, AdamState& adam,
                  const TrainCallbacks& cb) {
  if (opt.batch == 0) throw ConfigError("train: batch size must be >= 1");
  if (opt.steps == 0) throw ConfigError("train: steps must be >= 1");
  if (model.n_sites() != terms.n)
    throw ConfigError("train: model and Hamiltonian sizes differ");

  TrainResult result;
  std::vector<double> grad(model.params().total());
  for (std::size_t step = opt.start_step; step < opt.steps; ++step) {
    const auto t0 = std::chrono::steady_clock::now();
    BatchEval batch = sample_and_measure(model, terms, opt.batch, opt.seed,
                                         step, opt.parallel);
    if (!std::isfinite(batch.estimate.mean.real()) ||
        !std::isfinite(batch.estimate.mean.imag())) {
      if (cb.on_checkpoint) cb.on_checkpoint(step);
      throw NumericalError("train: non-finite energy at step " +
                           std::to_string(step + 1));
    }
    std::fill(grad.begin(), grad.end(), 0.0);
    gradient_batch(model, batch, grad, opt.parallel);
    const double lr = opt.schedule.at(step);
    try {
      adam_step(adam, model.params().flat_values(), grad, lr, opt.beta1,
                opt.beta2, opt.eps);
    } catch (const NumericalError&) {
      if (cb.on_checkpoint) cb.on_checkpoint(step);
      throw;
    }

    StepRecord rec;
    rec.step = step + 1;
    rec.energy = batch.estimate.mean.real();
    rec.energy_per_site = rec.energy / static_cast<double>(terms.n);
    rec.std_err = batch.estimate.std_error;
    rec.im_energy = batch.estimate.mean.imag();
    rec.lr = lr;
    rec.wall_ms = std::chrono::duration<double, std::milli>(
                      std::chrono::steady_clock::now() - t0)
                      .count();
    result.records.push_back(rec);
    if (cb.on_step) cb.on_step(rec);
    if (cb.on_checkpoint && opt.checkpoint_interval > 0 &&
        (step + 1) % opt.checkpoint_interval == 0 && step + 1 < opt.steps) {
      cb.on_checkpoint(step + 1);
    }
  }
  if (!result.records.empty()) result.final_energy = result.records.back().energy;
  if (cb.on_checkpoint) cb.on_checkpoint(opt.steps);
  return result;
}

}  // namespace antn
