// Timing comparison of the OpenMP batch kernels against their serial
// reference paths: exact-sampling + local-energy batches, the
// per-sample gradient accumulation, the configuration-space matvec, and
// full distribution enumeration.

#include <omp.h>

#include <chrono>
#include <cstdio>
#include <functional>

#include "antn/antn.hpp"
#include "antn/oracle.hpp"
#include "antn/vmc.hpp"

using namespace antn;

namespace {

double time_once(const std::function<void()>& fn) {
  const auto t0 = std::chrono::steady_clock::now();
  fn();
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
      .count();
}

void report(const char* name, double serial, double parallel) {
  std::printf("%-28s serial %8.3f s   omp %8.3f s   speedup %.2fx\n", name,
              serial, parallel, serial / parallel);
}

}  // namespace

int main() {
  std::printf("threads available: %d\n", omp_get_max_threads());

  auto lat = build_lattice(4, 4);
  auto terms = heisenberg_terms(lat, 1.0, 0.5);
  Rng rng(3);
  AntnModel model =
      AntnModel::random(AntnMode::kElementwise, 16, 8, 3, 32, {}, rng);

  const std::size_t batch = 512;
  BatchEval eval_p, eval_s;
  const double t_batch_s = time_once(
      [&] { eval_s = sample_and_measure(model, terms, batch, 7, 0, false); });
  const double t_batch_p = time_once(
      [&] { eval_p = sample_and_measure(model, terms, batch, 7, 0, true); });
  report("sample + local energy", t_batch_s, t_batch_p);

  std::vector<double> grad(model.params().total());
  const double t_grad_s = time_once([&] {
    std::fill(grad.begin(), grad.end(), 0.0);
    gradient_batch(model, eval_s, grad, false);
  });
  const double t_grad_p = time_once([&] {
    std::fill(grad.begin(), grad.end(), 0.0);
    gradient_batch(model, eval_p, grad, true);
  });
  report("batch gradient", t_grad_s, t_grad_p);

  const std::size_t dim = 1ull << 16;
  std::vector<double> v(dim), out;
  Rng vr(9);
  for (auto& z : v) z = vr.normal();
  const double t_mv_s = time_once([&] {
    for (int rep = 0; rep < 10; ++rep) hamiltonian_matvec(terms, v, out, false);
  });
  const double t_mv_p = time_once([&] {
    for (int rep = 0; rep < 10; ++rep) hamiltonian_matvec(terms, v, out, true);
  });
  report("hamiltonian matvec x10", t_mv_s, t_mv_p);

  Rng mr(11);
  AntnModel small =
      AntnModel::random(AntnMode::kBlockwise, 12, 4, 3, 24, {}, mr);
  const double t_enum_s =
      time_once([&] { enumerate_distribution(small, 12, false); });
  const double t_enum_p =
      time_once([&] { enumerate_distribution(small, 12, true); });
  report("enumerate 2^12 amplitudes", t_enum_s, t_enum_p);
  return 0;
}
