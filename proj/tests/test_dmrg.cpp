#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <Eigen/Dense>
#include <cmath>
#include <tuple>

#include "antn/dmrg.hpp"
#include "antn/oracle.hpp"
#include "dense_oracle.hpp"
#include "fixtures.hpp"

using namespace antn;

namespace {

std::vector<double> dense_eigenvalues(const std::vector<double>& h,
                                      std::size_t dim) {
  Eigen::MatrixXd m(dim, dim);
  for (std::size_t r = 0; r < dim; ++r)
    for (std::size_t c = 0; c < dim; ++c) m(r, c) = h[r * dim + c];
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(m);
  std::vector<double> out(dim);
  for (std::size_t i = 0; i < dim; ++i) out[i] = es.eigenvalues()(i);
  return out;
}

}  // namespace

TEST_CASE("mpo: 1x2 Heisenberg has the two-spin Pauli spectrum") {
  auto lat = build_lattice(1, 2);
  auto terms = heisenberg_terms(lat, 1.0, 0.0);
  Mpo mpo = build_mpo(terms);
  auto evals = dense_eigenvalues(mpo_to_dense(mpo), 4);
  CHECK(evals[0] == doctest::Approx(-3.0).epsilon(1e-12));
  CHECK(evals[1] == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(evals[2] == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(evals[3] == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("mpo: dense form matches the Kronecker Hamiltonian entrywise") {
  for (auto [lx, ly, j2, marshall] :
       {std::tuple{2ul, 2ul, 0.5, false}, {2ul, 3ul, 0.3, false},
        std::tuple{2ul, 2ul, 0.5, true}}) {
    auto lat = build_lattice(lx, ly);
    auto terms = heisenberg_terms(lat, 1.0, j2, marshall);
    Mpo mpo = build_mpo(terms);
    auto got = mpo_to_dense(mpo);
    auto want = test_oracle::dense_hamiltonian(lat, 1.0, j2, marshall);
    const std::size_t dim = want.dim;
    double max_diff = 0.0;
    // the transfer product sums the same bond terms in a different
    // association order, so allow reassociation-level error
    for (std::size_t k = 0; k < dim * dim; ++k)
      max_diff = std::max(max_diff, std::abs(got[k] - want.entries[k]));
    CHECK(max_diff < 1e-13);
  }
}

TEST_CASE("mpo: operator bond stays O(Ly) on a 3x3 lattice") {
  auto terms = heisenberg_terms(build_lattice(3, 3), 1.0, 0.5);
  Mpo mpo = build_mpo(terms);
  CHECK(mpo.max_bond() <= 3 * (3 + 1) + 2);
}

TEST_CASE("mpo: matvec on random vectors matches connected_configs") {
  auto lat = build_lattice(3, 3);
  auto terms = heisenberg_terms(lat, 1.0, 0.2);
  Mpo mpo = build_mpo(terms);
  const std::size_t dim = 1ull << 9;
  Rng rng(3);
  for (int rep = 0; rep < 20; ++rep) {
    std::vector<double> vr(dim);
    for (std::size_t k = 0; k < dim; ++k) vr[k] = rng.normal();
    auto via_mpo = mpo_apply_dense(mpo, vr);
    std::vector<double> via_terms;
    hamiltonian_matvec(terms, vr, via_terms, false);
    double max_diff = 0.0;
    for (std::size_t k = 0; k < dim; ++k)
      max_diff = std::max(max_diff, std::abs(via_mpo[k] - via_terms[k]));
    CHECK(max_diff < 1e-12);
  }
}

TEST_CASE("dmrg: 1x2 singlet energy -3 J1") {
  auto terms = heisenberg_terms(build_lattice(1, 2), 1.0, 0.0);
  DmrgOptions opt;
  opt.chi_max = 2;
  opt.n_sweeps = 4;
  DmrgResult r = dmrg_ground_state(build_mpo(terms), opt);
  CHECK(r.energy == doctest::Approx(-3.0).epsilon(1e-10));
  CHECK(r.mps.canonical == CanonicalForm::kRight);
}

TEST_CASE("dmrg: 2x2 J2=0.5 matches dense diagonalization") {
  auto lat = build_lattice(2, 2);
  auto terms = heisenberg_terms(lat, 1.0, 0.5);
  DmrgOptions opt;
  opt.chi_max = 4;
  opt.n_sweeps = 8;
  DmrgResult r = dmrg_ground_state(build_mpo(terms), opt);
  CHECK(r.energy == doctest::Approx(fixtures::k2x2_j2_05_energy).epsilon(1e-8));
}

TEST_CASE("dmrg: monotone sweeps and variational bound on 2x5") {
  auto lat = build_lattice(2, 5);
  auto terms = heisenberg_terms(lat, 1.0, 0.5);
  Mpo mpo = build_mpo(terms);
  // chi=16 cannot represent this state exactly (middle-cut rank is 32);
  // expect the variational bound and monotone sweeps, not convergence.
  DmrgOptions opt;
  opt.chi_max = 16;
  opt.n_sweeps = 8;
  opt.seed = 5;
  DmrgResult r = dmrg_ground_state(mpo, opt);
  for (std::size_t k = 1; k < r.sweep_energies.size(); ++k)
    CHECK(r.sweep_energies[k] <= r.sweep_energies[k - 1] + 1e-9);
  CHECK(r.energy >= fixtures::k2x5_j2_05_energy - 1e-9);
  CHECK(r.energy <= fixtures::k2x5_j2_05_energy * (1.0 - 0.03));

  // chi=32 covers every cut exactly: DMRG must hit the fixture.
  DmrgOptions full;
  full.chi_max = 32;
  full.n_sweeps = 10;
  full.seed = 5;
  DmrgResult rf = dmrg_ground_state(mpo, full);
  CHECK(rf.energy ==
        doctest::Approx(fixtures::k2x5_j2_05_energy).epsilon(1e-8));
}

TEST_CASE("dmrg: bond-dimension monotonicity on 3x4") {
  auto lat = build_lattice(3, 4);
  auto terms = heisenberg_terms(lat, 1.0, 0.5);
  Mpo mpo = build_mpo(terms);
  double prev = 1e9;
  for (std::size_t chi : {2ul, 4ul, 8ul}) {
    DmrgOptions opt;
    opt.chi_max = chi;
    opt.n_sweeps = 10;
    opt.seed = 11;
    DmrgResult r = dmrg_ground_state(mpo, opt);
    CHECK(r.energy <= prev + 1e-9);
    CHECK(r.energy >= fixtures::k3x4_j2_05_energy - 1e-9);
    prev = r.energy;
  }
}

TEST_CASE("dmrg: result state is right-canonical and normalized") {
  auto terms = heisenberg_terms(build_lattice(2, 3), 1.0, 0.5);
  DmrgOptions opt;
  opt.chi_max = 8;
  opt.n_sweeps = 6;
  DmrgResult r = dmrg_ground_state(build_mpo(terms), opt);
  double norm2 = 0.0;
  for (std::uint64_t v = 0; v < 64; ++v)
    norm2 += std::norm(mps_evaluate(r.mps, SpinConfig::from_index(v, 6)));
  CHECK(norm2 == doctest::Approx(1.0).epsilon(1e-10));
  // energy recomputed from an independent route: connected-configs matvec
  std::vector<double> amp_re(64), amp_im(64);
  std::vector<Complex> psi(64);
  for (std::uint64_t v = 0; v < 64; ++v)
    psi[v] = mps_evaluate(r.mps, SpinConfig::from_index(v, 6));
  double energy = 0.0;
  for (std::uint64_t v = 0; v < 64; ++v) {
    SpinConfig x = SpinConfig::from_index(v, 6);
    for (const auto& e : connected_configs(terms, x))
      energy += (std::conj(psi[v]) * e.element * psi[e.y.to_index()]).real();
  }
  CHECK(energy == doctest::Approx(r.energy).epsilon(1e-9));
}
