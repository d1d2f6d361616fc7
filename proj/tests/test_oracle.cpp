#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <tuple>

#include "antn/mps.hpp"
#include "antn/oracle.hpp"
#include "dense_oracle.hpp"
#include "fixtures.hpp"

using namespace antn;

TEST_CASE("dense_hamiltonian agrees with the naive kron reference") {
  for (auto [lx, ly, j2, marshall] :
       {std::tuple{1ul, 2ul, 0.0, false}, {2ul, 2ul, 0.5, false},
        std::tuple{2ul, 3ul, 0.3, true}}) {
    auto lat = build_lattice(lx, ly);
    auto terms = heisenberg_terms(lat, 1.0, j2, marshall);
    auto got = dense_hamiltonian(terms, lat);
    auto want = test_oracle::dense_hamiltonian(lat, 1.0, j2, marshall);
    const std::size_t dim = 1ull << lat.n_sites();
    double max_diff = 0.0;
    for (std::size_t k = 0; k < dim * dim; ++k)
      max_diff = std::max(max_diff, std::abs(got[k] - want.entries[k]));
    CHECK(max_diff == 0.0);
  }
}

TEST_CASE("1x2 ground energy is exactly -3 J1") {
  auto lat = build_lattice(1, 2);
  auto terms = heisenberg_terms(lat, 1.0, 0.0);
  EdResult r = exact_ground_state(terms, lat);
  CHECK(r.energy == doctest::Approx(-3.0).epsilon(1e-12));
  CHECK(r.residual < 1e-8);
}

TEST_CASE("dense and sparse paths agree to 1e-9 on a 1x4 chain") {
  auto lat = build_lattice(1, 4);
  auto terms = heisenberg_terms(lat, 1.0, 0.0);
  EdResult dense = exact_ground_state(terms, lat, EdPath::kDense);
  EdResult sparse = exact_ground_state(terms, lat, EdPath::kSparse);
  CHECK(dense.path == "dense");
  CHECK(sparse.path == "sparse");
  CHECK(dense.energy == doctest::Approx(sparse.energy).epsilon(1e-10));
  CHECK(sparse.residual < 1e-8);
}

TEST_CASE("dense vs sparse agreement across small fixtures") {
  for (auto [lx, ly, j2] : {std::tuple{2ul, 2ul, 0.5}, {2ul, 3ul, 0.2},
                            {3ul, 3ul, 0.5}, {2ul, 5ul, 0.8}}) {
    auto lat = build_lattice(lx, ly);
    auto terms = heisenberg_terms(lat, 1.0, j2);
    EdResult dense = exact_ground_state(terms, lat, EdPath::kDense);
    EdResult sparse = exact_ground_state(terms, lat, EdPath::kSparse);
    CHECK(std::abs(dense.energy - sparse.energy) < 1e-9);
  }
}

TEST_CASE("Lanczos eigenvalue stable under a different seed") {
  auto lat = build_lattice(3, 3);
  auto terms = heisenberg_terms(lat, 1.0, 0.5);
  EdResult a = exact_ground_state(terms, lat, EdPath::kSparse, 7);
  EdResult b = exact_ground_state(terms, lat, EdPath::kSparse, 12345);
  CHECK(std::abs(a.energy - b.energy) < 1e-9);
  CHECK(a.residual < 1e-8);
  CHECK(b.residual < 1e-8);
}

TEST_CASE("marshall transform leaves the spectrum unchanged") {
  auto lat = build_lattice(2, 3);
  auto plain = heisenberg_terms(lat, 1.0, 0.4, false);
  auto transformed = heisenberg_terms(lat, 1.0, 0.4, true);
  EdResult a = exact_ground_state(plain, lat);
  EdResult b = exact_ground_state(transformed, lat);
  CHECK(a.energy == doctest::Approx(b.energy).epsilon(1e-10));
}

TEST_CASE("refuses n > 20") {
  auto lat = build_lattice(3, 7);
  auto terms = heisenberg_terms(lat, 1.0, 0.0);
  CHECK_THROWS_AS(exact_ground_state(terms, lat), Error);
}

TEST_CASE("pinned 4x4 fixtures reproduce (sparse path)") {
  for (const auto& fx : fixtures::k4x4) {
    auto lat = build_lattice(4, 4);
    auto terms = heisenberg_terms(lat, 1.0, fx.j2);
    EdResult r = exact_ground_state(terms, lat);
    CHECK(r.energy == doctest::Approx(fx.energy).epsilon(1e-9));
  }
}

TEST_CASE("enumerate_distribution: canonical MPS sums to one") {
  Rng rng(3);
  Mps canon = right_canonicalize(random_mps(8, 4, rng));
  MpsWavefunction wf(canon);
  auto table = enumerate_distribution(wf, 8);
  CHECK(table.sum == doctest::Approx(1.0).epsilon(1e-10));
  auto serial = enumerate_distribution(wf, 8, /*parallel=*/false);
  for (std::size_t i = 0; i < table.probs.size(); ++i)
    CHECK(table.probs[i] == serial.probs[i]);
}

TEST_CASE("matvec parallel and serial paths are bit-identical") {
  auto lat = build_lattice(3, 3);
  auto terms = heisenberg_terms(lat, 1.0, 0.5);
  Rng rng(9);
  std::vector<double> v(1ull << 9);
  for (auto& z : v) z = rng.normal();
  std::vector<double> a, b;
  hamiltonian_matvec(terms, v, a, true);
  hamiltonian_matvec(terms, v, b, false);
  CHECK(a == b);
}
