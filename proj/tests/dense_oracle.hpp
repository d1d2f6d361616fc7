#pragma once

// Test-only dense Hamiltonian built straight from the Kronecker-product
// definition: H = sum_bonds J (X_i X_j + Y_i Y_j + Z_i Z_j) with each term
// evaluated entrywise as the product of per-site 2x2 factors. Deliberately
// naive and independent of the library's configuration-space expansion.

#include <array>
#include <complex>
#include <cstdint>
#include <vector>

#include "antn/lattice.hpp"

namespace test_oracle {

using Complex = std::complex<double>;

struct DenseMatrix {
  std::size_t dim = 0;
  std::vector<double> entries;  // row-major, real (the model is real)

  double operator()(std::uint64_t r, std::uint64_t c) const {
    return entries[r * dim + c];
  }
};

inline DenseMatrix dense_hamiltonian(const antn::Lattice& lat, double j1,
                                     double j2, bool marshall) {
  const std::size_t n = lat.n_sites();
  const std::size_t dim = 1ull << n;
  const std::array<std::array<Complex, 4>, 3> pauli = {{
      {Complex(0, 0), Complex(1, 0), Complex(1, 0), Complex(0, 0)},    // X
      {Complex(0, 0), Complex(0, -1), Complex(0, 1), Complex(0, 0)},   // Y
      {Complex(1, 0), Complex(0, 0), Complex(0, 0), Complex(-1, 0)},   // Z
  }};

  auto terms = antn::heisenberg_terms(lat, j1, j2, false);
  std::vector<antn::Bond> bonds = terms.nn_bonds;
  bonds.insert(bonds.end(), terms.nnn_bonds.begin(), terms.nnn_bonds.end());

  DenseMatrix h;
  h.dim = dim;
  h.entries.assign(dim * dim, 0.0);
  for (const auto& b : bonds) {
    for (const auto& p : pauli) {
      for (std::uint64_t r = 0; r < dim; ++r) {
        for (std::uint64_t c = 0; c < dim; ++c) {
          Complex v(b.coupling, 0);
          for (std::size_t s = 0; s < n && v != Complex(0, 0); ++s) {
            const std::uint64_t rs = (r >> s) & 1u;
            const std::uint64_t cs = (c >> s) & 1u;
            if (s == b.i || s == b.j) {
              v *= p[rs * 2 + cs];
            } else if (rs != cs) {
              v = Complex(0, 0);
            }
          }
          h.entries[r * dim + c] += v.real();
        }
      }
    }
  }

  if (marshall) {
    auto sign = [&](std::uint64_t v) {
      int downs_on_a = 0;
      for (std::size_t s = 0; s < n; ++s) {
        if (((v >> s) & 1u) && lat.on_sublattice_a(s)) ++downs_on_a;
      }
      return (downs_on_a % 2 == 0) ? 1.0 : -1.0;
    };
    for (std::uint64_t r = 0; r < dim; ++r)
      for (std::uint64_t c = 0; c < dim; ++c)
        h.entries[r * dim + c] *= sign(r) * sign(c);
  }
  return h;
}

}  // namespace test_oracle
