#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "antn/common.hpp"

namespace antn {

/// An n-bit basis configuration; bit 0 = spin up, 1 = spin down.
struct SpinConfig {
  std::vector<std::uint8_t> bits;

  SpinConfig() = default;
  explicit SpinConfig(std::size_t n) : bits(n, 0) {}

  std::size_t size() const { return bits.size(); }
  std::uint8_t& operator[](std::size_t i) { return bits[i]; }
  std::uint8_t operator[](std::size_t i) const { return bits[i]; }
  bool operator==(const SpinConfig& o) const { return bits == o.bits; }

  /// Packs into an integer index, site 0 at the least significant bit.
  std::uint64_t to_index() const {
    std::uint64_t v = 0;
    for (std::size_t i = 0; i < bits.size(); ++i)
      v |= static_cast<std::uint64_t>(bits[i]) << i;
    return v;
  }
  static SpinConfig from_index(std::uint64_t v, std::size_t n) {
    SpinConfig x(n);
    for (std::size_t i = 0; i < n; ++i) x.bits[i] = (v >> i) & 1u;
    return x;
  }

  SpinConfig flipped_all() const {
    SpinConfig y = *this;
    for (auto& b : y.bits) b ^= 1u;
    return y;
  }
};

/// Open-boundary Lx x Ly lattice with row-major site ordering:
/// site(r, c) = r * Ly + c for 0-based r in [0, Lx), c in [0, Ly).
struct Lattice {
  std::size_t lx = 0;
  std::size_t ly = 0;

  std::size_t n_sites() const { return lx * ly; }
  std::size_t site(std::size_t r, std::size_t c) const { return r * ly + c; }
  std::pair<std::size_t, std::size_t> coords(std::size_t i) const {
    return {i / ly, i % ly};
  }
  /// Checkerboard sublattice: true for even row+col.
  bool on_sublattice_a(std::size_t i) const {
    auto [r, c] = coords(i);
    return ((r + c) % 2) == 0;
  }
};

Lattice build_lattice(std::size_t lx, std::size_t ly);

struct Bond {
  std::size_t i = 0;  // i < j
  std::size_t j = 0;
  double coupling = 0.0;
  bool same_sublattice = false;  // decides the Marshall sign of a pair flip
};

/// Heisenberg couplings in the Pauli convention: each bond contributes
/// J (XX + YY + ZZ) with eigenvalues {-3J, J, J, J} on the pair.
struct HamiltonianTerms {
  std::size_t n = 0;
  double j1 = 0.0;
  double j2 = 0.0;
  bool marshall_sign = false;
  std::vector<Bond> nn_bonds;
  std::vector<Bond> nnn_bonds;

  std::size_t n_bonds() const { return nn_bonds.size() + nnn_bonds.size(); }
};

HamiltonianTerms heisenberg_terms(const Lattice& lattice, double j1, double j2,
                                  bool marshall_sign = false);

/// One row of the Hamiltonian in configuration space.
struct ConnectedEntry {
  SpinConfig y;
  double element = 0.0;
};

/// All configurations y with <y|H|x> != 0, diagonal entry first.
std::vector<ConnectedEntry> connected_configs(const HamiltonianTerms& terms,
                                              const SpinConfig& x);

/// Allocation-free form used by the hot loops: calls fn(diagonal) once with
/// (p, q) = (SIZE_MAX, SIZE_MAX), then fn(p, q, element) per flipped pair.
template <class Fn>
void for_each_connected(const HamiltonianTerms& terms, const SpinConfig& x,
                        Fn&& fn) {
  if (x.size() != terms.n)
    throw Error("connected_configs: config length mismatch");
  double diag = 0.0;
  auto handle = [&](const Bond& b) {
    const int zi = x[b.i] ? -1 : 1;
    const int zj = x[b.j] ? -1 : 1;
    diag += b.coupling * zi * zj;
    if (x[b.i] != x[b.j]) {
      double elem = 2.0 * b.coupling;
      if (terms.marshall_sign && !b.same_sublattice) elem = -elem;
      fn(b.i, b.j, elem);
    }
  };
  for (const Bond& b : terms.nn_bonds) handle(b);
  for (const Bond& b : terms.nnn_bonds) handle(b);
  fn(static_cast<std::size_t>(-1), static_cast<std::size_t>(-1), diag);
}

/// (-1)^(number of down spins on the even-(row+col) sublattice).
int marshall_sign(const Lattice& lattice, const SpinConfig& x);

}  // namespace antn
