#pragma once

#include <vector>

#include "antn/lattice.hpp"
#include "antn/numerics.hpp"

namespace antn {

/// Rank-4 MPO site tensor with dims (dl, 2, 2, dr); index (l, s_out, s_in, r).
/// Entries are real: Y Y bonds are encoded as -(iY)(iY) with the real
/// matrix iY = [[0, 1], [-1, 0]], which leaves the operator unchanged.
struct MpoTensor {
  std::size_t dl = 0;
  std::size_t dr = 0;
  std::vector<double> entries;

  MpoTensor() = default;
  MpoTensor(std::size_t l, std::size_t r)
      : dl(l), dr(r), entries(l * 2 * 2 * r, 0.0) {}

  double& at(std::size_t l, std::size_t so, std::size_t si, std::size_t r) {
    return entries[((l * 2 + so) * 2 + si) * dr + r];
  }
  const double& at(std::size_t l, std::size_t so, std::size_t si,
                   std::size_t r) const {
    return entries[((l * 2 + so) * 2 + si) * dr + r];
  }
};

struct Mpo {
  std::vector<MpoTensor> tensors;
  std::size_t n_sites() const { return tensors.size(); }
  std::size_t max_bond() const;
};

/// Finite-state-automaton MPO for the bond Hamiltonian: one channel per
/// (source site, operator) pair open across each cut, so the operator bond
/// dimension is O(Ly) for the row-major 2D ordering.
Mpo build_mpo(const HamiltonianTerms& terms);

/// Dense 2^n x 2^n matrix (row-major, row = output index); n <= 8.
std::vector<double> mpo_to_dense(const Mpo& mpo);

/// out = MPO * v on a full state vector.
std::vector<double> mpo_apply_dense(const Mpo& mpo,
                                    const std::vector<double>& v);

}  // namespace antn
