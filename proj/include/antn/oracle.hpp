#pragma once

#include <string>
#include <vector>

#include "antn/lattice.hpp"
#include "antn/wavefunction.hpp"

namespace antn {

struct EdResult {
  double energy = 0.0;
  double residual = 0.0;
  std::string path;                  // "dense" or "sparse"
  std::vector<double> ground_vector; // dense path only
};

enum class EdPath { kAuto, kDense, kSparse };

/// Dense real Hamiltonian (dim 2^n, row-major) assembled from Kronecker
/// products of single-site operators; the route is independent of
/// connected_configs. n <= 12.
std::vector<double> dense_hamiltonian(const HamiltonianTerms& terms,
                                      const Lattice& lattice);

/// Sparse matvec out = H v built on the connected-configuration expansion.
void hamiltonian_matvec(const HamiltonianTerms& terms,
                        const std::vector<double>& v, std::vector<double>& out,
                        bool parallel);

/// Lowest eigenpair: dense eigensolve for n <= 12, Lanczos matvec for
/// n <= 20. Refuses n > 20.
EdResult exact_ground_state(const HamiltonianTerms& terms,
                            const Lattice& lattice,
                            EdPath path = EdPath::kAuto,
                            std::uint64_t seed = 7);

struct DistributionTable {
  std::vector<double> probs;  // |psi(x)|^2 indexed by SpinConfig::to_index
  double sum = 0.0;
};

/// Full |psi|^2 table over the 2^n basis (n <= 12).
DistributionTable enumerate_distribution(const Wavefunction& psi,
                                         std::size_t n, bool parallel = true);

/// Total variation distance between a sampled histogram and a table.
double tv_distance(const std::vector<double>& probs,
                   const std::vector<std::uint64_t>& counts,
                   std::size_t n_samples);

}  // namespace antn
