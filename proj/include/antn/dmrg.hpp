#pragma once

#include <vector>

#include "antn/mpo.hpp"
#include "antn/mps.hpp"

namespace antn {

struct DmrgOptions {
  std::size_t chi_max = 8;
  std::size_t n_sweeps = 10;
  std::uint64_t seed = 1;
  double svd_cutoff = 1e-12;
  std::size_t lanczos_max_iter = 200;
  double lanczos_tol = 1e-10;
  /// Stop sweeping once the per-sweep energy change drops below this.
  double sweep_tol = 1e-11;
  /// Rank-injecting noise added to the optimized two-site tensor before the
  /// SVD, decaying by 10x per sweep and switched off for the final sweeps.
  /// Plain two-site updates stall in local minima on frustrated 2D-mapped
  /// chains without it.
  double noise_initial = 1e-2;
};

struct DmrgResult {
  Mps mps;  // right canonical
  double energy = 0.0;
  std::vector<double> sweep_energies;
  std::vector<double> discarded_weights;
};

/// Two-site DMRG ground-state search against the MPO, starting from a
/// seeded random product state. Local problems are solved by Lanczos on
/// the effective Hamiltonian; bonds grow through the two-site SVD.
DmrgResult dmrg_ground_state(const Mpo& mpo, const DmrgOptions& options);

/// <psi|H|psi> by full transfer contraction (state assumed normalized).
double mpo_expectation(const Mpo& mpo, const Mps& mps);

}  // namespace antn
