#pragma once

// Reference ground-state energies, Pauli convention, J1 = 1, open boundary.
// Computed once with the oracle module (dense eigensolve for n <= 10,
// Lanczos with full reorthogonalization above) and frozen here before any
// ansatz development; the test suites treat these as ground truth.

namespace fixtures {

struct Ed4x4 {
  double j2;
  double energy;  // total, 16 sites
};

inline constexpr Ed4x4 k4x4[] = {
    {0.2, -33.885952491904},
    {0.5, -30.022227800324},
    {0.8, -28.566457928416},
};

inline constexpr double k1x2_energy = -3.0;
inline constexpr double k2x2_j2_05_energy = -7.0;
inline constexpr double k1x4_energy = -6.464101615138;
inline constexpr double k3x3_j2_02_energy = -17.659874016341;
inline constexpr double k2x5_j2_05_energy = -18.349233952376;
inline constexpr double k3x4_j2_05_energy = -22.138013686823;

inline double energy_4x4(double j2) {
  for (const auto& fx : k4x4) {
    if (fx.j2 == j2) return fx.energy;
  }
  return 0.0;
}

}  // namespace fixtures
