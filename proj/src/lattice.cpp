#include "antn/lattice.hpp"

namespace antn {

Lattice build_lattice(std::size_t lx, std::size_t ly) {
  if (lx == 0 || ly == 0)
    throw ConfigError("build_lattice: dimensions must be >= 1");
  return Lattice{lx, ly};
}

namespace {

Bond make_bond(const Lattice& lat, std::size_t a, std::size_t b,
               double coupling) {
  if (a > b) std::swap(a, b);
  return Bond{a, b, coupling,
              lat.on_sublattice_a(a) == lat.on_sublattice_a(b)};
}

}  // namespace

HamiltonianTerms heisenberg_terms(const Lattice& lat, double j1, double j2,
                                  bool marshall) {
  HamiltonianTerms terms;
  terms.n = lat.n_sites();
  terms.j1 = j1;
  terms.j2 = j2;
  terms.marshall_sign = marshall;
  for (std::size_t r = 0; r < lat.lx; ++r) {
    for (std::size_t c = 0; c < lat.ly; ++c) {
      const std::size_t s = lat.site(r, c);
      if (c + 1 < lat.ly)
        terms.nn_bonds.push_back(make_bond(lat, s, lat.site(r, c + 1), j1));
      if (r + 1 < lat.lx)
        terms.nn_bonds.push_back(make_bond(lat, s, lat.site(r + 1, c), j1));
      if (r + 1 < lat.lx && c + 1 < lat.ly) {
        terms.nnn_bonds.push_back(
            make_bond(lat, s, lat.site(r + 1, c + 1), j2));
        terms.nnn_bonds.push_back(
            make_bond(lat, lat.site(r, c + 1), lat.site(r + 1, c), j2));
      }
    }
  }
  return terms;
}

std::vector<ConnectedEntry> connected_configs(const HamiltonianTerms& terms,
                                              const SpinConfig& x) {
  std::vector<ConnectedEntry> out;
  out.reserve(terms.n_bonds() + 1);
  out.push_back(ConnectedEntry{x, 0.0});  // diagonal slot, filled below
  for_each_connected(terms, x, [&](std::size_t p, std::size_t q, double elem) {
    if (p == static_cast<std::size_t>(-1)) {
      out.front().element = elem;
    } else {
      ConnectedEntry e{x, elem};
      e.y.bits[p] ^= 1u;
      e.y.bits[q] ^= 1u;
      out.push_back(std::move(e));
    }
  });
  return out;
}

int marshall_sign(const Lattice& lat, const SpinConfig& x) {
  int downs_on_a = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (x[i] && lat.on_sublattice_a(i)) ++downs_on_a;
  }
  return (downs_on_a % 2 == 0) ? 1 : -1;
}

}  // namespace antn
