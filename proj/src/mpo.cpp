#include "antn/mpo.hpp"

#include <array>
#include <map>

namespace antn {

std::size_t Mpo::max_bond() const {
  std::size_t m = 1;
  for (const auto& t : tensors) m = std::max(m, t.dr);
  return m;
}

namespace {

// Local operators, row = output spin, col = input spin; bit 0 = up.
using Local = std::array<double, 4>;
constexpr std::size_t kX = 0, kIY = 1, kZ = 2;

const Local& local_op(std::size_t kind) {
  static const std::array<Local, 3> all = {{
      {0.0, 1.0, 1.0, 0.0},    // X
      {0.0, 1.0, -1.0, 0.0},   // iY
      {1.0, 0.0, 0.0, -1.0},   // Z
  }};
  return all[kind];
}

struct Channel {
  std::size_t src;
  std::size_t kind;
  bool operator<(const Channel& o) const {
    return src != o.src ? src < o.src : kind < o.kind;
  }
};

}  // namespace

Mpo build_mpo(const HamiltonianTerms& terms) {
  const std::size_t n = terms.n;
  std::vector<Bond> bonds = terms.nn_bonds;
  bonds.insert(bonds.end(), terms.nnn_bonds.begin(), terms.nnn_bonds.end());

  // Coupling of the closing operator. (iY)(iY) carries -J so the pair
  // reproduces J * Y Y; the Marshall transform flips XX and YY on bonds
  // linking the two sublattices.
  auto coupling = [&](const Bond& b, std::size_t kind) {
    double c = b.coupling;
    if (kind == kIY) c = -c;
    if (kind != kZ && terms.marshall_sign && !b.same_sublattice) c = -c;
    return c;
  };

  // States per cut c (0..n): index 0 = "begin"; then live channels in
  // sorted order; last = "done". Boundary cuts hold a single state.
  std::vector<std::vector<Channel>> live(n + 1);
  for (std::size_t c = 1; c < n; ++c) {
    std::map<Channel, bool> seen;
    for (const Bond& b : bonds) {
      if (b.i < c && b.j >= c) {
        for (std::size_t k = 0; k < 3; ++k) seen[Channel{b.i, k}] = true;
      }
    }
    for (const auto& [ch, _] : seen) live[c].push_back(ch);
  }

  auto dim = [&](std::size_t c) -> std::size_t {
    if (c == 0 || c == n) return 1;
    return live[c].size() + 2;
  };
  auto begin_idx = [](std::size_t) -> std::size_t { return 0; };
  auto done_idx = [&](std::size_t c) -> std::size_t { return dim(c) - 1; };
  auto channel_idx = [&](std::size_t c, const Channel& ch) -> std::size_t {
    const auto& v = live[c];
    for (std::size_t k = 0; k < v.size(); ++k)
      if (!(v[k] < ch) && !(ch < v[k])) return k + 1;
    throw Error("build_mpo: channel not live at cut");
  };

  Mpo mpo;
  mpo.tensors.reserve(n);
  for (std::size_t s = 0; s < n; ++s) {
    MpoTensor w(dim(s), dim(s + 1));
    auto put = [&](std::size_t l, std::size_t r, const Local& op, double cf) {
      for (std::size_t so = 0; so < 2; ++so)
        for (std::size_t si = 0; si < 2; ++si)
          w.at(l, so, si, r) += cf * op[so * 2 + si];
    };
    const Local ident = {1.0, 0.0, 0.0, 1.0};
    const bool has_begin_r = s + 1 < n;
    const bool has_done_l = s > 0;

    if (has_begin_r) put(begin_idx(s), begin_idx(s + 1), ident, 1.0);
    if (has_done_l) put(done_idx(s), done_idx(s + 1), ident, 1.0);

    // open a channel at its source site
    for (const Channel& ch : live[s + 1]) {
      if (ch.src == s)
        put(begin_idx(s), channel_idx(s + 1, ch), local_op(ch.kind), 1.0);
    }
    for (const Channel& ch : live[s]) {
      // carry the channel through
      if (s + 1 < n) {
        for (const Channel& cr : live[s + 1]) {
          if (ch.src == cr.src && ch.kind == cr.kind)
            put(channel_idx(s, ch), channel_idx(s + 1, cr), ident, 1.0);
        }
      }
      // close on any bond (src, s)
      for (const Bond& b : bonds) {
        if (b.i == ch.src && b.j == s)
          put(channel_idx(s, ch), done_idx(s + 1), local_op(ch.kind),
              coupling(b, ch.kind));
      }
    }
    mpo.tensors.push_back(std::move(w));
  }
  return mpo;
}

std::vector<double> mpo_to_dense(const Mpo& mpo) {
  const std::size_t n = mpo.n_sites();
  if (n > 8) throw Error("mpo_to_dense: n > 8");
  const std::size_t dim = 1ull << n;
  // T[(c_pref * 2^s + r_pref) * D + a], accumulated site by site.
  std::vector<double> t{1.0};
  std::size_t pref = 1;
  for (std::size_t s = 0; s < n; ++s) {
    const MpoTensor& w = mpo.tensors[s];
    std::vector<double> next(pref * 2 * pref * 2 * w.dr, 0.0);
    for (std::size_t cp = 0; cp < pref; ++cp) {
      for (std::size_t rp = 0; rp < pref; ++rp) {
        for (std::size_t a = 0; a < w.dl; ++a) {
          const double base = t[(cp * pref + rp) * w.dl + a];
          if (base == 0.0) continue;
          for (std::size_t so = 0; so < 2; ++so) {
            for (std::size_t si = 0; si < 2; ++si) {
              for (std::size_t b = 0; b < w.dr; ++b) {
                const double v = w.at(a, so, si, b);
                if (v == 0.0) continue;
                const std::size_t cp2 = cp + si * pref;
                const std::size_t rp2 = rp + so * pref;
                next[(cp2 * (pref * 2) + rp2) * w.dr + b] += base * v;
              }
            }
          }
        }
      }
    }
    t = std::move(next);
    pref *= 2;
  }
  std::vector<double> dense(dim * dim);
  for (std::size_t c = 0; c < dim; ++c)
    for (std::size_t r = 0; r < dim; ++r) dense[r * dim + c] = t[c * dim + r];
  return dense;
}

std::vector<double> mpo_apply_dense(const Mpo& mpo,
                                    const std::vector<double>& v) {
  const std::size_t n = mpo.n_sites();
  const std::size_t dim = 1ull << n;
  if (v.size() != dim) throw Error("mpo_apply_dense: dimension mismatch");
  // A[(rest * 2^s + done) * D + a]: `done` = output bits of sites < s,
  // `rest` = input bits of sites >= s.
  std::vector<double> a = v;  // D_0 = 1
  std::size_t done_dim = 1;
  for (std::size_t s = 0; s < n; ++s) {
    const MpoTensor& w = mpo.tensors[s];
    const std::size_t rest_dim = dim / (done_dim * 2);
    std::vector<double> next(dim * w.dr, 0.0);
    for (std::size_t rest = 0; rest < rest_dim; ++rest) {
      for (std::size_t si = 0; si < 2; ++si) {
        for (std::size_t done = 0; done < done_dim; ++done) {
          const std::size_t in_idx = (rest * 2 + si) * done_dim + done;
          for (std::size_t l = 0; l < w.dl; ++l) {
            const double base = a[in_idx * w.dl + l];
            if (base == 0.0) continue;
            for (std::size_t so = 0; so < 2; ++so) {
              for (std::size_t r = 0; r < w.dr; ++r) {
                const double val = w.at(l, so, si, r);
                if (val == 0.0) continue;
                const std::size_t out_idx =
                    rest * (done_dim * 2) + so * done_dim + done;
                next[out_idx * w.dr + r] += base * val;
              }
            }
          }
        }
      }
    }
    a = std::move(next);
    done_dim *= 2;
  }
  return a;
}

}  // namespace antn
