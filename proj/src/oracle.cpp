#include "antn/oracle.hpp"

#include <Eigen/Dense>
#include <cmath>

#include "antn/lanczos.hpp"

namespace antn {

namespace {

// Single-nonzero-per-row 2^k x 2^k operator: row r has value val[r] in
// column col[r]. Identity, X, Z and iY = [[0,1],[-1,0]] all have this form,
// and it is closed under Kronecker products.
struct MonomialOp {
  std::vector<std::uint64_t> col;
  std::vector<double> val;

  static MonomialOp local(char kind) {
    switch (kind) {
      case 'I': return {{0, 1}, {1.0, 1.0}};
      case 'X': return {{1, 0}, {1.0, 1.0}};
      case 'Z': return {{0, 1}, {1.0, -1.0}};
      case 'y': return {{1, 0}, {1.0, -1.0}};  // iY
    }
    throw Error("unknown local operator");
  }
};

// kron(a, b): index (ra, rb) -> ra * dim_b + rb.
MonomialOp kron(const MonomialOp& a, const MonomialOp& b) {
  MonomialOp out;
  const std::size_t db = b.col.size();
  out.col.resize(a.col.size() * db);
  out.val.resize(out.col.size());
  for (std::size_t ra = 0; ra < a.col.size(); ++ra) {
    for (std::size_t rb = 0; rb < db; ++rb) {
      out.col[ra * db + rb] = a.col[ra] * db + b.col[rb];
      out.val[ra * db + rb] = a.val[ra] * b.val[rb];
    }
  }
  return out;
}

// Pauli string over the whole chain; site 0 occupies the least significant
// bit, so it is the last Kronecker factor.
MonomialOp pauli_string(std::size_t n, std::size_t i, std::size_t j,
                        char kind) {
  MonomialOp op = MonomialOp::local(n - 1 == i || n - 1 == j ? kind : 'I');
  for (std::size_t s = n - 1; s-- > 0;) {
    op = kron(op, MonomialOp::local(s == i || s == j ? kind : 'I'));
  }
  return op;
}

}  // namespace

std::vector<double> dense_hamiltonian(const HamiltonianTerms& terms,
                                      const Lattice& lattice) {
  const std::size_t n = terms.n;
  if (n > 12) throw Error("dense_hamiltonian: n > 12");
  const std::size_t dim = 1ull << n;
  std::vector<double> h(dim * dim, 0.0);

  std::vector<Bond> bonds = terms.nn_bonds;
  bonds.insert(bonds.end(), terms.nnn_bonds.begin(), terms.nnn_bonds.end());
  for (const Bond& b : bonds) {
    for (char kind : {'X', 'y', 'Z'}) {
      MonomialOp op = pauli_string(n, b.i, b.j, kind);
      const double sign = kind == 'y' ? -1.0 : 1.0;  // YY = -(iY)(iY)
      for (std::uint64_t r = 0; r < dim; ++r)
        h[r * dim + op.col[r]] += sign * b.coupling * op.val[r];
    }
  }

  if (terms.marshall_sign) {
    std::vector<double> sign(dim);
    for (std::uint64_t v = 0; v < dim; ++v)
      sign[v] = marshall_sign(lattice, SpinConfig::from_index(v, n));
    for (std::uint64_t r = 0; r < dim; ++r)
      for (std::uint64_t c = 0; c < dim; ++c)
        h[r * dim + c] *= sign[r] * sign[c];
  }
  return h;
}

void hamiltonian_matvec(const HamiltonianTerms& terms,
                        const std::vector<double>& v, std::vector<double>& out,
                        bool parallel) {
  const std::size_t n = terms.n;
  const std::uint64_t dim = 1ull << n;
  if (v.size() != dim) throw Error("hamiltonian_matvec: dimension mismatch");
  out.assign(dim, 0.0);
#pragma omp parallel for schedule(static) if (parallel)
  for (std::int64_t xi = 0; xi < static_cast<std::int64_t>(dim); ++xi) {
    SpinConfig x = SpinConfig::from_index(static_cast<std::uint64_t>(xi), n);
    double acc = 0.0;
    for_each_connected(terms, x, [&](std::size_t p, std::size_t q, double el) {
      if (p == static_cast<std::size_t>(-1)) {
        acc += el * v[xi];
      } else {
        const std::uint64_t yi =
            static_cast<std::uint64_t>(xi) ^ (1ull << p) ^ (1ull << q);
        acc += el * v[yi];
      }
    });
    out[xi] = acc;
  }
}

EdResult exact_ground_state(const HamiltonianTerms& terms,
                            const Lattice& lattice, EdPath path,
                            std::uint64_t seed) {
  const std::size_t n = terms.n;
  if (n > 20)
    throw Error("exact_ground_state: refusing n > 20 spins (" +
                std::to_string(n) + " requested)");
  if (path == EdPath::kAuto) path = n <= 12 ? EdPath::kDense : EdPath::kSparse;

  EdResult out;
  const std::uint64_t dim = 1ull << n;
  if (path == EdPath::kDense) {
    std::vector<double> h = dense_hamiltonian(terms, lattice);
    Eigen::Map<const Eigen::MatrixXd> hm(h.data(), dim, dim);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(hm);
    out.energy = es.eigenvalues()(0);
    out.path = "dense";
    out.ground_vector.assign(es.eigenvectors().col(0).data(),
                             es.eigenvectors().col(0).data() + dim);
    Eigen::VectorXd r = hm * es.eigenvectors().col(0) -
                        out.energy * es.eigenvectors().col(0);
    out.residual = r.norm();
  } else {
    Rng rng(seed);
    std::vector<double> v0(dim);
    for (auto& z : v0) z = rng.normal();
    auto matvec = [&](const std::vector<double>& v, std::vector<double>& w) {
      hamiltonian_matvec(terms, v, w, /*parallel=*/true);
    };
    auto res = lanczos_lowest<double>(dim, matvec, std::move(v0), 300, 1e-10);
    if (!res.converged)
      throw NumericalError("exact_ground_state: Lanczos did not converge");
    out.energy = res.eigenvalue;
    out.residual = res.residual;
    out.path = "sparse";
  }
  return out;
}

DistributionTable enumerate_distribution(const Wavefunction& psi,
                                         std::size_t n, bool parallel) {
  if (n > 12) throw Error("enumerate_distribution: n > 12");
  if (psi.n_sites() != n) throw Error("enumerate_distribution: size mismatch");
  const std::uint64_t dim = 1ull << n;
  DistributionTable table;
  table.probs.assign(dim, 0.0);
#pragma omp parallel for schedule(static) if (parallel)
  for (std::int64_t v = 0; v < static_cast<std::int64_t>(dim); ++v) {
    const LogAmp la =
        psi.log_amplitude(SpinConfig::from_index(static_cast<std::uint64_t>(v), n));
    table.probs[v] = la.is_zero() ? 0.0 : std::exp(2.0 * la.log_mag);
  }
  double sum = 0.0;
  for (double p : table.probs) sum += p;
  table.sum = sum;
  return table;
}

double tv_distance(const std::vector<double>& probs,
                   const std::vector<std::uint64_t>& counts,
                   std::size_t n_samples) {
  double tv = 0.0;
  for (std::size_t i = 0; i < probs.size(); ++i) {
    tv += std::abs(probs[i] -
                   static_cast<double>(counts[i]) / static_cast<double>(n_samples));
  }
  return tv / 2.0;
}

}  // namespace antn
