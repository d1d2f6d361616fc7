#pragma once

#include <cmath>
#include <complex>
#include <functional>
#include <vector>

#include <Eigen/Dense>

#include "antn/common.hpp"

namespace antn {

template <class Scalar>
struct LanczosOutcome {
  double eigenvalue = 0.0;
  std::vector<Scalar> vector;
  std::size_t iterations = 0;
  double residual = 0.0;
  bool converged = false;
};

namespace detail {
inline double real_part(double v) { return v; }
inline double real_part(const Complex& v) { return v.real(); }
}  // namespace detail

/// Lanczos for the lowest eigenpair of a Hermitian operator given as a
/// matvec. Full reorthogonalization against the stored Krylov basis; stops
/// when the residual estimate drops below tol * max(1, |theta|).
template <class Scalar, class MatVec>
LanczosOutcome<Scalar> lanczos_lowest(std::size_t dim, MatVec&& matvec,
                                      std::vector<Scalar> v0,
                                      std::size_t max_iter = 300,
                                      double tol = 1e-10) {
  using Vec = std::vector<Scalar>;
  auto dot = [&](const Vec& a, const Vec& b) {
    Scalar acc{};
    for (std::size_t i = 0; i < dim; ++i) {
      if constexpr (std::is_same_v<Scalar, Complex>) {
        acc += std::conj(a[i]) * b[i];
      } else {
        acc += a[i] * b[i];
      }
    }
    return acc;
  };
  auto norm = [&](const Vec& a) {
    double acc = 0.0;
    for (std::size_t i = 0; i < dim; ++i) acc += std::norm(a[i]);
    return std::sqrt(acc);
  };

  const double nv0 = norm(v0);
  if (!(nv0 > 0)) throw NumericalError("lanczos: zero start vector");
  for (auto& z : v0) z /= nv0;

  std::vector<Vec> basis{v0};
  std::vector<double> alpha, beta;
  Vec w(dim);
  LanczosOutcome<Scalar> out;

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es;
  std::size_t k = 0;
  for (; k < max_iter; ++k) {
    matvec(basis[k], w);
    const double a = detail::real_part(dot(basis[k], w));
    alpha.push_back(a);
    for (std::size_t i = 0; i < dim; ++i) w[i] -= a * basis[k][i];
    if (k > 0) {
      const double b = beta[k - 1];
      for (std::size_t i = 0; i < dim; ++i) w[i] -= b * basis[k - 1][i];
    }
    // full reorthogonalization, twice
    for (int pass = 0; pass < 2; ++pass) {
      for (const Vec& q : basis) {
        const Scalar c = dot(q, w);
        for (std::size_t i = 0; i < dim; ++i) w[i] -= c * q[i];
      }
    }

    // Rayleigh-Ritz on the tridiagonal
    const std::size_t m = alpha.size();
    Eigen::MatrixXd tri = Eigen::MatrixXd::Zero(m, m);
    for (std::size_t i = 0; i < m; ++i) {
      tri(i, i) = alpha[i];
      if (i + 1 < m) tri(i, i + 1) = tri(i + 1, i) = beta[i];
    }
    es.compute(tri);
    const double theta = es.eigenvalues()(0);
    const double b_next = norm(w);
    const double resid_est = b_next * std::abs(es.eigenvectors()(m - 1, 0));
    out.eigenvalue = theta;
    out.iterations = m;
    if (resid_est < tol * std::max(1.0, std::abs(theta)) || b_next < 1e-14 ||
        m == dim) {
      out.converged = true;
      break;
    }
    beta.push_back(b_next);
    for (std::size_t i = 0; i < dim; ++i) w[i] /= b_next;
    basis.push_back(w);
  }

  // Ritz vector from the final tridiagonal solve.
  const std::size_t m = alpha.size();
  out.vector.assign(dim, Scalar{});
  for (std::size_t j = 0; j < m; ++j) {
    const double c = es.eigenvectors()(j, 0);
    for (std::size_t i = 0; i < dim; ++i) out.vector[i] += c * basis[j][i];
  }
  const double vn = norm(out.vector);
  for (auto& z : out.vector) z /= vn;

  matvec(out.vector, w);
  double r2 = 0.0;
  for (std::size_t i = 0; i < dim; ++i)
    r2 += std::norm(w[i] - out.eigenvalue * out.vector[i]);
  out.residual = std::sqrt(r2);
  return out;
}

}  // namespace antn
