#include "antn/numerics.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <sstream>

namespace antn {

namespace {

using EigenMat =
    Eigen::Matrix<Complex, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using MapMat = Eigen::Map<EigenMat>;
using ConstMapMat = Eigen::Map<const EigenMat>;

ConstMapMat map_of(const ComplexMatrix& m) {
  return ConstMapMat(m.entries.data(), static_cast<Eigen::Index>(m.rows),
                     static_cast<Eigen::Index>(m.cols));
}

ComplexMatrix from_eigen(const EigenMat& e) {
  ComplexMatrix out(static_cast<std::size_t>(e.rows()),
                    static_cast<std::size_t>(e.cols()));
  MapMat(out.entries.data(), e.rows(), e.cols()) = e;
  return out;
}

bool all_finite(const ComplexMatrix& m) {
  for (const Complex& z : m.entries) {
    if (!std::isfinite(z.real()) || !std::isfinite(z.imag())) return false;
  }
  return true;
}

std::string shape_str(const ComplexMatrix& m) {
  std::ostringstream os;
  os << m.rows << "x" << m.cols;
  return os.str();
}

}  // namespace

ComplexMatrix ComplexMatrix::identity(std::size_t n) {
  ComplexMatrix m(n, n);
  for (std::size_t i = 0; i < n; ++i) m(i, i) = Complex(1, 0);
  return m;
}

ComplexMatrix Tensor3::slice(std::size_t x) const {
  ComplexMatrix m(chi_l, chi_r);
  for (std::size_t l = 0; l < chi_l; ++l)
    for (std::size_t r = 0; r < chi_r; ++r) m(l, r) = (*this)(l, x, r);
  return m;
}

ComplexMatrix matmul(const ComplexMatrix& a, const ComplexMatrix& b) {
  if (a.cols != b.rows) {
    throw NumericalError("matmul: dimension mismatch " + shape_str(a) +
                         " times " + shape_str(b));
  }
  ComplexMatrix out(a.rows, b.cols);
  MapMat(out.entries.data(), static_cast<Eigen::Index>(a.rows),
         static_cast<Eigen::Index>(b.cols))
      .noalias() = map_of(a) * map_of(b);
  return out;
}

ComplexMatrix dagger(const ComplexMatrix& a) {
  ComplexMatrix out(a.cols, a.rows);
  for (std::size_t r = 0; r < a.rows; ++r)
    for (std::size_t c = 0; c < a.cols; ++c) out(c, r) = std::conj(a(r, c));
  return out;
}

QrResult qr(const ComplexMatrix& a) {
  if (a.rows == 0 || a.cols == 0) throw NumericalError("qr: empty matrix");
  if (!all_finite(a)) throw NumericalError("qr: non-finite input");

  const Eigen::Index m = static_cast<Eigen::Index>(a.rows);
  const Eigen::Index n = static_cast<Eigen::Index>(a.cols);
  const Eigen::Index k = std::min(m, n);

  Eigen::HouseholderQR<EigenMat> fac(map_of(a));
  EigenMat q = fac.householderQ() * EigenMat::Identity(m, k);
  EigenMat r = fac.matrixQR().topRows(k).template triangularView<Eigen::Upper>();

  // Fix the gauge: rotate each column of Q so diag(R) is real nonnegative.
  for (Eigen::Index i = 0; i < k; ++i) {
    const Complex d = r(i, i);
    const double mag = std::abs(d);
    if (mag > 0.0) {
      const Complex phase = d / mag;
      r.row(i) *= std::conj(phase);
      q.col(i) *= phase;
    }
  }
  return QrResult{from_eigen(q), from_eigen(r)};
}

SvdResult svd_truncate(const ComplexMatrix& a, std::size_t max_rank,
                       double cutoff) {
  if (max_rank < 1) throw NumericalError("svd_truncate: max_rank must be >= 1");
  if (!all_finite(a)) throw NumericalError("svd_truncate: non-finite input");

  Eigen::JacobiSVD<EigenMat> fac(map_of(a),
                                 Eigen::ComputeThinU | Eigen::ComputeThinV);
  const auto& sv = fac.singularValues();
  const std::size_t full = static_cast<std::size_t>(sv.size());

  std::size_t keep = std::min(max_rank, full);
  const double s0 = full > 0 ? sv(0) : 0.0;
  while (keep > 1 && sv(static_cast<Eigen::Index>(keep) - 1) < cutoff * s0) {
    --keep;
  }

  double discarded = 0.0;
  for (std::size_t i = keep; i < full; ++i) discarded += sv(i) * sv(i);

  SvdResult out;
  out.s.assign(sv.data(), sv.data() + keep);
  out.discarded_weight = discarded;
  EigenMat u = fac.matrixU().leftCols(static_cast<Eigen::Index>(keep));
  EigenMat vh = fac.matrixV().leftCols(static_cast<Eigen::Index>(keep))
                    .adjoint();
  out.u = from_eigen(u);
  out.vh = from_eigen(vh);
  return out;
}

double max_abs_diff(const ComplexMatrix& a, const ComplexMatrix& b) {
  if (a.rows != b.rows || a.cols != b.cols) {
    throw NumericalError("max_abs_diff: shape mismatch " + shape_str(a) +
                         " vs " + shape_str(b));
  }
  double m = 0.0;
  for (std::size_t i = 0; i < a.entries.size(); ++i) {
    m = std::max(m, std::abs(a.entries[i] - b.entries[i]));
  }
  return m;
}

}  // namespace antn
