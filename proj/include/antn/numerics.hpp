#pragma once

#include <cstddef>
#include <vector>

#include "antn/common.hpp"

namespace antn {

/// Dense complex matrix, row-major storage.
struct ComplexMatrix {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<Complex> entries;

  ComplexMatrix() = default;
  ComplexMatrix(std::size_t r, std::size_t c)
      : rows(r), cols(c), entries(r * c, Complex(0, 0)) {}

  Complex& operator()(std::size_t r, std::size_t c) {
    return entries[r * cols + c];
  }
  const Complex& operator()(std::size_t r, std::size_t c) const {
    return entries[r * cols + c];
  }

  static ComplexMatrix identity(std::size_t n);
};

/// Rank-3 tensor with dims (left bond, physical d=2, right bond).
struct Tensor3 {
  std::size_t chi_l = 0;
  std::size_t chi_r = 0;
  static constexpr std::size_t d = 2;
  std::vector<Complex> entries;  // index (l, x, r) row-major

  Tensor3() = default;
  Tensor3(std::size_t cl, std::size_t cr)
      : chi_l(cl), chi_r(cr), entries(cl * d * cr, Complex(0, 0)) {}

  Complex& operator()(std::size_t l, std::size_t x, std::size_t r) {
    return entries[(l * d + x) * chi_r + r];
  }
  const Complex& operator()(std::size_t l, std::size_t x, std::size_t r) const {
    return entries[(l * d + x) * chi_r + r];
  }

  /// Matrix slice for a fixed physical value: (chi_l x chi_r).
  ComplexMatrix slice(std::size_t x) const;
};

struct QrResult {
  ComplexMatrix q;  // columns orthonormal
  ComplexMatrix r;  // upper triangular, real nonnegative diagonal
};

struct SvdResult {
  ComplexMatrix u;
  std::vector<double> s;  // descending, nonnegative
  ComplexMatrix vh;
  double discarded_weight = 0.0;  // sum of squared dropped singular values
};

ComplexMatrix matmul(const ComplexMatrix& a, const ComplexMatrix& b);

/// Hermitian conjugate.
ComplexMatrix dagger(const ComplexMatrix& a);

/// Thin QR with deterministic sign convention (diag(R) real, >= 0).
QrResult qr(const ComplexMatrix& a);

/// Thin SVD truncated to rank <= max_rank, dropping singular values below
/// cutoff * s[0]. At least one singular value is always kept.
SvdResult svd_truncate(const ComplexMatrix& a, std::size_t max_rank,
                       double cutoff);

double max_abs_diff(const ComplexMatrix& a, const ComplexMatrix& b);

}  // namespace antn
