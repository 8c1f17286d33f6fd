#pragma once

// Factorizations and triangular kernels.
//
//  - LuFactor: partial-pivoting LU for the (symmetric, indefinite,
//    nonsingular) system matrix; back-substitution is counted.
//  - neg_def_cholesky: S = -L L^T for negative definite S, i.e. the
//    Cholesky factor of -S, with a relative pivot guard.
//  - upper/lower triangular solves and explicit inversion of a small
//    upper-triangular factor.
//  - Givens reduction of an upper-Hessenberg matrix, rotating companion
//    matrices with the same sequence (used by the active-set downdate).

#include <cmath>
#include <optional>

#include "mmqp/core.hpp"

namespace mmqp {

// ---------------------------------------------------------------------------
// Partial-pivoting LU. Counts: factor ~ 2/3 n^3 mul + n^2/2 div; each solve
// n^2 mul + n div.

class LuFactor {
 public:
  LuFactor() = default;

  // Throws SingularMatrix if any pivot magnitude drops below
  // 1e-14 * ||A||_inf.
  explicit LuFactor(const Matrix& A, OpCounter* ops = nullptr) : lu_(A) {
    if (A.rows() != A.cols()) throw DimensionMismatch("LuFactor: not square");
    n_ = A.rows();
    piv_.resize(n_);
    for (std::size_t i = 0; i < n_; ++i) piv_[i] = i;
    const double pivot_tol = 1e-14 * A.norm_inf();

    for (std::size_t k = 0; k < n_; ++k) {
      // pivot search in column k
      std::size_t p = k;
      double best = std::abs(lu_(k, k));
      for (std::size_t i = k + 1; i < n_; ++i) {
        const double v = std::abs(lu_(i, k));
        if (v > best) {
          best = v;
          p = i;
        }
      }
      if (best <= pivot_tol)
        throw SingularMatrix("LuFactor: pivot " + std::to_string(best) +
                             " below tolerance at column " + std::to_string(k));
      if (p != k) {
        for (std::size_t j = 0; j < n_; ++j) std::swap(lu_(k, j), lu_(p, j));
        std::swap(piv_[k], piv_[p]);
      }
      const double inv_piv = 1.0 / lu_(k, k);
      count_div(ops, 1);
      for (std::size_t i = k + 1; i < n_; ++i) {
        const double m = lu_(i, k) * inv_piv;
        count_mul(ops, 1);
        lu_(i, k) = m;
        if (m != 0.0) {
          const double* rk = lu_.row_ptr(k);
          double* ri = lu_.row_ptr(i);
          for (std::size_t j = k + 1; j < n_; ++j) ri[j] -= m * rk[j];
          count_mul(ops, n_ - k - 1);
        }
      }
    }
  }

  std::size_t size() const { return n_; }

  // Solve A x = b.
  Vector solve(const Vector& b, OpCounter* ops = nullptr) const {
    if (b.size() != n_) throw DimensionMismatch("LuFactor::solve: size");
    Vector x(n_);
    for (std::size_t i = 0; i < n_; ++i) x[i] = b[piv_[i]];
    // forward: L y = P b (unit diagonal)
    for (std::size_t i = 1; i < n_; ++i) {
      const double* ri = lu_.row_ptr(i);
      double s = x[i];
      for (std::size_t j = 0; j < i; ++j) s -= ri[j] * x[j];
      x[i] = s;
    }
    // backward: U x = y
    for (std::size_t ii = n_; ii-- > 0;) {
      const double* ri = lu_.row_ptr(ii);
      double s = x[ii];
      for (std::size_t j = ii + 1; j < n_; ++j) s -= ri[j] * x[j];
      x[ii] = s / ri[ii];
    }
    count_mul(ops, n_ * n_ > n_ ? static_cast<std::uint64_t>(n_) * n_ - n_ : 0);
    count_div(ops, n_);
    return x;
  }

  // Solve A X = B column-by-column.
  Matrix solve_matrix(const Matrix& B, OpCounter* ops = nullptr) const {
    if (B.rows() != n_) throw DimensionMismatch("LuFactor::solve_matrix: size");
    Matrix X(n_, B.cols());
    for (std::size_t j = 0; j < B.cols(); ++j) {
      Vector col = B.col(j);
      Vector x = solve(col, ops);
      for (std::size_t i = 0; i < n_; ++i) X(i, j) = x[i];
    }
    return X;
  }

 private:
  std::size_t n_ = 0;
  Matrix lu_;
  std::vector<std::size_t> piv_;
};

// ---------------------------------------------------------------------------
// Negative-definite Cholesky: given symmetric S with S < 0, produce lower
// triangular L with S = -L L^T (i.e. plain Cholesky of -S). The non-throwing
// variant returns nullopt when a pivot of -S falls at or below
// 1e-12 * (1 + ||S||_inf), which doubles as the definiteness test.
// Counts: ~ n^3/3 mul, n div, n sqrt.

inline std::optional<Matrix> try_neg_def_cholesky(const Matrix& S,
                                                  OpCounter* ops = nullptr) {
  if (S.rows() != S.cols())
    throw DimensionMismatch("neg_def_cholesky: not square");
  const std::size_t n = S.rows();
  const double pivot_tol = 1e-12 * (1.0 + S.norm_inf());
  Matrix L(n, n);
  for (std::size_t j = 0; j < n; ++j) {
    double d = -S(j, j);
    for (std::size_t k = 0; k < n; ++k) {  // only k<j entries are nonzero
      if (k >= j) break;
      d -= L(j, k) * L(j, k);
    }
    count_mul(ops, j);
    if (d <= pivot_tol) return std::nullopt;
    const double ljj = std::sqrt(d);
    count_sqrt(ops, 1);
    L(j, j) = ljj;
    const double inv = 1.0 / ljj;
    count_div(ops, 1);
    for (std::size_t i = j + 1; i < n; ++i) {
      double s = -S(i, j);
      const double* li = L.row_ptr(i);
      const double* lj = L.row_ptr(j);
      for (std::size_t k = 0; k < j; ++k) s -= li[k] * lj[k];
      count_mul(ops, j + 1);
      L(i, j) = s * inv;
    }
  }
  return L;
}

inline Matrix neg_def_cholesky(const Matrix& S, OpCounter* ops = nullptr) {
  auto L = try_neg_def_cholesky(S, ops);
  if (!L)
    throw NotNegativeDefinite("neg_def_cholesky: matrix is not negative definite");
  return *L;
}

// Convenience: positive definiteness test via the negative-definite kernel.
inline bool is_positive_definite(const Matrix& S, OpCounter* ops = nullptr) {
  Matrix neg(S.rows(), S.cols());
  for (std::size_t i = 0; i < S.rows(); ++i)
    for (std::size_t j = 0; j < S.cols(); ++j) neg(i, j) = -S(i, j);
  return try_neg_def_cholesky(neg, ops).has_value();
}

// ---------------------------------------------------------------------------
// Triangular kernels.

// Solve U x = b for upper-triangular U. Counts n(n-1)/2 mul + n div.
inline Vector solve_upper(const Matrix& U, const Vector& b,
                          OpCounter* ops = nullptr) {
  const std::size_t n = U.rows();
  if (U.cols() != n || b.size() != n)
    throw DimensionMismatch("solve_upper: size");
  Vector x(b);
  for (std::size_t ii = n; ii-- > 0;) {
    const double* r = U.row_ptr(ii);
    double s = x[ii];
    for (std::size_t j = ii + 1; j < n; ++j) s -= r[j] * x[j];
    x[ii] = s / r[ii];
  }
  count_mul(ops, n * (n - (n > 0 ? 1 : 0)) / 2);
  count_div(ops, n);
  return x;
}

// Solve L x = b for lower-triangular L.
inline Vector solve_lower(const Matrix& L, const Vector& b,
                          OpCounter* ops = nullptr) {
  const std::size_t n = L.rows();
  if (L.cols() != n || b.size() != n)
    throw DimensionMismatch("solve_lower: size");
  Vector x(b);
  for (std::size_t i = 0; i < n; ++i) {
    const double* r = L.row_ptr(i);
    double s = x[i];
    for (std::size_t j = 0; j < i; ++j) s -= r[j] * x[j];
    x[i] = s / r[i];
  }
  count_mul(ops, n * (n - (n > 0 ? 1 : 0)) / 2);
  count_div(ops, n);
  return x;
}

// Explicit inverse of an upper-triangular matrix (used for the stored R^-1).
// Counts ~ n^3/6 mul + n div.
inline Matrix invert_upper(const Matrix& U, OpCounter* ops = nullptr) {
  const std::size_t n = U.rows();
  if (U.cols() != n) throw DimensionMismatch("invert_upper: not square");
  Matrix X(n, n);
  for (std::size_t j = 0; j < n; ++j) {
    // solve U x = e_j; x has support on rows 0..j
    X(j, j) = 1.0 / U(j, j);
    count_div(ops, 1);
    for (std::size_t ii = j; ii-- > 0;) {
      const double* r = U.row_ptr(ii);
      double s = 0.0;
      for (std::size_t k = ii + 1; k <= j; ++k) s -= r[k] * X(k, j);
      count_mul(ops, j - ii);
      X(ii, j) = s / r[ii];
      count_div(ops, 1);
    }
  }
  return X;
}

// ---------------------------------------------------------------------------
// Givens rotations.

// Plane rotation with c*a + s*b = r >= 0 and -s*a + c*b = 0.
struct GivensRotation {
  double c = 1.0;
  double s = 0.0;
  double r = 0.0;

  static GivensRotation make(double a, double b, OpCounter* ops = nullptr) {
    GivensRotation g;
    if (b == 0.0 && a >= 0.0) {
      g.c = 1.0;
      g.s = 0.0;
      g.r = a;
      return g;
    }
    const double h = std::hypot(a, b);
    count_mul(ops, 2);
    count_sqrt(ops, 1);
    count_div(ops, 2);
    g.c = a / h;
    g.s = b / h;
    g.r = h;
    return g;
  }

  // Combine rows i and i+1 of M over columns [j0, M.cols()).
  void apply_rows(Matrix& M, std::size_t i, std::size_t j0,
                  OpCounter* ops = nullptr) const {
    double* a = M.row_ptr(i);
    double* b = M.row_ptr(i + 1);
    for (std::size_t j = j0; j < M.cols(); ++j) {
      const double x = a[j], y = b[j];
      a[j] = c * x + s * y;
      b[j] = -s * x + c * y;
    }
    count_mul(ops, 4 * (M.cols() - j0));
  }

  // Combine columns j and j+1 of M: right-multiplication by the transposed
  // rotation (col_j' = c col_j + s col_{j+1}, col_{j+1}' = -s col_j + c col_{j+1}).
  void apply_cols(Matrix& M, std::size_t j, OpCounter* ops = nullptr) const {
    for (std::size_t i = 0; i < M.rows(); ++i) {
      double* r0 = M.row_ptr(i);
      const double x = r0[j], y = r0[j + 1];
      r0[j] = c * x + s * y;
      r0[j + 1] = -s * x + c * y;
    }
    count_mul(ops, 4 * M.rows());
  }
};

// Reduce an upper-Hessenberg H (one nonzero subdiagonal) to upper-triangular
// form with nonnegative diagonal by a forward sweep of adjacent-row Givens
// rotations; every rotation is also applied to the rows of each companion
// (same orthogonal factor Qbar^T on the left). Returns the rotation sequence.
inline std::vector<GivensRotation> givens_reduce_hessenberg(
    Matrix& H, std::vector<Matrix*> companions, OpCounter* ops = nullptr) {
  std::vector<GivensRotation> seq;
  const std::size_t steps =
      std::min(H.cols(), H.rows() > 0 ? H.rows() - 1 : 0);
  for (std::size_t j = 0; j < steps; ++j) {
    GivensRotation g = GivensRotation::make(H(j, j), H(j + 1, j), ops);
    g.apply_rows(H, j, j, ops);
    H(j + 1, j) = 0.0;  // exact zero by construction
    for (Matrix* M : companions) g.apply_rows(*M, j, 0, ops);
    seq.push_back(g);
  }
  return seq;
}

}  // namespace mmqp
