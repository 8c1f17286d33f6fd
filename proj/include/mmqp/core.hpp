#pragma once

// Dense row-major matrix/vector core used by every other header.
// All floating-point work that should show up in operation counts goes
// through the kernels in this file (or linalg.hpp), which take an optional
// OpCounter. Shapes are validated with exceptions, not UB.

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <initializer_list>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

namespace mmqp {

using Vector = std::vector<double>;

inline constexpr double kInf = std::numeric_limits<double>::infinity();

// ---------------------------------------------------------------------------
// Errors

// Base class for everything this library throws.
struct Error : std::runtime_error {
  explicit Error(const std::string& what) : std::runtime_error(what) {}
};

struct DimensionMismatch : Error {
  explicit DimensionMismatch(const std::string& what) : Error(what) {}
};

struct SingularMatrix : Error {
  explicit SingularMatrix(const std::string& what) : Error(what) {}
};

struct NotNegativeDefinite : Error {
  explicit NotNegativeDefinite(const std::string& what) : Error(what) {}
};

struct NotPositiveDefinite : Error {
  explicit NotPositiveDefinite(const std::string& what) : Error(what) {}
};

struct InvalidArgument : Error {
  explicit InvalidArgument(const std::string& what) : Error(what) {}
};

// ---------------------------------------------------------------------------
// Operation counter
//
// Thread-confined tally of floating multiplies, divides and square roots.
// Weighted total uses cost 1 for mul/div and 10 for sqrt. Additions are
// deliberately not tracked; every kernel below documents what it counts.

struct OpCounter {
  std::uint64_t mul = 0;
  std::uint64_t div = 0;
  std::uint64_t sqrt = 0;

  std::uint64_t weighted_total() const { return mul + div + 10 * sqrt; }

  OpCounter& operator+=(const OpCounter& o) {
    mul += o.mul;
    div += o.div;
    sqrt += o.sqrt;
    return *this;
  }
};

// Counting helpers: no-ops on a null counter so hot kernels stay branch-light.
inline void count_mul(OpCounter* c, std::uint64_t k) {
  if (c) c->mul += k;
}
inline void count_div(OpCounter* c, std::uint64_t k) {
  if (c) c->div += k;
}
inline void count_sqrt(OpCounter* c, std::uint64_t k) {
  if (c) c->sqrt += k;
}

// ---------------------------------------------------------------------------
// Matrix

class Matrix {
 public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols, double fill = 0.0)
      : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

  // Row-major construction from nested braces: Matrix{{1,2},{3,4}}.
  Matrix(std::initializer_list<std::initializer_list<double>> rows) {
    rows_ = rows.size();
    cols_ = rows_ == 0 ? 0 : rows.begin()->size();
    data_.reserve(rows_ * cols_);
    for (const auto& r : rows) {
      if (r.size() != cols_)
        throw DimensionMismatch("Matrix init: ragged rows");
      data_.insert(data_.end(), r.begin(), r.end());
    }
  }

  static Matrix identity(std::size_t n) {
    Matrix I(n, n);
    for (std::size_t i = 0; i < n; ++i) I(i, i) = 1.0;
    return I;
  }

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  bool empty() const { return rows_ == 0 || cols_ == 0; }

  double& operator()(std::size_t i, std::size_t j) {
    return data_[i * cols_ + j];
  }
  double operator()(std::size_t i, std::size_t j) const {
    return data_[i * cols_ + j];
  }

  double* row_ptr(std::size_t i) { return data_.data() + i * cols_; }
  const double* row_ptr(std::size_t i) const { return data_.data() + i * cols_; }

  std::vector<double>& data() { return data_; }
  const std::vector<double>& data() const { return data_; }

  Vector row(std::size_t i) const {
    return Vector(row_ptr(i), row_ptr(i) + cols_);
  }
  Vector col(std::size_t j) const {
    Vector v(rows_);
    for (std::size_t i = 0; i < rows_; ++i) v[i] = (*this)(i, j);
    return v;
  }

  Matrix transposed() const {
    Matrix T(cols_, rows_);
    for (std::size_t i = 0; i < rows_; ++i)
      for (std::size_t j = 0; j < cols_; ++j) T(j, i) = (*this)(i, j);
    return T;
  }

  bool is_symmetric(double tol = 0.0) const {
    if (rows_ != cols_) return false;
    for (std::size_t i = 0; i < rows_; ++i)
      for (std::size_t j = i + 1; j < cols_; ++j)
        if (std::abs((*this)(i, j) - (*this)(j, i)) > tol) return false;
    return true;
  }

  // max_i sum_j |a_ij|
  double norm_inf() const {
    double best = 0.0;
    for (std::size_t i = 0; i < rows_; ++i) {
      double s = 0.0;
      for (std::size_t j = 0; j < cols_; ++j) s += std::abs((*this)(i, j));
      if (s > best) best = s;
    }
    return best;
  }

  // max_j sum_i |a_ij| (induced 1-norm)
  double norm_one() const {
    double best = 0.0;
    for (std::size_t j = 0; j < cols_; ++j) {
      double s = 0.0;
      for (std::size_t i = 0; i < rows_; ++i) s += std::abs((*this)(i, j));
      if (s > best) best = s;
    }
    return best;
  }

  double max_abs() const {
    double best = 0.0;
    for (double v : data_) best = std::max(best, std::abs(v));
    return best;
  }

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

// ---------------------------------------------------------------------------
// Vector helpers (uncounted unless stated)

inline double norm_inf(const Vector& v) {
  double best = 0.0;
  for (double x : v) best = std::max(best, std::abs(x));
  return best;
}

inline double norm_one(const Vector& v) {
  double s = 0.0;
  for (double x : v) s += std::abs(x);
  return s;
}

inline double norm_two(const Vector& v) {
  double s = 0.0;
  for (double x : v) s += x * x;
  return std::sqrt(s);
}

inline Vector operator-(const Vector& v) {
  Vector r(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) r[i] = -v[i];
  return r;
}

inline Vector sub(const Vector& a, const Vector& b) {
  if (a.size() != b.size()) throw DimensionMismatch("sub: size mismatch");
  Vector r(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) r[i] = a[i] - b[i];
  return r;
}

inline Vector add(const Vector& a, const Vector& b) {
  if (a.size() != b.size()) throw DimensionMismatch("add: size mismatch");
  Vector r(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) r[i] = a[i] + b[i];
  return r;
}

// ---------------------------------------------------------------------------
// Counted kernels. Counts: dot = n mul, matvec = rows*cols mul, etc.

inline double dot(const Vector& a, const Vector& b, OpCounter* ops = nullptr) {
  if (a.size() != b.size()) throw DimensionMismatch("dot: size mismatch");
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  count_mul(ops, a.size());
  return s;
}

// y = M x
inline Vector matvec(const Matrix& M, const Vector& x, OpCounter* ops = nullptr) {
  if (M.cols() != x.size()) throw DimensionMismatch("matvec: size mismatch");
  Vector y(M.rows(), 0.0);
  for (std::size_t i = 0; i < M.rows(); ++i) {
    const double* r = M.row_ptr(i);
    double s = 0.0;
    for (std::size_t j = 0; j < M.cols(); ++j) s += r[j] * x[j];
    y[i] = s;
  }
  count_mul(ops, static_cast<std::uint64_t>(M.rows()) * M.cols());
  return y;
}

// y = M^T x
inline Vector matvec_t(const Matrix& M, const Vector& x, OpCounter* ops = nullptr) {
  if (M.rows() != x.size()) throw DimensionMismatch("matvec_t: size mismatch");
  Vector y(M.cols(), 0.0);
  for (std::size_t i = 0; i < M.rows(); ++i) {
    const double* r = M.row_ptr(i);
    const double xi = x[i];
    for (std::size_t j = 0; j < M.cols(); ++j) y[j] += r[j] * xi;
  }
  count_mul(ops, static_cast<std::uint64_t>(M.rows()) * M.cols());
  return y;
}

// y += a * x
inline void axpy(double a, const Vector& x, Vector& y, OpCounter* ops = nullptr) {
  if (x.size() != y.size()) throw DimensionMismatch("axpy: size mismatch");
  for (std::size_t i = 0; i < x.size(); ++i) y[i] += a * x[i];
  count_mul(ops, x.size());
}

inline void scale(double a, Vector& x, OpCounter* ops = nullptr) {
  for (double& v : x) v *= a;
  count_mul(ops, x.size());
}

// C = A * B
inline Matrix matmul(const Matrix& A, const Matrix& B, OpCounter* ops = nullptr) {
  if (A.cols() != B.rows()) throw DimensionMismatch("matmul: size mismatch");
  Matrix C(A.rows(), B.cols());
  for (std::size_t i = 0; i < A.rows(); ++i) {
    for (std::size_t k = 0; k < A.cols(); ++k) {
      const double a = A(i, k);
      if (a == 0.0) continue;
      const double* br = B.row_ptr(k);
      double* cr = C.row_ptr(i);
      for (std::size_t j = 0; j < B.cols(); ++j) cr[j] += a * br[j];
    }
  }
  count_mul(ops, static_cast<std::uint64_t>(A.rows()) * A.cols() * B.cols());
  return C;
}

}  // namespace mmqp
