#pragma once

// Symmetric eigendecomposition by cyclic Jacobi with threshold sweeps.
// Deterministic: fixed sweep order, fixed rotation convention, eigenvalues
// sorted ascending with index-stable tie handling, each eigenvector's first
// significantly nonzero component made positive. Accuracy is high (Jacobi is
// backward stable and small relative error on well-separated spectra); cost
// is O(n^3) per sweep which is fine at the scales this library targets.

#include <algorithm>
#include <cmath>
#include <numeric>

#include "mmqp/core.hpp"

namespace mmqp {

struct EigenDecomposition {
  Vector values;  // ascending
  Matrix vectors; // columns, same order as values
};

inline EigenDecomposition symmetric_eigen(const Matrix& S,
                                          OpCounter* ops = nullptr,
                                          int max_sweeps = 64,
                                          double tol = 1e-14) {
  if (S.rows() != S.cols()) throw DimensionMismatch("symmetric_eigen: not square");
  const std::size_t n = S.rows();
  Matrix A = S;
  Matrix V = Matrix::identity(n);

  auto off_norm = [&]() {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = i + 1; j < n; ++j) s += A(i, j) * A(i, j);
    return std::sqrt(2.0 * s);
  };

  const double scale = std::max(1.0, A.norm_inf());
  for (int sweep = 0; sweep < max_sweeps; ++sweep) {
    if (off_norm() <= tol * scale) break;
    for (std::size_t p = 0; p + 1 < n; ++p) {
      for (std::size_t q = p + 1; q < n; ++q) {
        const double apq = A(p, q);
        if (std::abs(apq) <= 1e-300) continue;
        const double app = A(p, p);
        const double aqq = A(q, q);
        // rotation angle via the stable tangent formula
        const double theta = (aqq - app) / (2.0 * apq);
        count_div(ops, 1);
        const double t = (theta >= 0.0 ? 1.0 : -1.0) /
                         (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        count_mul(ops, 1);
        count_sqrt(ops, 1);
        count_div(ops, 1);
        const double c = 1.0 / std::sqrt(t * t + 1.0);
        const double s = t * c;
        count_mul(ops, 2);
        count_sqrt(ops, 1);
        count_div(ops, 1);

        // A <- J^T A J on rows/cols p, q
        for (std::size_t k = 0; k < n; ++k) {
          const double akp = A(k, p);
          const double akq = A(k, q);
          A(k, p) = c * akp - s * akq;
          A(k, q) = s * akp + c * akq;
        }
        for (std::size_t k = 0; k < n; ++k) {
          const double apk = A(p, k);
          const double aqk = A(q, k);
          A(p, k) = c * apk - s * aqk;
          A(q, k) = s * apk + c * aqk;
        }
        count_mul(ops, 8 * n);
        A(p, q) = 0.0;
        A(q, p) = 0.0;
        for (std::size_t k = 0; k < n; ++k) {
          const double vkp = V(k, p);
          const double vkq = V(k, q);
          V(k, p) = c * vkp - s * vkq;
          V(k, q) = s * vkp + c * vkq;
        }
        count_mul(ops, 4 * n);
      }
    }
  }

  // sort ascending, stable in the original index on ties
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return A(a, a) < A(b, b);
  });

  EigenDecomposition out;
  out.values.resize(n);
  out.vectors = Matrix(n, n);
  for (std::size_t j = 0; j < n; ++j) {
    const std::size_t src = order[j];
    out.values[j] = A(src, src);
    // sign convention: first component with magnitude above 1e-10 * colmax
    // is positive
    double colmax = 0.0;
    for (std::size_t i = 0; i < n; ++i)
      colmax = std::max(colmax, std::abs(V(i, src)));
    double flip = 1.0;
    for (std::size_t i = 0; i < n; ++i) {
      if (std::abs(V(i, src)) > 1e-10 * colmax) {
        flip = V(i, src) > 0.0 ? 1.0 : -1.0;
        break;
      }
    }
    for (std::size_t i = 0; i < n; ++i) out.vectors(i, j) = flip * V(i, src);
  }
  return out;
}

}  // namespace mmqp
