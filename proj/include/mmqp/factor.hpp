#pragma once

// Incremental factorization of the active-set operators.
//
// For the active normals N = [n_i]_{i in alpha} the solver needs, each
// iteration, the projected step d = H n+ and the dual direction r, where
//
//   N^* = (N^T G^-1 N)^-1 N^T G^-1          (generalized inverse)
//   H   = G^-1 (I - N N^*)                  (reduced inverse operator)
//
// Stored representation (all dense, row-major):
//
//   -N^T G^-1 N = R^T R   with R upper triangular (the Gram matrix is
//                         negative definite for every valid active set),
//   M = R^-T N^T G^-1     (q x n),
//   R^-1 kept explicitly  (q x q upper triangular).
//
// Then  H = G^-1 + M^T M  and  N^* = -R^-1 M,  so per iteration
//
//   d1 = M n+,  d2 = M^T d1 + G^-1 n+,  delta = n+^T d2,  r = R^-1 d1
//
// costs O(qn + q^2) given the cached solve G^-1 n+. Appending a constraint
// borders R, R^-1 and M with O(q) extra work beyond d1/d2/r:
//
//   R_+ = [ R   -d1          ]     R_+^-1 = [ R^-1   r / sq       ]
//         [ 0    sq          ]              [ 0      1 / sq       ]
//   M_+ = [ M ; d2^T / sq ],   sq = sqrt(-delta).
//
// Dropping the k-th active constraint permutes its column to the end,
// restores triangularity with adjacent-plane Givens rotations applied to
// (R columns | R^-1 rows-as-columns | M rows), and truncates - O((q-k)^2 +
// (q-k) n) work, no refactorization.

#include <algorithm>
#include <vector>

#include "mmqp/core.hpp"
#include "mmqp/linalg.hpp"
#include "mmqp/problem.hpp"

namespace mmqp {

struct StepVectors {
  Vector d1;     // M n+, length q
  Vector d2;     // H n+ = M^T d1 + G^-1 n+, length n
  double delta;  // n+^T d2 = n+^T H n+
  Vector r;      // R^-1 d1 = -N^* n+, length q
};

struct NonnegativeCurvature : Error {
  explicit NonnegativeCurvature(const std::string& what) : Error(what) {}
};

class FactorState {
 public:
  explicit FactorState(std::size_t ambient_dim)
      : n_(ambient_dim), R_(0, 0), Rinv_(0, 0), M_(0, ambient_dim) {}

  std::size_t q() const { return alpha_.size(); }
  std::size_t ambient_dim() const { return n_; }
  const std::vector<int>& alpha() const { return alpha_; }
  const Matrix& R() const { return R_; }
  const Matrix& Rinv() const { return Rinv_; }
  const Matrix& M() const { return M_; }

  // -------------------------------------------------------------------------
  // Direction computation for an arbitrary normal with its solve G^-1 n.
  StepVectors step_vectors_for(const Vector& normal, const Vector& ginv_normal,
                               OpCounter* ops = nullptr) const {
    if (normal.size() != n_ || ginv_normal.size() != n_)
      throw DimensionMismatch("step_vectors_for: bad normal length");
    StepVectors sv;
    sv.d1 = matvec(M_, normal, ops);
    sv.d2 = ginv_normal;
    if (q() > 0) {
      const Vector mt = matvec_t(M_, sv.d1, ops);
      for (std::size_t i = 0; i < n_; ++i) sv.d2[i] += mt[i];
    }
    sv.delta = dot(normal, sv.d2, ops);
    sv.r = upper_times(Rinv_, sv.d1, ops);
    return sv;
  }

  // Same, for a problem constraint from the addable set (cached solve).
  StepVectors step_vectors(const MinimaxQp& p, int plus_index,
                           OpCounter* ops = nullptr) const {
    return step_vectors_for(p.normal(plus_index), p.ginv_normal(plus_index),
                            ops);
  }

  // -------------------------------------------------------------------------
  // Append constraint `index` using its precomputed step vectors.
  // Requires delta < -tol (strictly negative curvature).
  void add_constraint(int index, const StepVectors& sv, double tol,
                      OpCounter* ops = nullptr) {
    if (!(sv.delta < -tol))
      throw NonnegativeCurvature(
          "add_constraint: delta = " + std::to_string(sv.delta) +
          " is not negative enough to extend the factorization");
    const std::size_t oldq = q();
    const double sq = std::sqrt(-sv.delta);
    count_sqrt(ops, 1);
    const double inv_sq = 1.0 / sq;
    count_div(ops, 1);

    Matrix R2(oldq + 1, oldq + 1);
    Matrix Rinv2(oldq + 1, oldq + 1);
    for (std::size_t i = 0; i < oldq; ++i)
      for (std::size_t j = 0; j < oldq; ++j) {
        R2(i, j) = R_(i, j);
        Rinv2(i, j) = Rinv_(i, j);
      }
    for (std::size_t i = 0; i < oldq; ++i) {
      R2(i, oldq) = -sv.d1[i];
      Rinv2(i, oldq) = sv.r[i] * inv_sq;
    }
    count_mul(ops, oldq);
    R2(oldq, oldq) = sq;
    Rinv2(oldq, oldq) = inv_sq;

    Matrix M2(oldq + 1, n_);
    for (std::size_t i = 0; i < oldq; ++i)
      for (std::size_t j = 0; j < n_; ++j) M2(i, j) = M_(i, j);
    for (std::size_t j = 0; j < n_; ++j) M2(oldq, j) = sv.d2[j] * inv_sq;
    count_mul(ops, n_);

    R_ = std::move(R2);
    Rinv_ = std::move(Rinv2);
    M_ = std::move(M2);
    alpha_.push_back(index);
  }

  // -------------------------------------------------------------------------
  // Remove the active constraint at position `pos` (0-based in alpha order).
  void drop_at(std::size_t pos, OpCounter* ops = nullptr) {
    const std::size_t oldq = q();
    if (pos >= oldq) throw InvalidArgument("drop_at: position out of range");
    const std::size_t newq = oldq - 1;

    if (pos < newq) {
      // Move column `pos` of R to the end; the displaced block becomes
      // upper Hessenberg.
      Matrix Rtil(oldq, oldq);
      for (std::size_t i = 0; i < oldq; ++i) {
        for (std::size_t j = 0; j < oldq; ++j) {
          const std::size_t src = (j < pos) ? j : (j + 1 < oldq ? j + 1 : pos);
          Rtil(i, j) = R_(i, src);
        }
      }
      // R^-1 transforms contragradiently: move *row* `pos` to the end,
      // then apply each rotation on the right (column pairs).
      Matrix RinvTil(oldq, oldq);
      for (std::size_t i = 0; i < oldq; ++i) {
        const std::size_t src = (i < pos) ? i : (i + 1 < oldq ? i + 1 : pos);
        for (std::size_t j = 0; j < oldq; ++j) RinvTil(i, j) = Rinv_(src, j);
      }

      for (std::size_t j = pos; j < newq; ++j) {
        GivensRotation g = GivensRotation::make(Rtil(j, j), Rtil(j + 1, j), ops);
        g.apply_rows(Rtil, j, j, ops);
        Rtil(j + 1, j) = 0.0;
        g.apply_rows(M_, j, 0, ops);
        g.apply_cols(RinvTil, j, ops);
      }

      R_ = shrink(Rtil, newq, newq);
      Rinv_ = shrink(RinvTil, newq, newq);
      M_ = shrink(M_, newq, n_);
    } else {
      R_ = shrink(R_, newq, newq);
      Rinv_ = shrink(Rinv_, newq, newq);
      M_ = shrink(M_, newq, n_);
    }
    alpha_.erase(alpha_.begin() + static_cast<std::ptrdiff_t>(pos));
  }

  // -------------------------------------------------------------------------
  // Reference construction straight from the definitions (used as the test
  // oracle for the incremental updates, and to seed a warm start). Throws
  // NotNegativeDefinite when the Gram matrix N^T G^-1 N is not negative
  // definite, i.e. when `alpha` is not a valid active set.
  static FactorState from_scratch(const MinimaxQp& p,
                                  const std::vector<int>& alpha,
                                  OpCounter* ops = nullptr) {
    const std::size_t q = alpha.size();
    const std::size_t n = p.n();
    FactorState fs(n);
    fs.alpha_ = alpha;
    if (q == 0) return fs;

    std::vector<Vector> ginv(q);
    for (std::size_t i = 0; i < q; ++i)
      ginv[i] = p.solve_with_g(p.normal(alpha[i]), ops);

    Matrix gram(q, q);
    for (std::size_t i = 0; i < q; ++i)
      for (std::size_t j = 0; j < q; ++j)
        gram(i, j) = dot(p.normal(alpha[i]), ginv[j], ops);

    const Matrix L = neg_def_cholesky(gram, ops);  // -gram = L L^T
    fs.R_ = L.transposed();
    fs.Rinv_ = invert_upper(fs.R_, ops);

    // M = R^-T (N^T G^-1): forward-solve each column against R^T.
    Matrix X(q, n);
    for (std::size_t i = 0; i < q; ++i)
      for (std::size_t j = 0; j < n; ++j) X(i, j) = ginv[i][j];
    fs.M_ = Matrix(q, n);
    const Matrix Rt = fs.R_.transposed();
    for (std::size_t j = 0; j < n; ++j) {
      Vector col = solve_lower(Rt, X.col(j), ops);
      for (std::size_t i = 0; i < q; ++i) fs.M_(i, j) = col[i];
    }
    return fs;
  }

  // -------------------------------------------------------------------------
  // Operator applications (tests, verification, diagnostics).

  // H v = G^-1 v + M^T (M v)
  Vector apply_h(const MinimaxQp& p, const Vector& v,
                 OpCounter* ops = nullptr) const {
    Vector out = p.solve_with_g(v, ops);
    if (q() > 0) {
      const Vector mv = matvec(M_, v, ops);
      const Vector mtmv = matvec_t(M_, mv, ops);
      for (std::size_t i = 0; i < n_; ++i) out[i] += mtmv[i];
    }
    return out;
  }

  // N^* v = -R^-1 (M v)
  Vector apply_nstar(const Vector& v, OpCounter* ops = nullptr) const {
    Vector mv = matvec(M_, v, ops);
    Vector rv = upper_times(Rinv_, mv, ops);
    for (double& x : rv) x = -x;
    return rv;
  }

  Matrix explicit_h(const MinimaxQp& p) const {
    Matrix H(n_, n_);
    for (std::size_t j = 0; j < n_; ++j) {
      Vector e(n_, 0.0);
      e[j] = 1.0;
      Vector col = apply_h(p, e);
      for (std::size_t i = 0; i < n_; ++i) H(i, j) = col[i];
    }
    return H;
  }

  Matrix explicit_nstar() const {
    Matrix NS(q(), n_);
    for (std::size_t j = 0; j < n_; ++j) {
      Vector e(n_, 0.0);
      e[j] = 1.0;
      Vector col = apply_nstar(e);
      for (std::size_t i = 0; i < q(); ++i) NS(i, j) = col[i];
    }
    return NS;
  }

 private:
  std::size_t n_;
  std::vector<int> alpha_;
  Matrix R_, Rinv_, M_;

  static Vector upper_times(const Matrix& U, const Vector& v, OpCounter* ops) {
    // U is upper triangular; exploit the zero pattern.
    const std::size_t q = U.rows();
    Vector out(q, 0.0);
    std::uint64_t muls = 0;
    for (std::size_t i = 0; i < q; ++i) {
      const double* r = U.row_ptr(i);
      double s = 0.0;
      for (std::size_t j = i; j < q; ++j) s += r[j] * v[j];
      out[i] = s;
      muls += q - i;
    }
    count_mul(ops, muls);
    return out;
  }

  static Matrix shrink(const Matrix& M, std::size_t rows, std::size_t cols) {
    Matrix out(rows, cols);
    for (std::size_t i = 0; i < rows; ++i)
      for (std::size_t j = 0; j < cols; ++j) out(i, j) = M(i, j);
    return out;
  }
};

}  // namespace mmqp
