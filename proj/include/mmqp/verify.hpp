#pragma once

// Independent verification of candidate solutions.
//
// verify_spair checks a candidate (z, alpha, u) directly against the
// optimality conditions: stationarity of the Lagrangian, feasibility,
// exact activity of alpha, multiplier signs, independence of the active
// rows, and positive definiteness of the reduced x-block
//
//   Gamma_alpha = G11 - [G12 A_a^T] [[G22, B_a^T], [B_a, 0]]^-1 [G12^T; A_a]
//
// which is tested twice, through the bordered assembly above and through
// the equivalent negative-definiteness of N_a^T G^-1 N_a; both must agree
// and pass. None of this reuses the solver's incremental machinery.
//
// enumerate_spairs is a brute-force oracle for small m: it tries every
// subset of the addable constraints as a candidate active set, solves the
// equality-constrained saddle system, and keeps the candidates that meet
// every condition above. It follows no path, so it cannot share a bug with
// the iteration; solver outputs are validated for membership in its list.

#include <algorithm>
#include <string>
#include <vector>

#include "mmqp/core.hpp"
#include "mmqp/linalg.hpp"
#include "mmqp/problem.hpp"

namespace mmqp {

struct BorderedSingular : Error {
  explicit BorderedSingular(const std::string& what) : Error(what) {}
};

// ---------------------------------------------------------------------------
// Reduced x-block via the bordered system. alpha is 0-based. For nx = 0 the
// result is the empty matrix (vacuously positive definite).
inline Matrix gamma_matrix(const MinimaxQp& p, const std::vector<int>& alpha) {
  const std::size_t q = alpha.size();
  const std::size_t nx = p.nx, ny = p.ny;
  if (nx == 0) return Matrix(0, 0);

  Matrix K(ny + q, ny + q);
  for (std::size_t i = 0; i < ny; ++i)
    for (std::size_t j = 0; j < ny; ++j) K(i, j) = p.G22(i, j);
  for (std::size_t a = 0; a < q; ++a)
    for (std::size_t j = 0; j < ny; ++j) {
      K(ny + a, j) = p.B(alpha[a], j);
      K(j, ny + a) = p.B(alpha[a], j);
    }

  Matrix rhs(ny + q, nx);  // [G12^T; A_alpha]
  for (std::size_t i = 0; i < ny; ++i)
    for (std::size_t j = 0; j < nx; ++j) rhs(i, j) = p.G12(j, i);
  for (std::size_t a = 0; a < q; ++a)
    for (std::size_t j = 0; j < nx; ++j) rhs(ny + a, j) = p.A(alpha[a], j);

  Matrix X;
  try {
    LuFactor lu(K);
    X = lu.solve_matrix(rhs);
  } catch (const SingularMatrix&) {
    throw BorderedSingular(
        "gamma_matrix: bordered system is singular (dependent active rows?)");
  }

  // Gamma = G11 - [G12 A_a^T] X
  Matrix coupling(nx, ny + q);
  for (std::size_t i = 0; i < nx; ++i) {
    for (std::size_t j = 0; j < ny; ++j) coupling(i, j) = p.G12(i, j);
    for (std::size_t a = 0; a < q; ++a) coupling(i, ny + a) = p.A(alpha[a], i);
  }
  Matrix prod = matmul(coupling, X);
  Matrix gamma(nx, nx);
  for (std::size_t i = 0; i < nx; ++i)
    for (std::size_t j = 0; j < nx; ++j) gamma(i, j) = p.G11(i, j) - prod(i, j);
  // symmetrize against roundoff
  for (std::size_t i = 0; i < nx; ++i)
    for (std::size_t j = i + 1; j < nx; ++j) {
      const double v = 0.5 * (gamma(i, j) + gamma(j, i));
      gamma(i, j) = v;
      gamma(j, i) = v;
    }
  return gamma;
}

// Gamma_alpha > 0 through the equivalent Gram-matrix route:
// N_a^T G^-1 N_a < 0.
inline bool gamma_pd_via_gram(const MinimaxQp& p, const std::vector<int>& alpha) {
  const std::size_t q = alpha.size();
  if (q == 0) {
    if (p.nx == 0) return true;
    return is_positive_definite(gamma_matrix(p, alpha));
  }
  Matrix gram(q, q);
  std::vector<Vector> ginv(q);
  for (std::size_t i = 0; i < q; ++i)
    ginv[i] = p.solve_with_g(p.normal(alpha[i]));
  for (std::size_t i = 0; i < q; ++i)
    for (std::size_t j = 0; j < q; ++j)
      gram(i, j) = dot(p.normal(alpha[i]), ginv[j]);
  for (std::size_t i = 0; i < q; ++i)
    for (std::size_t j = i + 1; j < q; ++j) {
      const double v = 0.5 * (gram(i, j) + gram(j, i));
      gram(i, j) = v;
      gram(j, i) = v;
    }
  return try_neg_def_cholesky(gram).has_value();
}

// ---------------------------------------------------------------------------

struct VerificationReport {
  bool accept = false;
  double kkt_residual = 0.0;        // ||G z + c + D^T lambda||_inf
  double feasibility_max = 0.0;     // max_j s_j(z)
  double activity_residual = 0.0;   // max_{i in alpha} |s_i(z)|
  double activity_margin = 0.0;     // min_{j not in alpha} -s_j(z)
  double complementarity_max = 0.0; // max_j |lambda_j s_j(z)|
  double sign_violation = 0.0;      // max(0, max_j lambda_j)
  double off_support_max = 0.0;     // max_{j not in alpha} |u_j|
  bool gamma_pd_gram = false;
  bool gamma_pd_direct = false;
  bool rows_independent = false;    // active rows of D
  bool b_rows_independent = false;  // active rows of B
  bool strict_complementarity = false;  // reported, not required
  std::vector<std::string> reasons;
};

namespace detail {

// Row rank check by modified Gram-Schmidt with a relative threshold.
inline bool rows_full_rank(const Matrix& rows, double rel_tol = 1e-10) {
  const std::size_t q = rows.rows(), n = rows.cols();
  if (q == 0) return true;
  if (q > n) return false;
  std::vector<Vector> basis;
  for (std::size_t i = 0; i < q; ++i) {
    Vector v = rows.row(i);
    const double scale = std::max(norm_two(v), 1.0);
    for (const Vector& b : basis) {
      const double proj = dot(v, b);
      for (std::size_t k = 0; k < n; ++k) v[k] -= proj * b[k];
    }
    const double nv = norm_two(v);
    if (nv <= rel_tol * scale) return false;
    for (double& x : v) x /= nv;
    basis.push_back(std::move(v));
  }
  return true;
}

}  // namespace detail

// u is the full-length multiplier vector (entries off alpha must vanish).
inline VerificationReport verify_spair(const MinimaxQp& p, const Vector& z,
                                       const std::vector<int>& alpha,
                                       const Vector& u,
                                       double tol = 1e-8) {
  VerificationReport rep;
  if (z.size() != p.n()) throw DimensionMismatch("verify_spair: bad z length");
  if (u.size() != p.m) throw DimensionMismatch("verify_spair: bad u length");
  std::vector<char> in_alpha(p.m, 0);
  for (int a : alpha) {
    if (a < 0 || a >= static_cast<int>(p.m))
      throw InvalidArgument("verify_spair: active index out of range");
    if (in_alpha[a]) throw InvalidArgument("verify_spair: duplicate active index");
    in_alpha[a] = 1;
  }

  const Vector s = p.slack(z);
  const double scale_h = 1.0 + norm_inf(p.h);
  const double scale_g = 1.0 + norm_inf(p.c) + p.G.norm_inf() * (1.0 + norm_inf(z));

  // stationarity
  Vector resid = p.gradient(z);
  for (std::size_t j = 0; j < p.m; ++j) {
    if (!in_alpha[j]) continue;
    const Vector nj = p.normal(j);
    for (std::size_t k = 0; k < p.n(); ++k) resid[k] += u[j] * nj[k];
  }
  rep.kkt_residual = norm_inf(resid);

  rep.feasibility_max = p.m ? *std::max_element(s.begin(), s.end()) : 0.0;
  rep.activity_residual = 0.0;
  rep.activity_margin = kInf;
  rep.complementarity_max = 0.0;
  rep.sign_violation = 0.0;
  rep.off_support_max = 0.0;
  for (std::size_t j = 0; j < p.m; ++j) {
    rep.complementarity_max = std::max(rep.complementarity_max,
                                       std::abs(u[j] * s[j]));
    rep.sign_violation = std::max(rep.sign_violation, u[j]);
    if (in_alpha[j])
      rep.activity_residual = std::max(rep.activity_residual, std::abs(s[j]));
    else {
      rep.activity_margin = std::min(rep.activity_margin, -s[j]);
      rep.off_support_max = std::max(rep.off_support_max, std::abs(u[j]));
    }
  }
  rep.sign_violation = std::max(0.0, rep.sign_violation);

  Matrix d_rows(alpha.size(), p.n());
  Matrix b_rows(alpha.size(), p.ny);
  for (std::size_t i = 0; i < alpha.size(); ++i) {
    for (std::size_t j = 0; j < p.n(); ++j) d_rows(i, j) = p.D(alpha[i], j);
    for (std::size_t j = 0; j < p.ny; ++j) b_rows(i, j) = p.B(alpha[i], j);
  }
  rep.rows_independent = detail::rows_full_rank(d_rows);
  rep.b_rows_independent = detail::rows_full_rank(b_rows);

  rep.gamma_pd_gram = gamma_pd_via_gram(p, alpha);
  try {
    rep.gamma_pd_direct =
        p.nx == 0 ? true : is_positive_definite(gamma_matrix(p, alpha));
  } catch (const BorderedSingular&) {
    rep.gamma_pd_direct = false;
  }

  // strict complementarity (diagnostic): every active multiplier strictly
  // negative, every inactive constraint strictly slack
  rep.strict_complementarity = true;
  for (std::size_t j = 0; j < p.m; ++j) {
    const bool on = in_alpha[j];
    if (on && !(u[j] < -tol)) rep.strict_complementarity = false;
    if (!on && !(s[j] < -tol)) rep.strict_complementarity = false;
  }

  auto fail = [&](const std::string& r) { rep.reasons.push_back(r); };
  if (rep.kkt_residual > tol * scale_g) fail("stationarity");
  if (rep.feasibility_max > tol * scale_h) fail("feasibility");
  if (rep.activity_residual > tol * scale_h) fail("active_rows_not_tight");
  // exact activity also requires every row outside alpha to be strictly slack
  if (!(rep.activity_margin > tol * scale_h)) fail("inactive_row_at_boundary");
  if (rep.sign_violation > tol) fail("multiplier_sign");
  if (rep.off_support_max > tol) fail("multiplier_off_support");
  if (rep.complementarity_max > tol * scale_h * (1.0 + norm_inf(u)))
    fail("complementarity");
  if (!rep.rows_independent) fail("dependent_active_rows");
  if (!rep.b_rows_independent) fail("dependent_active_b_rows");
  if (!rep.gamma_pd_gram) fail("gamma_not_pd_gram");
  if (!rep.gamma_pd_direct) fail("gamma_not_pd_direct");

  rep.accept = rep.reasons.empty();
  return rep;
}

// ---------------------------------------------------------------------------
// Brute-force S-pair oracle.

struct SPair {
  Vector z;
  std::vector<int> alpha;  // 0-based, ascending
  Vector u;                // full length m
  double f = 0.0;
};

struct EnumerateOptions {
  std::size_t max_m = 16;
  double tol = 1e-8;
};

inline std::vector<SPair> enumerate_spairs(const MinimaxQp& p,
                                           const EnumerateOptions& opts = {}) {
  if (p.m > opts.max_m)
    throw InvalidArgument("enumerate_spairs: m = " + std::to_string(p.m) +
                          " exceeds the enumeration cap of " +
                          std::to_string(opts.max_m));
  // Candidate active sets live inside the addable set: the Gram matrix of an
  // S-pair is negative definite, so every member has negative curvature.
  const std::vector<int>& K = p.addable();
  const std::size_t kk = K.size();
  const std::size_t n = p.n();
  std::vector<SPair> found;

  for (std::uint64_t mask = 0; mask < (std::uint64_t(1) << kk); ++mask) {
    std::vector<int> alpha;
    for (std::size_t b = 0; b < kk; ++b)
      if (mask & (std::uint64_t(1) << b)) alpha.push_back(K[b]);
    const std::size_t q = alpha.size();
    if (q > p.ny) continue;  // B_alpha cannot have full row rank

    // saddle system: [G N; N^T 0] (z, lambda) = (-c, -h_alpha)
    Matrix Ksys(n + q, n + q);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) Ksys(i, j) = p.G(i, j);
    for (std::size_t a = 0; a < q; ++a) {
      const Vector na = p.normal(alpha[a]);
      for (std::size_t i = 0; i < n; ++i) {
        Ksys(i, n + a) = na[i];
        Ksys(n + a, i) = na[i];
      }
    }
    Vector rhs(n + q);
    for (std::size_t i = 0; i < n; ++i) rhs[i] = -p.c[i];
    for (std::size_t a = 0; a < q; ++a) rhs[n + a] = -p.h[alpha[a]];

    Vector sol;
    try {
      LuFactor lu(Ksys);
      sol = lu.solve(rhs);
    } catch (const SingularMatrix&) {
      continue;  // dependent candidate rows
    }
    Vector z(sol.begin(), sol.begin() + static_cast<std::ptrdiff_t>(n));
    Vector u(p.m, 0.0);
    bool sign_ok = true;
    for (std::size_t a = 0; a < q; ++a) {
      u[alpha[a]] = sol[n + a];
      if (sol[n + a] > opts.tol) sign_ok = false;
    }
    if (!sign_ok) continue;

    const Vector s = p.slack(z);
    const double stol = opts.tol * (1.0 + norm_inf(p.h));
    bool ok = true;
    for (std::size_t j = 0; j < p.m && ok; ++j) {
      const bool on = std::binary_search(alpha.begin(), alpha.end(),
                                         static_cast<int>(j));
      if (on) {
        if (std::abs(s[j]) > stol) ok = false;      // must be tight
      } else {
        if (!(s[j] < -stol)) ok = false;            // must be strictly slack
      }
    }
    if (!ok) continue;

    if (!gamma_pd_via_gram(p, alpha)) continue;

    SPair sp;
    sp.z = std::move(z);
    sp.alpha = std::move(alpha);
    sp.u = std::move(u);
    sp.f = p.objective(sp.z);
    found.push_back(std::move(sp));
  }

  std::stable_sort(found.begin(), found.end(),
                   [](const SPair& a, const SPair& b) { return a.f < b.f; });
  return found;
}

}  // namespace mmqp
