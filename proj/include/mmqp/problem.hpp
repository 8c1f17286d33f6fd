#pragma once

// Problem container for the minimax quadratic program
//
//   min over x, max over y of  1/2 z^T G z + c^T z,   z = (x, y)
//   subject to  A x + B y + h <= 0   (m rows, written D z + h <= 0)
//
// with G = [[G11, G12], [G12^T, G22]], G22 negative definite and G
// nonsingular. n_x = 0 is admitted (pure concave maximization: G = G22,
// the x-block is absent). Construction validates shapes, symmetry, the
// definiteness of G22 and the nonsingularity of G, and precomputes:
//
//   - the LU factorization of G (shared by every solve),
//   - the addable-constraint set K = { i : n_i^T G^-1 n_i < 0 } with the
//     cached solves G^-1 n_i for i in K and the curvature tolerance.
//
// The object is immutable after construction and safe to share across
// threads. The setup operation tally is recorded so a solve can report
// costs inclusive of the precomputation it relies on.

#include <cstdio>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <unordered_map>
#include <vector>

#include <json.hpp>

#include "mmqp/core.hpp"
#include "mmqp/eigen.hpp"
#include "mmqp/linalg.hpp"

namespace mmqp {

struct ParseError : Error {
  explicit ParseError(const std::string& what) : Error(what) {}
};

struct G22NotNegativeDefinite : Error {
  explicit G22NotNegativeDefinite(const std::string& what) : Error(what) {}
};

struct GSingular : Error {
  explicit GSingular(const std::string& what) : Error(what) {}
};

// Optional reference solution carried by problem files (used by the
// verification tools and the planted-instance generators).
struct PlantedSolution {
  Vector z_star;
  Vector u_star;              // full length m
  std::vector<int> active_set;  // 0-based internally; files use 1-based
};

class MinimaxQp {
 public:
  std::size_t nx = 0, ny = 0, m = 0;
  Matrix G11, G12, G22, A, B;
  Vector cx, cy, h;

  // assembled forms
  Matrix G;  // n x n
  Matrix D;  // m x n
  Vector c;  // length n

  std::optional<PlantedSolution> planted;

  MinimaxQp(std::size_t nx_, std::size_t ny_, Matrix G11_, Matrix G12_,
            Matrix G22_, Matrix A_, Matrix B_, Vector cx_, Vector cy_,
            Vector h_)
      : nx(nx_),
        ny(ny_),
        m(h_.size()),
        G11(std::move(G11_)),
        G12(std::move(G12_)),
        G22(std::move(G22_)),
        A(std::move(A_)),
        B(std::move(B_)),
        cx(std::move(cx_)),
        cy(std::move(cy_)),
        h(std::move(h_)) {
    validate_shapes();
    assemble();
    factor_and_precompute();
  }

  std::size_t n() const { return nx + ny; }

  // constraint normal n_i = D_i^T
  Vector normal(std::size_t i) const { return D.row(i); }

  // s(z) = D z + h
  Vector slack(const Vector& z, OpCounter* ops = nullptr) const {
    Vector s = matvec(D, z, ops);
    for (std::size_t i = 0; i < m; ++i) s[i] += h[i];
    return s;
  }

  // f(z) = 1/2 z^T G z + c^T z, computed exactly as written
  double objective(const Vector& z, OpCounter* ops = nullptr) const {
    const Vector Gz = matvec(G, z, ops);
    return 0.5 * dot(z, Gz, ops) + dot(c, z, ops);
  }

  // gradient g(z) = G z + c
  Vector gradient(const Vector& z, OpCounter* ops = nullptr) const {
    Vector g = matvec(G, z, ops);
    for (std::size_t i = 0; i < n(); ++i) g[i] += c[i];
    return g;
  }

  const LuFactor& g_factor() const { return gfac_; }

  Vector solve_with_g(const Vector& rhs, OpCounter* ops = nullptr) const {
    return gfac_.solve(rhs, ops);
  }

  // Addable set K, its cached solves, and tolerances.
  const std::vector<int>& addable() const { return addable_; }
  bool in_addable(std::size_t i) const { return addable_mask_[i] != 0; }
  const Vector& curvature() const { return curvature_; }  // n_i^T G^-1 n_i, all i
  double curvature_tol() const { return curvature_tol_; }
  double feas_tol() const { return feas_tol_; }

  // G^-1 n_i, cached for i in K (throws for i outside K).
  const Vector& ginv_normal(std::size_t i) const {
    auto it = ginv_cache_.find(i);
    if (it == ginv_cache_.end())
      throw InvalidArgument("ginv_normal: constraint " + std::to_string(i + 1) +
                            " is not in the addable set");
    return it->second;
  }

  const OpCounter& setup_ops() const { return setup_ops_; }

  // -------------------------------------------------------------------------
  // Coupling-definiteness check: is D G^-1 D^T negative semidefinite?
  // Decided through the extreme eigenvalue of the symmetrized matrix; holds
  // iff max eigenvalue <= 1e-10 * scale. On failure the certificate is the
  // eigenvector of the offending eigenvalue.
  struct CouplingCheck {
    bool holds = false;
    double max_eigenvalue = 0.0;
    Vector certificate;  // length m; empty when the check holds
  };

  CouplingCheck check_coupling_semidefinite() const {
    CouplingCheck out;
    if (m == 0) {
      out.holds = true;
      return out;
    }
    // W = D G^-1 D^T, symmetrized against roundoff
    Matrix Ginv_Dt = gfac_.solve_matrix(D.transposed());
    Matrix W = matmul(D, Ginv_Dt);
    for (std::size_t i = 0; i < m; ++i)
      for (std::size_t j = i + 1; j < m; ++j) {
        const double v = 0.5 * (W(i, j) + W(j, i));
        W(i, j) = v;
        W(j, i) = v;
      }
    EigenDecomposition ed = symmetric_eigen(W);
    out.max_eigenvalue = ed.values.back();
    const double scale = std::max(1.0, W.norm_inf());
    out.holds = out.max_eigenvalue <= 1e-10 * scale;
    if (!out.holds) out.certificate = ed.vectors.col(m - 1);
    return out;
  }

  // -------------------------------------------------------------------------
  // JSON I/O. Schema (row-major matrices):
  // { "nx": int, "ny": int, "m": int,
  //   "G11": [...], "G12": [...], "G22": [...], "A": [...], "B": [...],
  //   "cx": [...], "cy": [...], "h": [...],
  //   optional "z_star": [...], "u_star": [...], "active_set": [1-based ints] }

  static MinimaxQp from_json(const nlohmann::json& j);
  static MinimaxQp load(const std::string& path);
  nlohmann::json to_json() const;
  void save(const std::string& path) const;

 private:
  LuFactor gfac_;
  std::vector<int> addable_;
  std::vector<char> addable_mask_;
  Vector curvature_;
  double curvature_tol_ = 0.0;
  double feas_tol_ = 0.0;
  std::unordered_map<std::size_t, Vector> ginv_cache_;
  OpCounter setup_ops_;

  void validate_shapes() const {
    if (ny == 0) throw DimensionMismatch("MinimaxQp: ny must be positive");
    auto want = [](const Matrix& M, std::size_t r, std::size_t c,
                   const char* name) {
      if (M.rows() != r || M.cols() != c)
        throw DimensionMismatch(std::string("MinimaxQp: bad shape for ") + name);
    };
    want(G11, nx, nx, "G11");
    want(G12, nx, ny, "G12");
    want(G22, ny, ny, "G22");
    want(A, m, nx, "A");
    want(B, m, ny, "B");
    if (cx.size() != nx) throw DimensionMismatch("MinimaxQp: bad length for cx");
    if (cy.size() != ny) throw DimensionMismatch("MinimaxQp: bad length for cy");

    const double sym_tol = 1e-12 * (1.0 + std::max(G11.max_abs(), G22.max_abs()));
    if (!G11.is_symmetric(sym_tol))
      throw InvalidArgument("MinimaxQp: G11 is not symmetric");
    if (!G22.is_symmetric(sym_tol))
      throw InvalidArgument("MinimaxQp: G22 is not symmetric");
    if (!try_neg_def_cholesky(G22))
      throw G22NotNegativeDefinite("MinimaxQp: G22 is not negative definite");
  }

  void assemble() {
    const std::size_t nn = n();
    G = Matrix(nn, nn);
    for (std::size_t i = 0; i < nx; ++i)
      for (std::size_t j = 0; j < nx; ++j) G(i, j) = G11(i, j);
    for (std::size_t i = 0; i < nx; ++i)
      for (std::size_t j = 0; j < ny; ++j) {
        G(i, nx + j) = G12(i, j);
        G(nx + j, i) = G12(i, j);
      }
    for (std::size_t i = 0; i < ny; ++i)
      for (std::size_t j = 0; j < ny; ++j) G(nx + i, nx + j) = G22(i, j);

    D = Matrix(m, nn);
    for (std::size_t i = 0; i < m; ++i) {
      for (std::size_t j = 0; j < nx; ++j) D(i, j) = A(i, j);
      for (std::size_t j = 0; j < ny; ++j) D(i, nx + j) = B(i, j);
    }

    c.resize(nn);
    for (std::size_t j = 0; j < nx; ++j) c[j] = cx[j];
    for (std::size_t j = 0; j < ny; ++j) c[nx + j] = cy[j];
  }

  void factor_and_precompute() {
    try {
      gfac_ = LuFactor(G, &setup_ops_);
    } catch (const SingularMatrix& e) {
      throw GSingular(std::string("MinimaxQp: ") + e.what());
    }
    feas_tol_ = 1e-9 * (1.0 + norm_inf(h));

    curvature_.resize(m);
    addable_mask_.assign(m, 0);
    std::vector<Vector> solves(m);
    double scale = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
      solves[i] = gfac_.solve(normal(i), &setup_ops_);
      curvature_[i] = dot(normal(i), solves[i], &setup_ops_);
      scale = std::max(scale, std::abs(curvature_[i]));
    }
    curvature_tol_ = 1e-12 * (1.0 + scale);
    for (std::size_t i = 0; i < m; ++i) {
      if (curvature_[i] < -curvature_tol_) {
        addable_.push_back(static_cast<int>(i));
        addable_mask_[i] = 1;
        ginv_cache_.emplace(i, std::move(solves[i]));
      }
    }
  }
};

// ---------------------------------------------------------------------------
// JSON plumbing

namespace detail {

inline Matrix matrix_from_flat(const nlohmann::json& arr, std::size_t rows,
                               std::size_t cols, const char* name) {
  if (!arr.is_array() || arr.size() != rows * cols)
    throw ParseError(std::string("problem JSON: field ") + name + " must be a " +
                     "flat row-major array of length " +
                     std::to_string(rows * cols));
  Matrix M(rows, cols);
  std::size_t k = 0;
  for (const auto& v : arr) {
    if (!v.is_number()) throw ParseError(std::string("problem JSON: ") + name +
                                         " contains a non-number");
    M.data()[k++] = v.get<double>();
  }
  return M;
}

inline Vector vector_from(const nlohmann::json& arr, std::size_t len,
                          const char* name) {
  if (!arr.is_array() || arr.size() != len)
    throw ParseError(std::string("problem JSON: field ") + name +
                     " must be an array of length " + std::to_string(len));
  Vector v;
  v.reserve(len);
  for (const auto& x : arr) {
    if (!x.is_number()) throw ParseError(std::string("problem JSON: ") + name +
                                         " contains a non-number");
    v.push_back(x.get<double>());
  }
  return v;
}

inline nlohmann::json flat(const Matrix& M) {
  return nlohmann::json(M.data());
}

}  // namespace detail

inline MinimaxQp MinimaxQp::from_json(const nlohmann::json& j) {
  for (const char* key : {"nx", "ny", "m"})
    if (!j.contains(key) || !j[key].is_number_integer() || j[key].get<int>() < 0)
      throw ParseError(std::string("problem JSON: missing or bad field ") + key);
  const auto nx = j["nx"].get<std::size_t>();
  const auto ny = j["ny"].get<std::size_t>();
  const auto m = j["m"].get<std::size_t>();
  for (const char* key : {"G11", "G12", "G22", "A", "B", "cx", "cy", "h"})
    if (!j.contains(key))
      throw ParseError(std::string("problem JSON: missing field ") + key);

  MinimaxQp p(nx, ny, detail::matrix_from_flat(j["G11"], nx, nx, "G11"),
              detail::matrix_from_flat(j["G12"], nx, ny, "G12"),
              detail::matrix_from_flat(j["G22"], ny, ny, "G22"),
              detail::matrix_from_flat(j["A"], m, nx, "A"),
              detail::matrix_from_flat(j["B"], m, ny, "B"),
              detail::vector_from(j["cx"], nx, "cx"),
              detail::vector_from(j["cy"], ny, "cy"),
              detail::vector_from(j["h"], m, "h"));

  if (j.contains("z_star") || j.contains("u_star") || j.contains("active_set")) {
    PlantedSolution ps;
    if (j.contains("z_star"))
      ps.z_star = detail::vector_from(j["z_star"], nx + ny, "z_star");
    if (j.contains("u_star"))
      ps.u_star = detail::vector_from(j["u_star"], m, "u_star");
    if (j.contains("active_set")) {
      for (const auto& v : j["active_set"]) {
        if (!v.is_number_integer())
          throw ParseError("problem JSON: active_set must hold integers");
        const int idx = v.get<int>();
        if (idx < 1 || idx > static_cast<int>(m))
          throw ParseError("problem JSON: active_set index out of range: " +
                           std::to_string(idx));
        ps.active_set.push_back(idx - 1);
      }
    }
    p.planted = std::move(ps);
  }
  return p;
}

inline MinimaxQp MinimaxQp::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open problem file: " + path);
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw ParseError("problem JSON parse failure in " + path + ": " + e.what());
  }
  return from_json(j);
}

inline nlohmann::json MinimaxQp::to_json() const {
  nlohmann::json j;
  j["nx"] = nx;
  j["ny"] = ny;
  j["m"] = m;
  j["G11"] = detail::flat(G11);
  j["G12"] = detail::flat(G12);
  j["G22"] = detail::flat(G22);
  j["A"] = detail::flat(A);
  j["B"] = detail::flat(B);
  j["cx"] = nlohmann::json(cx);
  j["cy"] = nlohmann::json(cy);
  j["h"] = nlohmann::json(h);
  if (planted) {
    if (!planted->z_star.empty()) j["z_star"] = nlohmann::json(planted->z_star);
    if (!planted->u_star.empty()) j["u_star"] = nlohmann::json(planted->u_star);
    std::vector<int> one_based;
    for (int i : planted->active_set) one_based.push_back(i + 1);
    j["active_set"] = nlohmann::json(one_based);
  }
  return j;
}

inline void MinimaxQp::save(const std::string& path) const {
  std::ofstream out(path);
  if (!out) throw Error("cannot write problem file: " + path);
  out << to_json().dump(2) << "\n";
}

}  // namespace mmqp
