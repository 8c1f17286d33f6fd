#pragma once

// Planted-instance generators.
//
// Both families plant a solution before the data is finished: draw the
// optimum z*, the active set alpha* = {1..na} with multipliers u* <= 0 and
// slacks (0 on alpha*, strictly negative off it), then back out
//
//   h = s - D z*,   c = -D^T u* - G z*
//
// so (z*, alpha*, u*) satisfies stationarity and activity by construction.
// The blocks are drawn so the curvature conditions hold:
//
//   G22: symmetric, off-diagonal uniform(-1,1), diagonal pushed below the
//        negative row sum  => strictly diagonally dominant, negative definite.
//   Gamma-target: same trick mirrored positive.
//
// Family 1 ("generic coupling"): D is uniform with unit-normalized rows and
// G11 = Gamma_target + [G12 A*^T] K*^-1 [G12^T; A*] with K* the bordered
// matrix of the planted active rows, which makes the reduced x-block at
// alpha* equal to Gamma_target exactly.
//
// Family 2 ("semidefinite coupling"): G11 = Gamma_target + G12 G22^-1 G12^T
// (so the reduced x-block at the empty set is Gamma_target), and every row
// of D is built inside the negative eigenspace of G: D = D_t Q_neg^T where
// Q_neg holds the eigenvectors with negative eigenvalue. Then
// D G^-1 D^T = D_t L_neg^-1 D_t^T is negative semidefinite by construction,
// the condition under which the iteration carries its global guarantees.
//
// Every matrix draws from its own named substream of the root seed, so a
// change in one block's draw count leaves the others untouched, and the
// same (family, dims, seed) reproduces bit-identical instances. A drawn
// candidate is accepted only after the independent verifier signs off on
// the planted triple; rejected draws advance the attempt counter, which
// reseeds every stream.

#include <string>
#include <vector>

#include "mmqp/core.hpp"
#include "mmqp/eigen.hpp"
#include "mmqp/linalg.hpp"
#include "mmqp/problem.hpp"
#include "mmqp/rng.hpp"
#include "mmqp/verify.hpp"

namespace mmqp {

struct GenerateSpec {
  int family = 2;  // 1 or 2
  std::size_t nx = 0, ny = 0, m = 0, na = 0;
  std::uint64_t seed = 0;
  int max_attempts = 100;
};

struct GenerationFailed : Error {
  explicit GenerationFailed(const std::string& what) : Error(what) {}
};

namespace detail {

// Symmetric with uniform(-1,1) off-diagonal (drawn for i<j in row-major
// order) and diagonal sign*(row_abs_sum + uniform(0,1) + 1): strictly
// diagonally dominant with the requested sign.
inline Matrix dominant_symmetric(Rng& rng, std::size_t n, double sign) {
  Matrix S(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) {
      const double v = rng.uniform(-1.0, 1.0);
      S(i, j) = v;
      S(j, i) = v;
    }
  for (std::size_t i = 0; i < n; ++i) {
    double row = 0.0;
    for (std::size_t j = 0; j < n; ++j)
      if (j != i) row += std::abs(S(i, j));
    S(i, i) = sign * (row + rng.uniform(0.0, 1.0) + 1.0);
  }
  return S;
}

inline void symmetrize(Matrix& S) {
  for (std::size_t i = 0; i < S.rows(); ++i)
    for (std::size_t j = i + 1; j < S.cols(); ++j) {
      const double v = 0.5 * (S(i, j) + S(j, i));
      S(i, j) = v;
      S(j, i) = v;
    }
}

}  // namespace detail

inline MinimaxQp generate(const GenerateSpec& spec) {
  if (spec.family != 1 && spec.family != 2)
    throw InvalidArgument("generate: family must be 1 or 2");
  if (spec.ny == 0) throw InvalidArgument("generate: ny must be positive");
  if (spec.na > spec.m) throw InvalidArgument("generate: na exceeds m");
  if (spec.na > spec.ny)
    throw InvalidArgument(
        "generate: na exceeds ny (active B-rows could not be independent)");

  std::string last_reason = "no attempt made";
  for (int attempt = 0; attempt < spec.max_attempts; ++attempt) {
    auto stream = [&](const char* label) {
      return Rng::substream(spec.seed, label, static_cast<std::uint64_t>(attempt));
    };

    Rng rg22 = stream("G22");
    Rng rg12 = stream("G12");
    Rng rgamma = stream("Gamma0");
    Rng rz = stream("zstar");
    Rng ru = stream("ustar");
    Rng rs = stream("slack");
    Rng rd = stream("D");

    const std::size_t nx = spec.nx, ny = spec.ny, m = spec.m, na = spec.na;
    const std::size_t n = nx + ny;

    Matrix G22 = detail::dominant_symmetric(rg22, ny, -1.0);
    Matrix G12 = rg12.uniform_matrix(nx, ny, -1.0, 1.0);
    Matrix gamma_target = detail::dominant_symmetric(rgamma, nx, +1.0);

    Vector z_star = rz.uniform_vector(n, -5.0, 5.0);
    Vector u_full(m, 0.0);
    std::vector<int> active;
    for (std::size_t i = 0; i < na; ++i) {
      active.push_back(static_cast<int>(i));
      u_full[i] = ru.uniform(-30.0, 0.0);
    }
    Vector s(m, 0.0);
    for (std::size_t i = na; i < m; ++i) s[i] = rs.uniform(-1.0, 0.0);

    Matrix D, G11;
    try {
      if (spec.family == 1) {
        D = rd.uniform_matrix(m, n, -1.0, 1.0);
        for (std::size_t i = 0; i < m; ++i) {
          Vector row = D.row(i);
          const double nr = norm_two(row);
          if (nr == 0.0) throw GenerationFailed("zero constraint row");
          for (std::size_t j = 0; j < n; ++j) D(i, j) /= nr;
        }
        // bordered matrix of the planted active rows
        Matrix K(ny + na, ny + na);
        for (std::size_t i = 0; i < ny; ++i)
          for (std::size_t j = 0; j < ny; ++j) K(i, j) = G22(i, j);
        for (std::size_t a = 0; a < na; ++a)
          for (std::size_t j = 0; j < ny; ++j) {
            K(ny + a, j) = D(a, nx + j);
            K(j, ny + a) = D(a, nx + j);
          }
        Matrix rhs(ny + na, nx);  // [G12^T; A*]
        for (std::size_t i = 0; i < ny; ++i)
          for (std::size_t j = 0; j < nx; ++j) rhs(i, j) = G12(j, i);
        for (std::size_t a = 0; a < na; ++a)
          for (std::size_t j = 0; j < nx; ++j) rhs(ny + a, j) = D(a, j);
        LuFactor lu(K);  // throws SingularMatrix if B* rows are dependent
        Matrix X = lu.solve_matrix(rhs);
        Matrix coupling(nx, ny + na);
        for (std::size_t i = 0; i < nx; ++i) {
          for (std::size_t j = 0; j < ny; ++j) coupling(i, j) = G12(i, j);
          for (std::size_t a = 0; a < na; ++a) coupling(i, ny + a) = D(a, i);
        }
        G11 = matmul(coupling, X);
        for (std::size_t i = 0; i < nx; ++i)
          for (std::size_t j = 0; j < nx; ++j) G11(i, j) += gamma_target(i, j);
        detail::symmetrize(G11);
      } else {
        // family 2: reduced x-block at the empty set is the target, and the
        // constraint rows live in the negative eigenspace of G
        LuFactor lu22(G22);
        Matrix X = lu22.solve_matrix(G12.transposed());  // G22^-1 G12^T
        G11 = matmul(G12, X);
        for (std::size_t i = 0; i < nx; ++i)
          for (std::size_t j = 0; j < nx; ++j) G11(i, j) += gamma_target(i, j);
        detail::symmetrize(G11);

        Matrix G(n, n);
        for (std::size_t i = 0; i < nx; ++i)
          for (std::size_t j = 0; j < nx; ++j) G(i, j) = G11(i, j);
        for (std::size_t i = 0; i < nx; ++i)
          for (std::size_t j = 0; j < ny; ++j) {
            G(i, nx + j) = G12(i, j);
            G(nx + j, i) = G12(i, j);
          }
        for (std::size_t i = 0; i < ny; ++i)
          for (std::size_t j = 0; j < ny; ++j) G(nx + i, nx + j) = G22(i, j);

        EigenDecomposition ed = symmetric_eigen(G);
        // inertia must be (ny negative, nx positive)
        if (ny > 0 && !(ed.values[ny - 1] < 0.0))
          throw GenerationFailed("unexpected inertia of G");
        if (nx > 0 && !(ed.values[ny] > 0.0))
          throw GenerationFailed("unexpected inertia of G");
        Matrix Dt = rd.uniform_matrix(m, ny, -1.0, 1.0);
        // D = Dt Qneg^T, Qneg = eigenvectors of the negative eigenvalues
        Matrix Qneg(n, ny);
        for (std::size_t i = 0; i < n; ++i)
          for (std::size_t j = 0; j < ny; ++j) Qneg(i, j) = ed.vectors(i, j);
        D = matmul(Dt, Qneg.transposed());
      }

      // back out the linear data from the planted optimum
      Vector h(m);
      const Vector Dz = matvec(D, z_star);
      for (std::size_t i = 0; i < m; ++i) h[i] = s[i] - Dz[i];

      Matrix A(m, nx), B(m, ny);
      for (std::size_t i = 0; i < m; ++i) {
        for (std::size_t j = 0; j < nx; ++j) A(i, j) = D(i, j);
        for (std::size_t j = 0; j < ny; ++j) B(i, j) = D(i, nx + j);
      }

      Matrix Gfull(n, n);
      for (std::size_t i = 0; i < nx; ++i)
        for (std::size_t j = 0; j < nx; ++j) Gfull(i, j) = G11(i, j);
      for (std::size_t i = 0; i < nx; ++i)
        for (std::size_t j = 0; j < ny; ++j) {
          Gfull(i, nx + j) = G12(i, j);
          Gfull(nx + j, i) = G12(i, j);
        }
      for (std::size_t i = 0; i < ny; ++i)
        for (std::size_t j = 0; j < ny; ++j) Gfull(nx + i, nx + j) = G22(i, j);

      Vector c = matvec(Gfull, z_star);
      const Vector Dtu = matvec_t(D, u_full);
      for (std::size_t i = 0; i < n; ++i) c[i] = -Dtu[i] - c[i];

      Vector cx(c.begin(), c.begin() + static_cast<std::ptrdiff_t>(nx));
      Vector cy(c.begin() + static_cast<std::ptrdiff_t>(nx), c.end());

      MinimaxQp problem(nx, ny, G11, G12, G22, A, B, cx, cy, h);
      PlantedSolution planted;
      planted.z_star = z_star;
      planted.u_star = u_full;
      planted.active_set = active;
      problem.planted = planted;

      VerificationReport rep = verify_spair(problem, z_star, active, u_full);
      if (!rep.accept) {
        last_reason = "planted solution rejected:";
        for (const auto& r : rep.reasons) last_reason += " " + r;
        continue;
      }
      return problem;
    } catch (const SingularMatrix& e) {
      last_reason = e.what();
    } catch (const GenerationFailed& e) {
      last_reason = e.what();
    } catch (const GSingular& e) {
      last_reason = e.what();
    }
  }
  throw GenerationFailed("generate: no acceptable draw in " +
                         std::to_string(spec.max_attempts) +
                         " attempts (last: " + last_reason + ")");
}

}  // namespace mmqp
