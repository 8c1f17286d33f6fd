#pragma once

// Shared helpers for the test suites: fixture paths, tolerance helpers,
// and small random-problem sources built on the planted generators.

#include <string>

#include "mmqp/generate.hpp"
#include "mmqp/problem.hpp"

namespace mmqp_test {

inline std::string fixture(const std::string& name) {
  return std::string(MMQP_FIXTURE_DIR) + "/" + name;
}

inline mmqp::MinimaxQp load_fixture(const std::string& name) {
  return mmqp::MinimaxQp::load(fixture(name));
}

inline double max_abs_diff(const mmqp::Vector& a, const mmqp::Vector& b) {
  REQUIRE(a.size() == b.size());
  double worst = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i)
    worst = std::max(worst, std::abs(a[i] - b[i]));
  return worst;
}

inline double max_abs_diff(const mmqp::Matrix& a, const mmqp::Matrix& b) {
  REQUIRE(a.rows() == b.rows());
  REQUIRE(a.cols() == b.cols());
  double worst = 0.0;
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j)
      worst = std::max(worst, std::abs(a(i, j) - b(i, j)));
  return worst;
}

// Small random valid problem: family-2 construction (semidefinite coupling)
// or family-1 (generic), planted solution included.
inline mmqp::MinimaxQp random_problem(std::uint64_t seed, int family,
                                      std::size_t nx, std::size_t ny,
                                      std::size_t m, std::size_t na) {
  mmqp::GenerateSpec spec;
  spec.family = family;
  spec.nx = nx;
  spec.ny = ny;
  spec.m = m;
  spec.na = na;
  spec.seed = seed;
  return mmqp::generate(spec);
}

// Random nonsingular saddle problem built directly from blocks, independent
// of the planted generators: G11 diagonally dominant positive, G22
// diagonally dominant negative, small coupling. The Schur complement
// G11 - G12 G22^-1 G12^T is then positive definite, so G is always
// invertible.
inline mmqp::MinimaxQp random_saddle(std::uint64_t seed, std::size_t nx,
                                     std::size_t ny, std::size_t m) {
  mmqp::Rng rng(seed);
  auto dominant = [&](std::size_t n, double sign) {
    mmqp::Matrix S(n, n);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = i + 1; j < n; ++j)
        S(i, j) = S(j, i) = rng.uniform(-1.0, 1.0);
    for (std::size_t i = 0; i < n; ++i) {
      double row = 0.0;
      for (std::size_t j = 0; j < n; ++j)
        if (j != i) row += std::abs(S(i, j));
      S(i, i) = sign * (row + rng.uniform(0.5, 1.5));
    }
    return S;
  };
  mmqp::Matrix G11 = dominant(nx, 1.0);
  mmqp::Matrix G22 = dominant(ny, -1.0);
  mmqp::Matrix G12 = rng.uniform_matrix(nx, ny, -0.3, 0.3);
  mmqp::Matrix A = rng.uniform_matrix(m, nx, -2.0, 2.0);
  mmqp::Matrix B = rng.uniform_matrix(m, ny, -2.0, 2.0);
  mmqp::Vector cx = rng.uniform_vector(nx, -1.0, 1.0);
  mmqp::Vector cy = rng.uniform_vector(ny, -1.0, 1.0);
  mmqp::Vector h = rng.uniform_vector(m, -1.0, 1.0);
  return mmqp::MinimaxQp(nx, ny, G11, G12, G22, A, B, cx, cy, h);
}

}  // namespace mmqp_test
