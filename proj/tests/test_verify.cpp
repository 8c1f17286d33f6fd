// Independent verification and the brute-force enumeration oracle:
// acceptance of the fixture optima, targeted rejection reasons, agreement
// of the two Gamma tests, enumeration counts, and the linear-dependence
// curvature properties.

#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <cmath>

#include "mmqp/factor.hpp"
#include "mmqp/solver.hpp"
#include "mmqp/verify.hpp"

#include "test_support.hpp"

using namespace mmqp;

namespace {

bool has_reason(const VerificationReport& rep, const std::string& r) {
  return std::find(rep.reasons.begin(), rep.reasons.end(), r) !=
         rep.reasons.end();
}

// A problem whose first two constraint rows are identical (both copies of
// the base problem's third row).
MinimaxQp duplicated_rows_problem() {
  MinimaxQp base = mmqp_test::load_fixture("example1.json");
  Matrix A = base.A, B = base.B;
  Vector h = base.h;
  for (std::size_t j = 0; j < base.nx; ++j) A(0, j) = A(1, j) = base.A(2, j);
  for (std::size_t j = 0; j < base.ny; ++j) B(0, j) = B(1, j) = base.B(2, j);
  h[0] = h[1] = base.h[2];
  return MinimaxQp(base.nx, base.ny, base.G11, base.G12, base.G22, A, B,
                   base.cx, base.cy, h);
}

}  // namespace

TEST_CASE("fixture optimum is accepted with tiny residuals") {
  MinimaxQp p = mmqp_test::load_fixture("example1.json");
  const Vector z{2, -1, 0, 3, 0, -2};
  const Vector u{0, 0, -2, 0, 0};
  VerificationReport rep = verify_spair(p, z, {2}, u);
  REQUIRE(rep.accept);
  REQUIRE(rep.reasons.empty());
  REQUIRE(rep.kkt_residual < 1e-12);
  REQUIRE(rep.activity_residual < 1e-12);
  REQUIRE(rep.feasibility_max < 1e-12);
  REQUIRE(rep.sign_violation == 0.0);
  REQUIRE(rep.off_support_max == 0.0);
  REQUIRE(rep.complementarity_max < 1e-12);
  REQUIRE(rep.gamma_pd_gram);
  REQUIRE(rep.gamma_pd_direct);
  REQUIRE(rep.rows_independent);
  REQUIRE(rep.b_rows_independent);
  REQUIRE(rep.strict_complementarity);
}

TEST_CASE("rejection reasons are specific") {
  MinimaxQp p = mmqp_test::load_fixture("example1.json");
  const Vector zstar{2, -1, 0, 3, 0, -2};
  const Vector ustar{0, 0, -2, 0, 0};

  SECTION("unconstrained start is infeasible") {
    VerificationReport rep =
        verify_spair(p, Vector{0, -1, 12, 31, 24, 6}, {}, Vector(5, 0.0));
    REQUIRE(!rep.accept);
    REQUIRE(has_reason(rep, "feasibility"));
    REQUIRE(rep.feasibility_max == Catch::Approx(42.0).margin(1e-12));
  }
  SECTION("flipped multiplier sign") {
    VerificationReport rep =
        verify_spair(p, zstar, {2}, Vector{0, 0, 2, 0, 0});
    REQUIRE(!rep.accept);
    REQUIRE(has_reason(rep, "multiplier_sign"));
    REQUIRE(rep.sign_violation == Catch::Approx(2.0));
  }
  SECTION("multiplier off the declared support") {
    Vector u = ustar;
    u[0] = -1.0;
    VerificationReport rep = verify_spair(p, zstar, {2}, u);
    REQUIRE(!rep.accept);
    REQUIRE(has_reason(rep, "multiplier_off_support"));
  }
  SECTION("declared-active row not tight") {
    VerificationReport rep =
        verify_spair(p, zstar, {2, 3}, ustar);  // s_4 = -3 at z*
    REQUIRE(!rep.accept);
    REQUIRE(has_reason(rep, "active_rows_not_tight"));
    REQUIRE(rep.activity_residual == Catch::Approx(3.0).margin(1e-12));
  }
  SECTION("tight row missing from alpha") {
    VerificationReport rep = verify_spair(p, zstar, {}, Vector(5, 0.0));
    REQUIRE(!rep.accept);
    REQUIRE(has_reason(rep, "inactive_row_at_boundary"));
    REQUIRE(has_reason(rep, "stationarity"));
  }
  SECTION("perturbed point") {
    Vector z = zstar;
    for (double& v : z) v += 1e-3;
    VerificationReport rep = verify_spair(p, z, {2}, ustar);
    REQUIRE(!rep.accept);
    REQUIRE(has_reason(rep, "stationarity"));
  }
  SECTION("duplicated active rows") {
    MinimaxQp dup = duplicated_rows_problem();
    SolveOutcome out = solve(dup);  // ends with one copy active
    REQUIRE(out.status == SolveStatus::Optimal);
    Vector u = out.u_full;
    std::vector<int> alpha = out.alpha;
    alpha.push_back(out.alpha[0] == 0 ? 1 : 0);  // claim both copies active
    VerificationReport rep = verify_spair(dup, out.z, alpha, u);
    REQUIRE(!rep.accept);
    REQUIRE(!rep.rows_independent);
    REQUIRE(has_reason(rep, "dependent_active_rows"));
  }
  SECTION("argument validation") {
    REQUIRE_THROWS_AS(verify_spair(p, zstar, {9}, ustar), InvalidArgument);
    REQUIRE_THROWS_AS(verify_spair(p, zstar, {2, 2}, ustar), InvalidArgument);
    REQUIRE_THROWS_AS(verify_spair(p, Vector{1, 2}, {2}, ustar),
                      DimensionMismatch);
    REQUIRE_THROWS_AS(verify_spair(p, zstar, {2}, Vector{1, 2}),
                      DimensionMismatch);
  }
}

TEST_CASE("reduced x-block assembly") {
  MinimaxQp p = mmqp_test::load_fixture("example1.json");

  SECTION("empty active set matches the Schur complement") {
    Matrix gamma = gamma_matrix(p, {});
    LuFactor g22(p.G22);
    Matrix X = g22.solve_matrix(p.G12.transposed());  // G22^-1 G12^T
    Matrix want = matmul(p.G12, X);
    for (std::size_t i = 0; i < p.nx; ++i)
      for (std::size_t j = 0; j < p.nx; ++j)
        want(i, j) = p.G11(i, j) - want(i, j);
    REQUIRE(mmqp_test::max_abs_diff(gamma, want) < 1e-12);
    REQUIRE(is_positive_definite(gamma));
  }
  SECTION("optimal active set is positive definite both ways") {
    Matrix gamma = gamma_matrix(p, {2});
    REQUIRE(is_positive_definite(gamma));
    REQUIRE(gamma_pd_via_gram(p, {2}));
  }
  SECTION("dependent active B rows make the bordered system singular") {
    MinimaxQp dup = duplicated_rows_problem();
    REQUIRE_THROWS_AS(gamma_matrix(dup, {0, 1}), BorderedSingular);
  }
  SECTION("no minimizing variables: empty matrix, vacuously definite") {
    MinimaxQp p0 = mmqp_test::random_saddle(5150, 0, 3, 4);
    Matrix gamma = gamma_matrix(p0, {0, 1});
    REQUIRE(gamma.rows() == 0);
    REQUIRE(gamma_pd_via_gram(p0, {0, 1}));
  }
}

TEST_CASE("the two gamma tests agree on every testable subset") {
  for (const char* name : {"example1.json", "example2.json"}) {
    MinimaxQp p = mmqp_test::load_fixture(name);
    const std::size_t m = p.m;
    for (std::uint64_t mask = 0; mask < (std::uint64_t(1) << m); ++mask) {
      std::vector<int> alpha;
      for (std::size_t b = 0; b < m; ++b)
        if (mask & (std::uint64_t(1) << b)) alpha.push_back(static_cast<int>(b));
      if (alpha.size() > p.ny) continue;
      bool direct;
      try {
        direct = is_positive_definite(gamma_matrix(p, alpha));
      } catch (const BorderedSingular&) {
        continue;  // no direct answer to compare
      }
      INFO(name << " mask " << mask);
      REQUIRE(gamma_pd_via_gram(p, alpha) == direct);
    }
  }
}

TEST_CASE("enumeration finds exactly the fixture optima") {
  SECTION("first fixture: one S-pair") {
    MinimaxQp p = mmqp_test::load_fixture("example1.json");
    auto pairs = enumerate_spairs(p);
    REQUIRE(pairs.size() == 1);
    REQUIRE(pairs[0].alpha == std::vector<int>{2});
    REQUIRE(pairs[0].f == Catch::Approx(6.5).margin(1e-10));
    REQUIRE(mmqp_test::max_abs_diff(pairs[0].z, {2, -1, 0, 3, 0, -2}) < 1e-10);
    REQUIRE(mmqp_test::max_abs_diff(pairs[0].u, {0, 0, -2, 0, 0}) < 1e-10);
  }
  SECTION("second fixture: one S-pair despite two near-stationary basins") {
    MinimaxQp p = mmqp_test::load_fixture("example2.json");
    auto pairs = enumerate_spairs(p);
    REQUIRE(pairs.size() == 1);
    REQUIRE(pairs[0].alpha == std::vector<int>{0, 3});
    REQUIRE(pairs[0].f == Catch::Approx(-191.0 / 30).margin(1e-10));
    REQUIRE(mmqp_test::max_abs_diff(
                pairs[0].z,
                {-0.4, -3.4, -38.0 / 15, 1.0 / 3, -2.6, -29.0 / 15}) < 1e-10);
  }
  SECTION("slack problem: single unconstrained S-pair") {
    MinimaxQp base = mmqp_test::load_fixture("example1.json");
    MinimaxQp p(base.nx, base.ny, base.G11, base.G12, base.G22, base.A,
                base.B, base.cx, base.cy, Vector(base.m, -100.0));
    auto pairs = enumerate_spairs(p);
    REQUIRE(pairs.size() == 1);
    REQUIRE(pairs[0].alpha.empty());
    REQUIRE(pairs[0].f == Catch::Approx(48.5).margin(1e-10));
  }
  SECTION("infeasible wedge: none") {
    MinimaxQp p = mmqp_test::load_fixture("infeasible_wedge.json");
    REQUIRE(enumerate_spairs(p).empty());
  }
  SECTION("enumeration cap") {
    MinimaxQp p = mmqp_test::load_fixture("example1.json");
    EnumerateOptions opts;
    opts.max_m = 3;
    REQUIRE_THROWS_AS(enumerate_spairs(p, opts), InvalidArgument);
  }
}

TEST_CASE("solver outputs are members of the enumeration") {
  for (std::uint64_t seed = 1; seed <= 6; ++seed) {
    const int family = seed % 2 ? 1 : 2;
    MinimaxQp p = mmqp_test::random_problem(9100 + seed, family, 2, 4, 7, 2);
    auto pairs = enumerate_spairs(p);
    INFO("seed " << seed << " family " << family << " pairs " << pairs.size());
    REQUIRE(!pairs.empty());

    // every enumerated pair passes independent verification
    for (const SPair& sp : pairs) {
      VerificationReport rep = verify_spair(p, sp.z, sp.alpha, sp.u);
      INFO("alpha size " << sp.alpha.size());
      REQUIRE(rep.accept);
    }

    // the planted optimum appears in the list
    REQUIRE(p.planted.has_value());
    bool planted_found = false;
    for (const SPair& sp : pairs)
      if (mmqp_test::max_abs_diff(sp.z, p.planted->z_star) < 1e-7)
        planted_found = true;
    REQUIRE(planted_found);

    SolveOutcome out = solve(p);
    if (out.status == SolveStatus::Optimal) {
      // the answer appears in the list
      std::vector<int> sorted_alpha = out.alpha;
      std::sort(sorted_alpha.begin(), sorted_alpha.end());
      bool found = false;
      for (const SPair& sp : pairs)
        if (sp.alpha == sorted_alpha &&
            mmqp_test::max_abs_diff(sp.z, out.z) < 1e-7)
          found = true;
      REQUIRE(found);
    } else {
      // A dead-ended run must come from the wide family, carry a witness,
      // and its claim must check out: the subproblem made of the entered
      // rows alone admits no saddle, so no enumerated support fits inside
      // them.  (The narrow family keeps every reduced curvature
      // nonpositive, which rules this branch out.)
      REQUIRE(family == 1);
      REQUIRE(out.status == SolveStatus::Infeasible);
      REQUIRE(out.witness.has_value());
      std::vector<int> entered = out.witness->alpha;
      entered.push_back(out.witness->p);
      std::sort(entered.begin(), entered.end());
      for (const SPair& sp : pairs)
        REQUIRE(!std::includes(entered.begin(), entered.end(),
                               sp.alpha.begin(), sp.alpha.end()));

      // rebuild the entered-rows-only problem and enumerate it directly
      Matrix A(entered.size(), p.nx), B(entered.size(), p.ny);
      Vector h(entered.size());
      for (std::size_t r = 0; r < entered.size(); ++r) {
        for (std::size_t j = 0; j < p.nx; ++j) A(r, j) = p.A(entered[r], j);
        for (std::size_t j = 0; j < p.ny; ++j) B(r, j) = p.B(entered[r], j);
        h[r] = p.h[entered[r]];
      }
      MinimaxQp sub(p.nx, p.ny, p.G11, p.G12, p.G22, A, B, p.cx, p.cy, h);
      REQUIRE(enumerate_spairs(sub).empty());
    }
  }
}

TEST_CASE("dependent directions have the predicted curvature") {
  int zero_cases = 0, nonneg_cases = 0;
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    MinimaxQp p = mmqp_test::random_saddle(4000 + seed, 2 + seed % 2,
                                           3 + seed % 3, 6 + seed % 4);
    // grow a valid active set greedily
    FactorState fs(p.n());
    for (int i : p.addable()) {
      StepVectors sv = fs.step_vectors(p, i);
      if (sv.delta < -1e-8) fs.add_constraint(i, sv, 1e-10);
      if (fs.q() == std::min<std::size_t>(3, p.ny)) break;
    }
    const std::size_t q = fs.q();
    if (q == 0) continue;
    Rng rng(7770 + seed);

    // (a) a normal inside span(N_alpha) has exactly zero reduced curvature
    {
      Vector beta = rng.uniform_vector(q, -2.0, 2.0);
      Vector nplus(p.n(), 0.0);
      for (std::size_t j = 0; j < q; ++j) {
        Vector nj = p.normal(fs.alpha()[j]);
        for (std::size_t i = 0; i < p.n(); ++i) nplus[i] += beta[j] * nj[i];
      }
      StepVectors sv = fs.step_vectors_for(nplus, p.solve_with_g(nplus));
      REQUIRE(std::abs(sv.delta) < 1e-10 * (1.0 + dot(nplus, nplus)));
      ++zero_cases;
    }

    // (b) same B-part combination with an arbitrary A-part: curvature >= 0
    {
      Vector beta = rng.uniform_vector(q, -2.0, 2.0);
      Vector nplus(p.n(), 0.0);
      for (std::size_t i = 0; i < p.nx; ++i) nplus[i] = rng.uniform(-2.0, 2.0);
      for (std::size_t j = 0; j < q; ++j)
        for (std::size_t i = 0; i < p.ny; ++i)
          nplus[p.nx + i] += beta[j] * p.B(fs.alpha()[j], i);
      StepVectors sv = fs.step_vectors_for(nplus, p.solve_with_g(nplus));
      REQUIRE(sv.delta >= -1e-10 * (1.0 + dot(nplus, nplus)));
      ++nonneg_cases;
    }
  }
  REQUIRE(zero_cases >= 40);
  REQUIRE(nonneg_cases >= 40);
}
