// Acceptance battery: ten end-to-end checks covering the solver's golden
// paths, replay traces, planted recovery at scale, factorization soundness,
// operator identities, enumeration agreement, infeasibility certificates,
// curvature properties of dependent directions, and the portfolio attack
// pipeline.  One PASS/FAIL line is printed per criterion; the exit code is
// the number of failures.
#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <functional>
#include <iomanip>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "mmqp/attack.hpp"
#include "mmqp/factor.hpp"
#include "mmqp/generate.hpp"
#include "mmqp/problem.hpp"
#include "mmqp/solver.hpp"
#include "mmqp/verify.hpp"

using namespace mmqp;

namespace {

std::string fixture(const std::string& name) {
  return std::string(MMQP_FIXTURE_DIR) + "/" + name;
}

double max_abs_diff(const Vector& a, const Vector& b) {
  if (a.size() != b.size()) return kInf;
  double worst = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i)
    worst = std::max(worst, std::abs(a[i] - b[i]));
  return worst;
}

double max_abs_diff(const Matrix& a, const Matrix& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) return kInf;
  double worst = 0.0;
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j)
      worst = std::max(worst, std::abs(a(i, j) - b(i, j)));
  return worst;
}

double norm_two_diff(const Vector& a, const Vector& b) {
  if (a.size() != b.size()) return kInf;
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i)
    s += (a[i] - b[i]) * (a[i] - b[i]);
  return std::sqrt(s);
}

// Random nonsingular saddle problem built directly from blocks (diagonally
// dominant positive / negative diagonal blocks, small coupling).
MinimaxQp random_saddle(std::uint64_t seed, std::size_t nx, std::size_t ny,
                        std::size_t m) {
  Rng rng(seed);
  auto dominant = [&](std::size_t n, double sign) {
    Matrix S(n, n);
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
  Matrix G11 = dominant(nx, 1.0);
  Matrix G22 = dominant(ny, -1.0);
  Matrix G12 = rng.uniform_matrix(nx, ny, -0.3, 0.3);
  Matrix A = rng.uniform_matrix(m, nx, -2.0, 2.0);
  Matrix B = rng.uniform_matrix(m, ny, -2.0, 2.0);
  Vector cx = rng.uniform_vector(nx, -1.0, 1.0);
  Vector cy = rng.uniform_vector(ny, -1.0, 1.0);
  Vector h = rng.uniform_vector(m, -1.0, 1.0);
  return MinimaxQp(nx, ny, G11, G12, G22, A, B, cx, cy, h);
}

MinimaxQp sliced_rows(const MinimaxQp& p, const std::vector<int>& rows) {
  Matrix A(rows.size(), p.nx), B(rows.size(), p.ny);
  Vector h(rows.size());
  for (std::size_t r = 0; r < rows.size(); ++r) {
    for (std::size_t j = 0; j < p.nx; ++j) A(r, j) = p.A(rows[r], j);
    for (std::size_t j = 0; j < p.ny; ++j) B(r, j) = p.B(rows[r], j);
    h[r] = p.h[rows[r]];
  }
  return MinimaxQp(p.nx, p.ny, p.G11, p.G12, p.G22, A, B, p.cx, p.cy, h);
}

std::vector<std::string> kinds(const SolveOutcome& out) {
  std::vector<std::string> v;
  for (const IterationRecord& r : out.trace) v.push_back(to_string(r.kind));
  return v;
}

std::vector<double> trace_f(const SolveOutcome& out) {
  std::vector<double> v;
  for (const IterationRecord& r : out.trace) v.push_back(r.f);
  return v;
}

// Accumulates the first failed condition of a criterion.
struct Check {
  bool ok = true;
  std::string why;
  void require(bool cond, const std::string& msg) {
    if (!cond && ok) {
      ok = false;
      why = msg;
    }
  }
};

std::string fmt(double v) {
  std::ostringstream ss;
  ss << std::setprecision(3) << v;
  return ss.str();
}

using Clock = std::chrono::steady_clock;

double ms_since(Clock::time_point t0) {
  return std::chrono::duration<double, std::milli>(Clock::now() - t0).count();
}

// ---------------------------------------------------------------------------

void criterion_1(Check& c, std::string& detail) {
  MinimaxQp p = MinimaxQp::load(fixture("example1.json"));
  SolveOptions opts;
  opts.record_trace = true;
  const auto t0 = Clock::now();
  SolveOutcome out = solve(p, opts);
  const double solve_ms = ms_since(t0);

  c.require(out.status == SolveStatus::Optimal, "status not optimal");
  c.require(out.iterations == 1 && out.adds == 1 && out.drops == 0,
            "not a single full step");
  c.require(kinds(out) == std::vector<std::string>{"full", "stop"},
            "step kinds differ");
  c.require(std::abs(out.f - 6.5) <= 1e-12, "objective off");
  c.require(max_abs_diff(out.z, {2, -1, 0, 3, 0, -2}) <= 1e-12, "z off");
  c.require(out.alpha == std::vector<int>{2}, "active set differs");
  c.require(out.u_full.size() == 5 && std::abs(out.u_full[2] + 2.0) <= 1e-12,
            "multiplier off");
  c.require(solve_ms < 10.0, "solve took " + fmt(solve_ms) + " ms");
  detail = "one full step, f = 13/2, " + fmt(solve_ms) + " ms";
}

void criterion_2(Check& c, std::string& detail) {
  MinimaxQp p = MinimaxQp::load(fixture("example1.json"));

  SolveOptions o1;
  o1.record_trace = true;
  o1.forced_sequence = {1, 2};
  SolveOutcome r1 = solve(p, o1);
  const std::vector<double> want1 = {97.0 / 2, 323.0 / 24, 694.0 / 75,
                                     13.0 / 2};
  std::vector<double> got1 = trace_f(r1);
  c.require(got1.size() == want1.size(), "replay 2,3: trace length differs");
  for (std::size_t i = 0; i < want1.size() && c.ok; ++i)
    c.require(std::abs(got1[i] - want1[i]) <= 1e-12,
              "replay 2,3: f[" + std::to_string(i) + "] off");
  c.require(kinds(r1) ==
                std::vector<std::string>{"full", "partial", "full", "stop"},
            "replay 2,3: step kinds differ");

  SolveOptions o3;
  o3.record_trace = true;
  o3.forced_sequence = {3, 4, 1, 2};
  SolveOutcome r3 = solve(p, o3);
  const std::vector<double> want3 = {97.0 / 2,  36,        100.0 / 3,
                                     100.0 / 3, 191.0 / 6, 323.0 / 24,
                                     694.0 / 75, 13.0 / 2};
  std::vector<double> got3 = trace_f(r3);
  c.require(got3.size() == want3.size(),
            "replay 4,5,2,3: trace length differs");
  for (std::size_t i = 0; i < want3.size() && c.ok; ++i)
    c.require(std::abs(got3[i] - want3[i]) <= 1e-12,
              "replay 4,5,2,3: f[" + std::to_string(i) + "] off");
  c.require(kinds(r3) == std::vector<std::string>{"full", "full", "dual_only",
                                                  "partial", "full", "partial",
                                                  "full", "stop"},
            "replay 4,5,2,3: step kinds differ");

  // The third step is dual-only: no primal movement, step length 4/3.
  const IterationRecord& du = r3.trace[2];
  double dnorm = 0.0;
  for (double v : du.d) dnorm = std::max(dnorm, std::abs(v));
  c.require(dnorm <= 1e-12, "dual-only step moved the point");
  c.require(std::abs(du.t - 4.0 / 3) <= 1e-12, "dual-only step length off");
  detail = "objective sequences match to 1e-12; dual-only step has d = 0, "
           "t = 4/3";
}

void criterion_3(Check& c, std::string& detail) {
  MinimaxQp p = MinimaxQp::load(fixture("example2.json"));
  SolveOptions opts;
  opts.record_trace = true;
  SolveOutcome out = solve(p, opts);
  c.require(out.status == SolveStatus::Optimal, "status not optimal");

  VerificationReport rep = verify_spair(p, out.z, out.alpha, out.u_full);
  c.require(rep.accept, "verifier rejected the solver output");

  std::vector<SPair> pairs = enumerate_spairs(p);
  c.require(pairs.size() == 1,
            "enumeration found " + std::to_string(pairs.size()) + " pairs");
  bool member = false;
  std::vector<int> sorted_alpha = out.alpha;
  std::sort(sorted_alpha.begin(), sorted_alpha.end());
  for (const SPair& sp : pairs)
    if (sp.alpha == sorted_alpha && max_abs_diff(sp.z, out.z) <= 1e-8)
      member = true;
  c.require(member, "solver output not among enumerated pairs");

  // A detour through forced pivots raises f inside an episode, yet the
  // objective at consecutive episode boundaries decreases strictly.
  SolveOptions od;
  od.record_trace = true;
  od.forced_sequence = {2, 0};
  SolveOutcome detour = solve(p, od);
  c.require(detour.status == SolveStatus::Optimal, "detour not optimal");
  std::vector<double> boundary;
  bool rose_within = false;
  for (std::size_t i = 0; i + 1 < detour.trace.size(); ++i) {
    if (i == 0 || detour.trace[i].p != detour.trace[i - 1].p)
      boundary.push_back(detour.trace[i].f);
    else if (detour.trace[i].f > detour.trace[i - 1].f + 1e-9)
      rose_within = true;
    if (detour.trace[i + 1].p == detour.trace[i].p &&
        detour.trace[i + 1].f > detour.trace[i].f + 1e-9)
      rose_within = true;
  }
  boundary.push_back(detour.trace.back().f);
  c.require(rose_within, "no within-episode objective rise observed");
  for (std::size_t i = 0; i + 1 < boundary.size(); ++i)
    c.require(boundary[i + 1] < boundary[i] - 1e-9,
              "episode-boundary objective not strictly decreasing");
  detail = "verified pair matches enumeration (" +
           std::to_string(pairs.size()) +
           " admissible pair found); boundary objectives strictly decrease "
           "despite a within-episode rise";
}

void criterion_4(Check& c, std::string& detail) {
  const auto t0 = Clock::now();
  double worst_z = 0.0, worst_u = 0.0, total_adds = 0.0;
  for (int rep = 0; rep < 20 && c.ok; ++rep) {
    GenerateSpec spec;
    spec.family = 2;
    spec.nx = 100;
    spec.ny = 200;
    spec.m = 300;
    spec.na = 100;
    spec.seed = 1000 + static_cast<std::uint64_t>(rep);
    MinimaxQp p = generate(spec);
    SolveOutcome out = solve(p);
    c.require(out.status == SolveStatus::Optimal,
              "rep " + std::to_string(rep) + " not optimal");
    if (!c.ok) break;
    worst_z = std::max(worst_z, norm_two_diff(out.z, p.planted->z_star));
    worst_u = std::max(worst_u, norm_two_diff(out.u_full, p.planted->u_star));
    total_adds += static_cast<double>(out.adds);
  }
  const double elapsed = ms_since(t0) / 1000.0;
  const double mean_adds = total_adds / 20.0;
  c.require(worst_z <= 1e-9, "max ||z - z*||_2 = " + fmt(worst_z));
  c.require(worst_u <= 1e-9, "max ||u - u*||_2 = " + fmt(worst_u));
  c.require(mean_adds >= 100.0 && mean_adds <= 140.0,
            "mean adds = " + fmt(mean_adds));
  c.require(elapsed < 60.0, "took " + fmt(elapsed) + " s");
  detail = "20 planted instances at (100,200,300,100): max errors " +
           fmt(worst_z) + " / " + fmt(worst_u) + ", mean adds " +
           fmt(mean_adds) + ", " + fmt(elapsed) + " s";
}

void criterion_5(Check& c, std::string& detail) {
  int sequences = 0, comparisons = 0;
  for (std::uint64_t seed = 0; seed < 260 && sequences < 200 && c.ok; ++seed) {
    const std::size_t nx = seed % 4;
    const std::size_t ny = 2 + seed % 7;  // n = nx + ny <= 11
    const std::size_t m = 6 + seed % 7;
    MinimaxQp p = random_saddle(5000 + seed, nx, ny, m);
    FactorState fs(p.n());
    Rng walk(seed ^ 0x5eedf00d);
    int mutations = 0;
    for (int step = 0; step < 40 && mutations < 20 && c.ok; ++step) {
      const bool try_add =
          fs.q() == 0 || (fs.q() < 6 && walk.next_double() < 0.6);
      if (try_add) {
        std::vector<int> cands;
        for (int i : p.addable())
          if (std::find(fs.alpha().begin(), fs.alpha().end(), i) ==
              fs.alpha().end())
            cands.push_back(i);
        if (cands.empty()) continue;
        int pick = cands[static_cast<std::size_t>(
            walk.next_below(static_cast<std::uint64_t>(cands.size())))];
        StepVectors sv = fs.step_vectors(p, pick);
        if (!(sv.delta < -1e-8)) continue;
        fs.add_constraint(pick, sv, 1e-10);
      } else {
        fs.drop_at(static_cast<std::size_t>(
            walk.next_below(static_cast<std::uint64_t>(fs.q()))));
      }
      ++mutations;
      FactorState ref = FactorState::from_scratch(p, fs.alpha());
      auto close = [&](const Matrix& got, const Matrix& want) {
        return max_abs_diff(got, want) <= 1e-9 * (1.0 + want.max_abs());
      };
      c.require(close(fs.R(), ref.R()), "R drifted from recompute");
      c.require(close(fs.Rinv(), ref.Rinv()), "R^-1 drifted from recompute");
      c.require(close(fs.M(), ref.M()), "M drifted from recompute");
      ++comparisons;
    }
    if (mutations > 0) ++sequences;
  }
  c.require(sequences >= 200, "only " + std::to_string(sequences) +
                                  " sequences exercised");
  detail = std::to_string(sequences) + " add/drop sequences, " +
           std::to_string(comparisons) +
           " incremental states matched the from-scratch factorization";
}

void criterion_6(Check& c, std::string& detail) {
  int instances = 0;
  for (std::uint64_t k = 0; k < 800 && instances < 100 && c.ok; ++k) {
    MinimaxQp p = random_saddle(6000 + k, 2 + k % 3, 3 + k % 3, 7 + k % 4);
    FactorState fs(p.n());
    for (int i : p.addable()) {
      StepVectors sv = fs.step_vectors(p, i);
      if (sv.delta < -1e-8) fs.add_constraint(i, sv, 1e-10);
      if (fs.q() == 2) break;
    }
    if (fs.q() != 2) continue;
    // one further extension is needed for the cross-state identity
    int extra = -1;
    for (int i : p.addable()) {
      if (std::find(fs.alpha().begin(), fs.alpha().end(), i) !=
          fs.alpha().end())
        continue;
      StepVectors sv = fs.step_vectors(p, i);
      if (sv.delta < -1e-8) {
        extra = i;
        break;
      }
    }
    if (extra < 0) continue;

    const std::size_t n = p.n(), q = fs.q();
    Matrix N(n, q);
    for (std::size_t a = 0; a < q; ++a) {
      Vector na = p.normal(fs.alpha()[a]);
      for (std::size_t i = 0; i < n; ++i) N(i, a) = na[i];
    }
    Matrix H = fs.explicit_h(p);
    Matrix NS = fs.explicit_nstar();

    Matrix NSN = matmul(NS, N);
    for (std::size_t i = 0; i < q; ++i)
      for (std::size_t j = 0; j < q; ++j)
        c.require(std::abs(NSN(i, j) - (i == j ? 1.0 : 0.0)) <= 1e-9,
                  "N* N != I");
    c.require(max_abs_diff(H, H.transposed()) <= 1e-9, "H not symmetric");
    c.require(matmul(H, N).max_abs() <= 1e-9, "H N != 0");
    c.require(max_abs_diff(matmul(matmul(H, p.G), H), H) <= 1e-9,
              "H G H != H");
    c.require(matmul(matmul(NS, p.G), H).max_abs() <= 1e-9, "N* G H != 0");

    StepVectors sv = fs.step_vectors(p, extra);
    fs.add_constraint(extra, sv, 1e-10);
    Matrix Hplus = fs.explicit_h(p);
    c.require(max_abs_diff(matmul(matmul(Hplus, p.G), H), Hplus) <= 1e-9,
              "H+ G H != H+");
    ++instances;
  }
  c.require(instances >= 100,
            "only " + std::to_string(instances) + " instances exercised");
  detail = "all six reduced-operator identities hold to 1e-9 on " +
           std::to_string(instances) + " instances";
}

void criterion_7(Check& c, std::string& detail) {
  int optimal_runs = 0, infeasible_runs = 0, partial_runs = 0;
  for (std::uint64_t seed = 9101; seed <= 9150 && c.ok; ++seed) {
    GenerateSpec spec;
    spec.family = (seed % 2 == 1) ? 1 : 2;
    spec.nx = 2;
    spec.ny = 4;
    spec.m = 7;
    spec.na = 2;
    spec.seed = seed;
    MinimaxQp p = generate(spec);
    std::vector<SPair> pairs = enumerate_spairs(p);
    SolveOutcome out = solve(p);

    if (out.status == SolveStatus::Optimal && out.warnings.empty()) {
      std::vector<int> sorted_alpha = out.alpha;
      std::sort(sorted_alpha.begin(), sorted_alpha.end());
      bool member = false;
      for (const SPair& sp : pairs)
        if (sp.alpha == sorted_alpha && max_abs_diff(sp.z, out.z) <= 1e-8)
          member = true;
      c.require(member, "seed " + std::to_string(seed) +
                            ": optimum missing from enumeration");
      ++optimal_runs;
    } else if (out.status == SolveStatus::Optimal) {
      // A violated row with non-negative ambient curvature can never be
      // bound; the solver stops with a flagged partial answer instead.
      c.require(spec.family == 1,
                "seed " + std::to_string(seed) +
                    ": semidefinite-coupling run flagged a partial answer");
      c.require(std::find(out.warnings.begin(), out.warnings.end(),
                          "violated_outside_K") != out.warnings.end(),
                "seed " + std::to_string(seed) + ": unexpected warning set");
      Vector s = p.slack(out.z);
      const std::vector<int> addable = p.addable();
      for (int i : out.alpha)
        c.require(std::abs(s[i]) <= 1e-7,
                  "seed " + std::to_string(seed) + ": bound row not tight");
      for (std::size_t j = 0; j < p.m; ++j) {
        if (s[j] <= 1e-7) continue;
        const int ji = static_cast<int>(j);
        c.require(std::find(addable.begin(), addable.end(), ji) ==
                      addable.end(),
                  "seed " + std::to_string(seed) +
                      ": violated row was actually addable");
      }
      ++partial_runs;
    } else {
      c.require(out.status == SolveStatus::Infeasible,
                "seed " + std::to_string(seed) + ": unexpected status");
      c.require(spec.family == 1,
                "seed " + std::to_string(seed) +
                    ": semidefinite-coupling instance reported infeasible");
      c.require(out.witness.has_value(),
                "seed " + std::to_string(seed) + ": no witness");
      if (!c.ok) break;
      std::vector<int> entered = out.witness->alpha;
      entered.push_back(out.witness->p);
      std::sort(entered.begin(), entered.end());
      for (const SPair& sp : pairs)
        c.require(sp.alpha != entered,
                  "seed " + std::to_string(seed) +
                      ": enumeration holds a pair on the rejected support");
      c.require(enumerate_spairs(sliced_rows(p, entered)).empty(),
                "seed " + std::to_string(seed) +
                    ": entered subproblem admits a pair");
      ++infeasible_runs;
    }
  }
  c.require(optimal_runs + infeasible_runs + partial_runs == 50,
            "instance count off");
  c.require(infeasible_runs > 0, "no infeasible subproblem encountered");
  detail = std::to_string(optimal_runs) + " optimal runs matched the "
           "enumeration; " + std::to_string(infeasible_runs) +
           " infeasible runs had no admissible pair on the entered support; " +
           std::to_string(partial_runs) +
           " flagged partial answers kept every violation outside the "
           "addable set";
}

void criterion_8(Check& c, std::string& detail) {
  MinimaxQp p = MinimaxQp::load(fixture("infeasible_wedge.json"));
  SolveOutcome out = solve(p);
  c.require(out.status == SolveStatus::Infeasible, "status not infeasible");
  c.require(out.witness.has_value(), "no certificate attached");
  if (!c.ok) return;
  const InfeasibilityWitness& w = *out.witness;
  for (double ri : w.r)
    c.require(ri >= -1e-12, "certificate has a negative dual direction");
  c.require(w.delta >= -1e-12, "certificate curvature is negative");
  std::vector<int> entered = w.alpha;
  entered.push_back(w.p);
  std::sort(entered.begin(), entered.end());
  c.require(enumerate_spairs(sliced_rows(p, entered)).empty(),
            "entered subproblem admits a pair");
  c.require(enumerate_spairs(p).empty(), "full problem admits a pair");
  detail = "stalled step (r >= 0, curvature >= 0) certified; enumeration "
           "confirms the entered subproblem has no admissible pair";
}

void criterion_9(Check& c, std::string& detail) {
  int zero_cases = 0, nonneg_cases = 0;
  double worst_zero = 0.0, worst_neg = 0.0;
  for (std::uint64_t seed = 0;
       seed < 300 && (zero_cases < 50 || nonneg_cases < 50) && c.ok; ++seed) {
    MinimaxQp p = random_saddle(4000 + seed, 2 + seed % 2, 3 + seed % 3,
                                6 + seed % 4);
    FactorState fs(p.n());
    for (int i : p.addable()) {
      StepVectors sv = fs.step_vectors(p, i);
      if (sv.delta < -1e-8) fs.add_constraint(i, sv, 1e-10);
      if (fs.q() == std::min<std::size_t>(3, p.ny)) break;
    }
    const std::size_t q = fs.q();
    if (q == 0) continue;
    Rng rng(7770 + seed);

    auto unit = [](Vector v) {
      double norm = 0.0;
      for (double x : v) norm += x * x;
      norm = std::sqrt(norm);
      if (norm > 0)
        for (double& x : v) x /= norm;
      return v;
    };

    if (zero_cases < 50) {
      // a direction inside the span of the active normals
      Vector beta = rng.uniform_vector(q, -2.0, 2.0);
      Vector nplus(p.n(), 0.0);
      for (std::size_t j = 0; j < q; ++j) {
        Vector nj = p.normal(fs.alpha()[j]);
        for (std::size_t i = 0; i < p.n(); ++i) nplus[i] += beta[j] * nj[i];
      }
      nplus = unit(nplus);
      StepVectors sv = fs.step_vectors_for(nplus, p.solve_with_g(nplus));
      worst_zero = std::max(worst_zero, std::abs(sv.delta));
      c.require(std::abs(sv.delta) <= 1e-10,
                "dependent normal has nonzero reduced curvature " +
                    fmt(sv.delta));
      ++zero_cases;
    }

    if (nonneg_cases < 50) {
      // same B-part combination, arbitrary A-part
      Vector beta = rng.uniform_vector(q, -2.0, 2.0);
      Vector nplus(p.n(), 0.0);
      for (std::size_t i = 0; i < p.nx; ++i) nplus[i] = rng.uniform(-2.0, 2.0);
      for (std::size_t j = 0; j < q; ++j)
        for (std::size_t i = 0; i < p.ny; ++i)
          nplus[p.nx + i] += beta[j] * p.B(fs.alpha()[j], i);
      nplus = unit(nplus);
      StepVectors sv = fs.step_vectors_for(nplus, p.solve_with_g(nplus));
      worst_neg = std::min(worst_neg, sv.delta);
      c.require(sv.delta >= -1e-10,
                "dependent B-rows direction has curvature " + fmt(sv.delta));
      ++nonneg_cases;
    }
  }
  c.require(zero_cases >= 50 && nonneg_cases >= 50,
            "constructions exhausted early");
  detail = "50 span-dependent directions: |curvature| <= " + fmt(worst_zero) +
           "; 50 shared-B directions: curvature >= " + fmt(worst_neg);
}

void criterion_10(Check& c, std::string& detail) {
  const auto t0 = Clock::now();
  MarketData md =
      load_market_csv(fixture("prices.csv"), fixture("volumes.csv"));
  c.require(md.assets() == 20 && md.days() == 60, "fixture shape off");

  AttackOptions opts;
  opts.b_values = {0, 2, 4, 6, 8, 10, 12};
  opts.trials = 200;
  std::vector<AttackRow> rows = run_attacks(md, opts);
  c.require(rows.size() == opts.b_values.size() * 3, "row count off");

  double min_margin = kInf;
  for (double b : opts.b_values) {
    double minimax = -1.0, random_base = -1.0, no_long = -1.0;
    for (const AttackRow& r : rows) {
      if (r.b != b) continue;
      c.require(r.rho >= 0.0, "negative damage ratio");
      if (r.method == "minimax") minimax = r.rho;
      if (r.method == "random") random_base = r.rho;
      if (r.method == "no-long") no_long = r.rho;
    }
    c.require(minimax >= 0 && random_base >= 0 && no_long >= 0,
              "missing method row at b = " + fmt(b));
    c.require(minimax >= random_base,
              "random baseline beats the solver at b = " + fmt(b));
    c.require(minimax >= no_long,
              "concentration baseline beats the solver at b = " + fmt(b));
    min_margin = std::min(min_margin,
                          minimax - std::max(random_base, no_long));

    AttackModel am = build_attack_model(md, b);
    const double m = am.m_mu;
    c.require(std::abs(am.H.norm_one() - 0.1 * m) <= 1e-12 * m,
              "inventory block norm off at b = " + fmt(b));
    c.require(std::abs(am.W.norm_one() - m) <= 1e-12 * m,
              "impact block norm off at b = " + fmt(b));
    c.require(std::abs(am.Sigma.norm_one() - 0.2 * m) <= 1e-12 * m,
              "covariance block norm off at b = " + fmt(b));
  }
  const double elapsed = ms_since(t0) / 1000.0;
  c.require(elapsed < 30.0, "took " + fmt(elapsed) + " s");
  detail = "damage ratios dominate both baselines on all 7 budgets "
           "(min margin " + fmt(min_margin) + "); block norms exact to "
           "1e-12; " + fmt(elapsed) + " s";
}

}  // namespace

int main() {
  struct Entry {
    const char* label;
    std::function<void(Check&, std::string&)> fn;
  };
  const std::vector<Entry> entries = {
      {"golden path (first fixture, most-violated rule)", criterion_1},
      {"pivot-order replays match the reference traces", criterion_2},
      {"second fixture: verified optimum, monotone episode boundaries",
       criterion_3},
      {"planted recovery at (100, 200, 300, 100)", criterion_4},
      {"incremental factorization tracks recomputation", criterion_5},
      {"reduced-operator identities", criterion_6},
      {"solver agrees with exhaustive enumeration", criterion_7},
      {"infeasibility certificate on the wedge fixture", criterion_8},
      {"dependent-direction curvature properties", criterion_9},
      {"portfolio attack dominates baselines", criterion_10},
  };

  int failures = 0;
  for (std::size_t i = 0; i < entries.size(); ++i) {
    Check c;
    std::string detail;
    try {
      entries[i].fn(c, detail);
    } catch (const std::exception& e) {
      c.ok = false;
      c.why = std::string("exception: ") + e.what();
    }
    std::cout << "criterion " << std::setw(2) << (i + 1) << ": "
              << (c.ok ? "PASS" : "FAIL") << "  " << entries[i].label;
    if (c.ok && !detail.empty()) std::cout << " — " << detail;
    if (!c.ok) std::cout << " — " << c.why;
    std::cout << "\n";
    if (!c.ok) ++failures;
  }
  if (failures == 0)
    std::cout << "all 10 criteria passed\n";
  else
    std::cout << failures << " criteria failed\n";
  return failures;
}
