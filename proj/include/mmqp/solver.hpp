#pragma once

// Dual active-set iteration for the minimax quadratic program.
//
// State: a point z whose gradient is spanned by the active normals, the
// active set alpha with multipliers u <= 0, and the factorization of the
// active-set operators (factor.hpp). One outer iteration ("episode") picks
// a violated constraint p from the addable set K and works it in:
//
//   d  = H n_p                (primal direction; zero iff n_p is dependent)
//   r  = R^-1 M n_p = -N* n_p (dual direction on the active multipliers)
//   t1 = min over { u+_j / r_j : r_j < -tol }   (dual blocking length)
//   t2 = -s_p(z) / (n_p^T d)  when the curvature n_p^T d is negative
//   t  = min(t1, t2)
//
//   t = inf          -> problem certified infeasible (witness: alpha, p, r, delta)
//   t = t2 <= t1     -> full step: move, append p, episode done
//   t = t1 < t2      -> partial step: move, drop blocking constraint, retry
//   t = t1, t2 = inf -> dual-only step: multipliers move along (r, 1); the
//                       point moves by t d as well, which is a no-op in the
//                       usual d = 0 case but keeps (z, u) consistent when a
//                       dependent normal still has a nonzero primal direction.
//
// Objective bookkeeping along a step of length t:
//   f <- f + t * (n_p^T d) * (t/2 - u+_p),  s_p <- s_p + t * (n_p^T d)
// both exact consequences of z moving along d = H n_p.
//
// The iteration only ever activates constraints from
// K = { i : n_i^T G^-1 n_i < 0 }; a violated constraint outside K at
// termination is surfaced through the `violated_outside_K` warning flag.

#include <algorithm>
#include <optional>
#include <string>
#include <vector>

#include "mmqp/core.hpp"
#include "mmqp/factor.hpp"
#include "mmqp/problem.hpp"

namespace mmqp {

enum class SolveStatus { Optimal, Infeasible, IterationLimit };

enum class StepKind { Full, Partial, DualOnly, Stop, Infeasible };

inline const char* to_string(StepKind k) {
  switch (k) {
    case StepKind::Full: return "full";
    case StepKind::Partial: return "partial";
    case StepKind::DualOnly: return "dual_only";
    case StepKind::Stop: return "stop";
    case StepKind::Infeasible: return "infeasible";
  }
  return "?";
}

inline const char* to_string(SolveStatus s) {
  switch (s) {
    case SolveStatus::Optimal: return "optimal";
    case SolveStatus::Infeasible: return "infeasible";
    case SolveStatus::IterationLimit: return "iteration_limit";
  }
  return "?";
}

enum class SelectionRule { MostViolated, FirstViolated };

struct SolveOptions {
  SelectionRule rule = SelectionRule::MostViolated;
  // Entering constraints to force, 0-based, consumed one per episode; falls
  // back to `rule` when exhausted. A forced index that is not violated (or
  // not addable) at its episode raises InvalidArgument.
  std::vector<int> forced_sequence;
  bool record_trace = false;
  std::size_t max_iterations = 0;  // 0 -> 50 * (m + 1)
};

// Snapshot of the state at the start of one iteration plus the decisions
// taken in it. Vectors are recorded only when trace recording is on.
struct IterationRecord {
  int iter = 0;  // 1-based
  StepKind kind = StepKind::Stop;
  int p = -1;    // entering constraint (0-based; -1 if none)
  int k = -1;    // dropped constraint (0-based; -1 if none)
  double t1 = kInf, t2 = kInf, t = kInf;
  double f = 0.0;
  Vector z, s, u;  // u is full length m, pending multiplier for p included
  std::vector<int> alpha;
  Vector d, r;
};

struct InfeasibilityWitness {
  std::vector<int> alpha;  // active set at detection
  int p = -1;              // violated constraint with no admissible step
  Vector r;                // dual direction, all >= -tol
  double delta = 0.0;      // curvature n_p^T H n_p >= -tol
};

struct SolveOutcome {
  SolveStatus status = SolveStatus::Optimal;
  Vector z;
  double f = 0.0;
  std::vector<int> alpha;  // insertion order, 0-based
  Vector u;                // multipliers in alpha order
  Vector u_full;           // scattered to length m
  std::size_t iterations = 0;
  std::size_t adds = 0;
  std::size_t drops = 0;
  OpCounter ops;
  std::optional<InfeasibilityWitness> witness;
  std::vector<IterationRecord> trace;
  std::vector<std::string> warnings;
};

namespace detail {

inline Vector scatter_multipliers(std::size_t m, const std::vector<int>& alpha,
                                  const Vector& uplus, int pending_p) {
  Vector full(m, 0.0);
  for (std::size_t j = 0; j < alpha.size(); ++j) full[alpha[j]] = uplus[j];
  if (pending_p >= 0) full[pending_p] = uplus.back();
  return full;
}

}  // namespace detail

class Solver {
 public:
  explicit Solver(const MinimaxQp& p) : p_(p) {}

  SolveOutcome solve(const SolveOptions& opts = {}) {
    const std::size_t n = p_.n();
    const std::size_t m = p_.m;
    const double tol_r = 1e-12;
    const double tol_curv = p_.curvature_tol();
    const double tol_feas = p_.feas_tol();
    const std::size_t max_iter =
        opts.max_iterations ? opts.max_iterations : 50 * (m + 1);

    SolveOutcome out;
    out.ops = p_.setup_ops();  // K precomputation the solve relies on

    // Unconstrained stationary point and its objective value.
    Vector z = p_.solve_with_g(-p_.c, &out.ops);
    double f = 0.5 * dot(p_.c, z, &out.ops);

    FactorState fs(n);
    Vector u;  // multipliers in alpha order
    std::size_t forced_pos = 0;
    std::size_t iter = 0;

    auto finish = [&](SolveStatus st) {
      out.status = st;
      out.z = z;
      out.f = f;
      out.alpha = fs.alpha();
      out.u = u;
      out.u_full = detail::scatter_multipliers(m, fs.alpha(), u, -1);
      out.iterations = iter;
      return out;
    };

    while (true) {
      // ---- violation scan over the addable set
      Vector s = p_.slack(z, &out.ops);
      std::vector<char> active(m, 0);
      for (int a : fs.alpha()) active[a] = 1;

      int p_idx = -1;
      if (forced_pos < opts.forced_sequence.size()) {
        const int cand = opts.forced_sequence[forced_pos++];
        if (cand < 0 || cand >= static_cast<int>(m))
          throw InvalidArgument("forced sequence index out of range: " +
                                std::to_string(cand + 1));
        if (!p_.in_addable(cand) || active[cand] || !(s[cand] > tol_feas))
          throw InvalidArgument(
              "forced constraint " + std::to_string(cand + 1) +
              " is not a violated addable constraint at its episode");
        p_idx = cand;
      } else {
        for (int j : p_.addable()) {
          if (active[j] || !(s[j] > tol_feas)) continue;
          if (p_idx < 0) {
            p_idx = j;
            if (opts.rule == SelectionRule::FirstViolated) break;
          } else if (s[j] > s[p_idx]) {
            p_idx = j;  // most violated; ties keep the lower index
          }
        }
      }

      if (p_idx < 0) {
        // Optimal. Surface violated constraints that are outside K.
        for (std::size_t j = 0; j < m; ++j) {
          if (!p_.in_addable(j) && !active[j] && s[j] > tol_feas) {
            out.warnings.push_back("violated_outside_K");
            break;
          }
        }
        if (opts.record_trace) {
          IterationRecord rec;
          rec.iter = static_cast<int>(iter) + 1;
          rec.kind = StepKind::Stop;
          rec.f = f;
          rec.z = z;
          rec.s = s;
          rec.alpha = fs.alpha();
          rec.u = detail::scatter_multipliers(m, fs.alpha(), u, -1);
          out.trace.push_back(std::move(rec));
        }
        return finish(SolveStatus::Optimal);
      }

      // ---- episode: work constraint p_idx in
      Vector uplus = u;
      uplus.push_back(0.0);
      double s_p = s[p_idx];
      const std::size_t q_entry = fs.q();
      std::size_t episode_drops = 0;
      bool episode_done = false;

      while (!episode_done) {
        if (iter >= max_iter) {
          out.warnings.push_back("iteration_limit");
          return finish(SolveStatus::IterationLimit);
        }
        ++iter;

        StepVectors sv = fs.step_vectors(p_, p_idx, &out.ops);

        // dual blocking length
        double t1 = kInf;
        int kpos = -1;
        for (std::size_t j = 0; j < fs.q(); ++j) {
          if (sv.r[j] < -tol_r) {
            double ratio = uplus[j] / sv.r[j];
            if (ratio < 0.0) ratio = 0.0;  // roundoff guard: u+ <= 0
            if (ratio < t1 ||
                (ratio == t1 && kpos >= 0 && fs.alpha()[j] < fs.alpha()[kpos])) {
              t1 = ratio;
              kpos = static_cast<int>(j);
            }
          }
        }
        count_div(&out.ops, fs.q());

        const double t2 = sv.delta < -tol_curv ? -s_p / sv.delta : kInf;
        if (sv.delta < -tol_curv) count_div(&out.ops, 1);
        const double t = std::min(t1, t2);

        StepKind kind;
        if (t == kInf) kind = StepKind::Infeasible;
        else if (t2 <= t1) kind = StepKind::Full;  // degenerate tie -> full
        else if (t2 == kInf) kind = StepKind::DualOnly;
        else kind = StepKind::Partial;

        if (opts.record_trace) {
          IterationRecord rec;
          rec.iter = static_cast<int>(iter);
          rec.kind = kind;
          rec.p = p_idx;
          rec.k = kpos >= 0 && kind != StepKind::Full && kind != StepKind::Infeasible
                      ? fs.alpha()[kpos]
                      : -1;
          rec.t1 = t1;
          rec.t2 = t2;
          rec.t = t == kInf ? kInf : t;
          rec.f = f;
          rec.z = z;
          rec.s = p_.slack(z, nullptr);  // display only; uncounted
          rec.alpha = fs.alpha();
          rec.u = detail::scatter_multipliers(m, fs.alpha(), uplus, p_idx);
          rec.d = sv.d2;
          rec.r = sv.r;
          out.trace.push_back(std::move(rec));
        }

        if (kind == StepKind::Infeasible) {
          InfeasibilityWitness w;
          w.alpha = fs.alpha();
          w.p = p_idx;
          w.r = sv.r;
          w.delta = sv.delta;
          out.witness = std::move(w);
          return finish(SolveStatus::Infeasible);
        }

        // move the point and the objective along d for step length t
        if (t != 0.0) {
          axpy(t, sv.d2, z, &out.ops);
          f += t * sv.delta * (0.5 * t - uplus.back());
          count_mul(&out.ops, 3);
          s_p += t * sv.delta;
          count_mul(&out.ops, 1);
        }
        // multipliers move along (r, 1)
        for (std::size_t j = 0; j < fs.q(); ++j) uplus[j] -= t * sv.r[j];
        count_mul(&out.ops, fs.q());
        uplus.back() -= t;

        if (kind == StepKind::Full) {
          fs.add_constraint(p_idx, sv, tol_curv, &out.ops);
          ++out.adds;
          u = uplus;
          episode_done = true;
        } else {
          // partial or dual-only: retire the blocking constraint, stay in
          // the episode with the same entering constraint
          fs.drop_at(static_cast<std::size_t>(kpos), &out.ops);
          uplus.erase(uplus.begin() + kpos);
          ++out.drops;
          ++episode_drops;
          if (episode_drops > q_entry + 1) {
            // theoretical bound exceeded: numerical stall
            out.warnings.push_back("episode_drop_limit");
            return finish(SolveStatus::IterationLimit);
          }
        }
      }
    }
  }

 private:
  const MinimaxQp& p_;
};

inline SolveOutcome solve(const MinimaxQp& p, const SolveOptions& opts = {}) {
  return Solver(p).solve(opts);
}

}  // namespace mmqp
