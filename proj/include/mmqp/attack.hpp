#pragma once

// Adversarial portfolio game on market data.
//
// From daily prices P (T x n) and volumes V (T x n):
//   returns  R_t = (P_t - P_{t-1}) / P_{t-1}          (T-1 rows)
//   mu       = mean of the return rows
//   Sigma_y  = (1/(T-1)) sum (R_t - mu)(R_t - mu)^T
//   ADV_i    = mean volume of asset i;  W = diag(1 / ADV_i)
//   H        = identity (attacker inventory cost shape)
//
// The blocks are rescaled to fixed relative magnitudes before assembly,
// with M = ||mu||_1:
//   ||H||_1 = 0.1 M,   ||W||_1 = M,   ||Sigma_y||_1 = 0.2 M
// (induced 1-norms), then Sigma_y gets an eigenvalue floor of 1e-10
// relative so -Sigma_y is safely negative definite.
//
// Game, for budget parameter b in [0, 12]:
//   min_x max_y  1/2 x^T H x + x^T W y - 1/2 y^T Sigma_y y + mu^T y
//   s.t.         x + y <= (12 - b) 1
// mapped onto the solver as G11 = H, G12 = W, G22 = -Sigma_y, cx = 0,
// cy = mu, A = B = I, h = -(12 - b) 1.
//
// q(x) = max_y f(x, y) is evaluated with an n_x = 0 solve (pure concave
// maximization, which the iteration handles with global guarantees) plus
// the attacker's own cost terms. Damage ratio of an attack position:
//   rho = max(0, (q(0) - q(x)) / |q(0)|).
// Baselines: best of uniform random positions in [b-12, 12-b]^n, and a
// concentrated position of 12-b on the top-20 assets by mean return.

#include <algorithm>
#include <fstream>
#include <numeric>
#include <sstream>
#include <string>
#include <vector>

#include "mmqp/core.hpp"
#include "mmqp/eigen.hpp"
#include "mmqp/problem.hpp"
#include "mmqp/rng.hpp"
#include "mmqp/solver.hpp"

namespace mmqp {

struct MarketData {
  std::vector<std::string> tickers;
  Matrix prices;   // T x n
  Matrix volumes;  // T x n
  std::size_t days() const { return prices.rows(); }
  std::size_t assets() const { return prices.cols(); }
};

namespace detail {

inline Matrix parse_csv_table(const std::string& path,
                              std::vector<std::string>& header) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open CSV file: " + path);
  std::string line;
  if (!std::getline(in, line)) throw ParseError("empty CSV file: " + path);
  if (!line.empty() && line.back() == '\r') line.pop_back();
  header.clear();
  {
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) header.push_back(cell);
  }
  if (header.empty()) throw ParseError("CSV header has no columns: " + path);
  std::vector<double> values;
  std::size_t rows = 0;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::stringstream ss(line);
    std::string cell;
    std::size_t cols = 0;
    while (std::getline(ss, cell, ',')) {
      try {
        std::size_t pos = 0;
        const double v = std::stod(cell, &pos);
        if (pos != cell.size()) throw std::invalid_argument(cell);
        values.push_back(v);
      } catch (const std::exception&) {
        throw ParseError("CSV " + path + " row " + std::to_string(rows + 2) +
                         ": not a number: '" + cell + "'");
      }
      ++cols;
    }
    if (cols != header.size())
      throw ParseError("CSV " + path + " row " + std::to_string(rows + 2) +
                       " has " + std::to_string(cols) + " cells, expected " +
                       std::to_string(header.size()));
    ++rows;
  }
  Matrix M(rows, header.size());
  std::copy(values.begin(), values.end(), M.data().begin());
  return M;
}

}  // namespace detail

inline MarketData load_market_csv(const std::string& prices_path,
                                  const std::string& volumes_path) {
  MarketData md;
  std::vector<std::string> vol_header;
  md.prices = detail::parse_csv_table(prices_path, md.tickers);
  md.volumes = detail::parse_csv_table(volumes_path, vol_header);
  if (vol_header != md.tickers)
    throw ParseError("price and volume files disagree on tickers");
  if (md.volumes.rows() != md.prices.rows())
    throw ParseError("price and volume files disagree on the number of days");
  if (md.prices.rows() < 2)
    throw ParseError("need at least two days of prices to form returns");
  for (std::size_t t = 0; t < md.prices.rows(); ++t)
    for (std::size_t i = 0; i < md.prices.cols(); ++i) {
      if (!(md.prices(t, i) > 0.0))
        throw ParseError("non-positive price for " + md.tickers[i] + " on day " +
                         std::to_string(t + 1));
      if (md.volumes(t, i) < 0.0)
        throw ParseError("negative volume for " + md.tickers[i] + " on day " +
                         std::to_string(t + 1));
    }
  return md;
}

// ---------------------------------------------------------------------------

struct AttackModel {
  std::size_t n = 0;
  double b = 0.0;
  Matrix H, W, Sigma;  // scaled blocks (Sigma already floored)
  Vector mu;           // raw mean returns (cy uses these unscaled)
  double m_mu = 0.0;   // ||mu||_1
  double sigma_shift = 0.0;
  std::vector<std::string> warnings;
};

// Day-over-day arithmetic returns, one row per day transition.
inline Matrix returns_matrix(const MarketData& md) {
  const std::size_t T = md.days(), n = md.assets();
  if (T < 2) throw InvalidArgument("returns: need at least two days");
  Matrix R(T - 1, n);
  for (std::size_t t = 0; t + 1 < T; ++t)
    for (std::size_t i = 0; i < n; ++i)
      R(t, i) = (md.prices(t + 1, i) - md.prices(t, i)) / md.prices(t, i);
  return R;
}

inline AttackModel build_attack_model(const MarketData& md, double b) {
  if (!(b >= 0.0 && b <= 12.0))
    throw InvalidArgument("attack: b must lie in [0, 12]");
  AttackModel am;
  am.n = md.assets();
  am.b = b;
  const std::size_t T = md.days(), n = am.n;

  Matrix R = returns_matrix(md);

  am.mu.assign(n, 0.0);
  for (std::size_t t = 0; t + 1 < T; ++t)
    for (std::size_t i = 0; i < n; ++i) am.mu[i] += R(t, i);
  for (std::size_t i = 0; i < n; ++i)
    am.mu[i] /= static_cast<double>(T - 1);

  am.Sigma = Matrix(n, n);
  for (std::size_t t = 0; t + 1 < T; ++t) {
    for (std::size_t i = 0; i < n; ++i) {
      const double di = R(t, i) - am.mu[i];
      for (std::size_t j = 0; j < n; ++j)
        am.Sigma(i, j) += di * (R(t, j) - am.mu[j]);
    }
  }
  for (auto& v : am.Sigma.data()) v /= static_cast<double>(T - 1);

  Vector adv(n, 0.0);
  for (std::size_t t = 0; t < T; ++t)
    for (std::size_t i = 0; i < n; ++i) adv[i] += md.volumes(t, i);
  am.W = Matrix(n, n);
  for (std::size_t i = 0; i < n; ++i) {
    adv[i] /= static_cast<double>(T);
    if (adv[i] <= 0.0) {
      am.W(i, i) = 1e12;  // zero-liquidity clamp
      am.warnings.push_back("zero_adv_clamped:" + md.tickers[i]);
    } else {
      am.W(i, i) = 1.0 / adv[i];
    }
  }

  am.H = Matrix::identity(n);

  am.m_mu = norm_one(am.mu);
  if (am.m_mu == 0.0)
    throw InvalidArgument("attack: mean returns are identically zero");

  auto rescale = [](Matrix& M, double target) {
    const double norm = M.norm_one();
    if (norm == 0.0)
      throw InvalidArgument("attack: block with zero norm cannot be scaled");
    const double factor = target / norm;
    for (auto& v : M.data()) v *= factor;
  };
  rescale(am.H, 0.1 * am.m_mu);
  rescale(am.W, am.m_mu);
  rescale(am.Sigma, 0.2 * am.m_mu);

  // eigenvalue floor: lift Sigma to lambda_min >= 1e-10 relative
  EigenDecomposition ed = symmetric_eigen(am.Sigma);
  const double floor = 1e-10 * std::max(1.0, am.Sigma.norm_one());
  if (ed.values.front() < floor) {
    am.sigma_shift = floor - ed.values.front();
    for (std::size_t i = 0; i < n; ++i) am.Sigma(i, i) += am.sigma_shift;
    am.warnings.push_back("covariance_regularized");
  }
  return am;
}

inline MinimaxQp attack_problem(const AttackModel& am) {
  const std::size_t n = am.n;
  Matrix G22(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) G22(i, j) = -am.Sigma(i, j);
  const Matrix I = Matrix::identity(n);
  Vector h(n, -(12.0 - am.b));
  return MinimaxQp(n, n, am.H, am.W, G22, I, I, Vector(n, 0.0), am.mu, h);
}

// Market maker's best response value q(x) = max_y f(x, y), including the
// attacker's own cost terms, via a pure-maximization solve.
struct BestResponse {
  double q = 0.0;
  Vector y;
  std::size_t active_count = 0;
  SolveStatus status = SolveStatus::Optimal;
};

inline BestResponse best_response(const AttackModel& am, const Vector& x) {
  const std::size_t n = am.n;
  if (x.size() != n) throw DimensionMismatch("best_response: bad x length");
  Matrix G22(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) G22(i, j) = -am.Sigma(i, j);
  // fixed x shifts the y-objective by W x and tightens the cap by x
  Vector cy(n);
  const Vector wx = matvec(am.W, x);
  for (std::size_t i = 0; i < n; ++i) cy[i] = am.mu[i] + wx[i];
  Vector h(n);
  for (std::size_t i = 0; i < n; ++i) h[i] = -(12.0 - am.b) + x[i];

  MinimaxQp sub(0, n, Matrix(0, 0), Matrix(0, n), G22, Matrix(n, 0),
                Matrix::identity(n), Vector{}, cy, h);
  SolveOutcome out = solve(sub);

  BestResponse br;
  br.status = out.status;
  br.y = out.z;
  br.active_count = out.alpha.size();
  const Vector hx = matvec(am.H, x);
  br.q = out.f + 0.5 * dot(x, hx);
  return br;
}

// ---------------------------------------------------------------------------

struct AttackRow {
  double b = 0.0;
  std::string method;
  double q_before = 0.0;
  double q_after = 0.0;
  double rho = 0.0;
  std::size_t active_count = 0;
};

struct AttackOptions {
  std::vector<double> b_values;
  std::vector<std::string> methods = {"minimax", "random", "no-long"};
  std::size_t trials = 2000;   // random baseline draws per b
  std::size_t top_k = 20;      // concentration breadth of the no-long baseline
  std::uint64_t seed = 42;
};

inline double damage_ratio(double q_before, double q_after) {
  if (q_before == 0.0) return 0.0;
  return std::max(0.0, (q_before - q_after) / std::abs(q_before));
}

inline std::vector<AttackRow> run_attacks(const MarketData& md,
                                          const AttackOptions& opts) {
  std::vector<AttackRow> rows;
  for (std::size_t bi = 0; bi < opts.b_values.size(); ++bi) {
    const double b = opts.b_values[bi];
    AttackModel am = build_attack_model(md, b);
    const std::size_t n = am.n;
    const double q0 = best_response(am, Vector(n, 0.0)).q;

    for (const std::string& method : opts.methods) {
      AttackRow row;
      row.b = b;
      row.method = method;
      row.q_before = q0;

      if (method == "minimax") {
        MinimaxQp prob = attack_problem(am);
        SolveOutcome out = solve(prob);
        if (out.status != SolveStatus::Optimal)
          throw Error("attack: minimax solve did not reach optimality at b = " +
                      std::to_string(b));
        Vector x(out.z.begin(), out.z.begin() + static_cast<std::ptrdiff_t>(n));
        row.q_after = best_response(am, x).q;
        row.active_count = out.alpha.size();
      } else if (method == "random") {
        double best_q = kInf;
        std::size_t best_active = 0;
        for (std::size_t t = 0; t < opts.trials; ++t) {
          Rng rng = Rng::substream(opts.seed, "attack_random",
                                   (static_cast<std::uint64_t>(bi) << 32) | t);
          Vector x = rng.uniform_vector(n, b - 12.0, 12.0 - b);
          BestResponse br = best_response(am, x);
          if (br.q < best_q) {
            best_q = br.q;
            best_active = br.active_count;
          }
        }
        row.q_after = opts.trials ? best_q : q0;
        row.active_count = best_active;
      } else if (method == "no-long") {
        // concentrate 12-b on the top assets by mean return
        std::vector<std::size_t> order(n);
        std::iota(order.begin(), order.end(), std::size_t{0});
        std::stable_sort(order.begin(), order.end(),
                         [&](std::size_t a, std::size_t c) {
                           return am.mu[a] > am.mu[c];
                         });
        Vector x(n, 0.0);
        for (std::size_t i = 0; i < std::min(opts.top_k, n); ++i)
          x[order[i]] = 12.0 - b;
        BestResponse br = best_response(am, x);
        row.q_after = br.q;
        row.active_count = br.active_count;
      } else {
        throw InvalidArgument("attack: unknown method '" + method + "'");
      }

      row.rho = damage_ratio(row.q_before, row.q_after);
      rows.push_back(std::move(row));
    }
  }
  return rows;
}

inline std::string attack_rows_to_csv(const std::vector<AttackRow>& rows) {
  std::string csv = "b,method,q_before,q_after,rho,active_count\n";
  for (const AttackRow& r : rows) {
    char buf[256];
    std::snprintf(buf, sizeof(buf), "%.17g,%s,%.17g,%.17g,%.17g,%zu\n", r.b,
                  r.method.c_str(), r.q_before, r.q_after, r.rho,
                  r.active_count);
    csv += buf;
  }
  return csv;
}

}  // namespace mmqp
