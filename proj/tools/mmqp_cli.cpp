// Command-line front end: solve / generate / verify / trace / bench / attack
// plus synth-market for reproducible demo data.
//
// Exit codes: 0 solved to optimality (or requested output produced),
// 2 infeasible, 3 iteration limit, 4 bad input (parse/validation errors).
// `verify` exits 0 on accept, 1 on reject.

#include <chrono>
#include <cstdio>
#include <iostream>
#include <mutex>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>

#include "mmqp/attack.hpp"
#include "mmqp/generate.hpp"
#include "mmqp/io.hpp"
#include "mmqp/problem.hpp"
#include "mmqp/rng.hpp"
#include "mmqp/solver.hpp"
#include "mmqp/verify.hpp"

namespace {

constexpr int kExitOptimal = 0;
constexpr int kExitReject = 1;
constexpr int kExitInfeasible = 2;
constexpr int kExitIterationLimit = 3;
constexpr int kExitInputError = 4;

int exit_code_for(mmqp::SolveStatus s) {
  switch (s) {
    case mmqp::SolveStatus::Optimal: return kExitOptimal;
    case mmqp::SolveStatus::Infeasible: return kExitInfeasible;
    case mmqp::SolveStatus::IterationLimit: return kExitIterationLimit;
  }
  return kExitInputError;
}

std::vector<int> parse_forced(const std::string& text, std::size_t m) {
  std::vector<int> seq;
  if (text.empty()) return seq;
  std::stringstream ss(text);
  std::string cell;
  while (std::getline(ss, cell, ',')) {
    try {
      std::size_t pos = 0;
      const int v = std::stoi(cell, &pos);
      if (pos != cell.size()) throw std::invalid_argument(cell);
      if (v < 1 || v > static_cast<int>(m))
        throw mmqp::InvalidArgument("--force-sequence index out of range: " +
                                    cell);
      seq.push_back(v - 1);
    } catch (const std::invalid_argument&) {
      throw mmqp::InvalidArgument("--force-sequence: not an integer: '" + cell +
                                  "'");
    }
  }
  return seq;
}

mmqp::SelectionRule parse_rule(const std::string& rule) {
  if (rule == "most-violated") return mmqp::SelectionRule::MostViolated;
  if (rule == "first-violated") return mmqp::SelectionRule::FirstViolated;
  throw mmqp::InvalidArgument("--rule must be most-violated or first-violated");
}

struct ScaleSpec {
  std::size_t nx, ny, m, na;
};

ScaleSpec parse_scale(const std::string& text) {
  std::stringstream ss(text);
  std::string cell;
  std::vector<std::size_t> vals;
  while (std::getline(ss, cell, ',')) {
    try {
      vals.push_back(static_cast<std::size_t>(std::stoul(cell)));
    } catch (const std::exception&) {
      throw mmqp::InvalidArgument("--scale: not an integer: '" + cell + "'");
    }
  }
  if (vals.size() != 4)
    throw mmqp::InvalidArgument("--scale needs nx,ny,m,na");
  return ScaleSpec{vals[0], vals[1], vals[2], vals[3]};
}

std::vector<double> parse_b_grid(const std::string& text) {
  // start:step:end, inclusive end (within 1e-9)
  double start = 0, step = 0, end = 0;
  if (std::sscanf(text.c_str(), "%lf:%lf:%lf", &start, &step, &end) != 3)
    throw mmqp::InvalidArgument("--b-grid must be start:step:end");
  if (step <= 0) throw mmqp::InvalidArgument("--b-grid step must be positive");
  std::vector<double> out;
  for (double v = start; v <= end + 1e-9; v += step) out.push_back(v);
  if (out.empty()) throw mmqp::InvalidArgument("--b-grid is empty");
  return out;
}

std::vector<std::string> split_csv_list(const std::string& text) {
  std::vector<std::string> out;
  std::stringstream ss(text);
  std::string cell;
  while (std::getline(ss, cell, ',')) out.push_back(cell);
  return out;
}

// ---------------------------------------------------------------------------

int cmd_solve(const std::string& path, const std::string& rule,
              const std::string& forced, const std::string& trace_csv,
              const std::string& trace_json, const std::string& out_path,
              std::size_t max_iterations) {
  mmqp::MinimaxQp p = mmqp::MinimaxQp::load(path);
  mmqp::SolveOptions opts;
  opts.rule = parse_rule(rule);
  opts.forced_sequence = parse_forced(forced, p.m);
  opts.max_iterations = max_iterations;
  opts.record_trace = !trace_csv.empty() || !trace_json.empty();
  mmqp::SolveOutcome out = mmqp::solve(p, opts);
  if (!trace_csv.empty()) mmqp::write_file(trace_csv, mmqp::trace_to_csv(out));
  if (!trace_json.empty())
    mmqp::write_file(trace_json, mmqp::trace_to_json(out).dump(2) + "\n");
  const std::string payload = mmqp::outcome_to_json(out).dump(2) + "\n";
  if (!out_path.empty()) mmqp::write_file(out_path, payload);
  std::cout << payload;
  return exit_code_for(out.status);
}

int cmd_trace(const std::string& path, const std::string& rule,
              const std::string& forced, const std::string& csv_path) {
  mmqp::MinimaxQp p = mmqp::MinimaxQp::load(path);
  mmqp::SolveOptions opts;
  opts.rule = parse_rule(rule);
  opts.forced_sequence = parse_forced(forced, p.m);
  opts.record_trace = true;
  mmqp::SolveOutcome out = mmqp::solve(p, opts);
  if (!csv_path.empty()) mmqp::write_file(csv_path, mmqp::trace_to_csv(out));
  std::cout << mmqp::trace_to_table(out);
  std::cout << "status: " << mmqp::to_string(out.status) << "  adds: " << out.adds
            << "  drops: " << out.drops
            << "  weighted ops: " << out.ops.weighted_total() << "\n";
  return exit_code_for(out.status);
}

int cmd_verify(const std::string& path, bool enumerate) {
  mmqp::MinimaxQp p = mmqp::MinimaxQp::load(path);
  if (!p.planted || p.planted->z_star.empty())
    throw mmqp::InvalidArgument(
        "verify: problem file carries no z_star/u_star/active_set");
  mmqp::Vector u = p.planted->u_star;
  if (u.empty()) u.assign(p.m, 0.0);
  mmqp::VerificationReport rep =
      mmqp::verify_spair(p, p.planted->z_star, p.planted->active_set, u);

  nlohmann::json j;
  j["accept"] = rep.accept;
  j["kkt_residual"] = rep.kkt_residual;
  j["feasibility_max"] = rep.feasibility_max;
  j["activity_residual"] = rep.activity_residual;
  j["activity_margin"] =
      rep.activity_margin == mmqp::kInf ? nlohmann::json("inf")
                                        : nlohmann::json(rep.activity_margin);
  j["complementarity_max"] = rep.complementarity_max;
  j["sign_violation"] = rep.sign_violation;
  j["off_support_max"] = rep.off_support_max;
  j["gamma_pd"] = rep.gamma_pd_gram && rep.gamma_pd_direct;
  j["gamma_pd_gram"] = rep.gamma_pd_gram;
  j["gamma_pd_direct"] = rep.gamma_pd_direct;
  j["rows_independent"] = rep.rows_independent;
  j["b_rows_independent"] = rep.b_rows_independent;
  j["strict_complementarity"] = rep.strict_complementarity;
  j["reasons"] = rep.reasons;

  if (enumerate) {
    nlohmann::json list = nlohmann::json::array();
    for (const mmqp::SPair& sp : mmqp::enumerate_spairs(p)) {
      nlohmann::json e;
      std::vector<int> one_based;
      for (int a : sp.alpha) one_based.push_back(a + 1);
      e["alpha"] = one_based;
      e["z"] = sp.z;
      e["u"] = sp.u;
      e["f"] = sp.f;
      list.push_back(std::move(e));
    }
    j["s_pairs"] = std::move(list);
  }
  std::cout << j.dump(2) << "\n";
  return rep.accept ? kExitOptimal : kExitReject;
}

int cmd_generate(int family, std::size_t nx, std::size_t ny, std::size_t m,
                 std::size_t na, std::uint64_t seed, const std::string& out) {
  mmqp::GenerateSpec spec;
  spec.family = family;
  spec.nx = nx;
  spec.ny = ny;
  spec.m = m;
  spec.na = na;
  spec.seed = seed;
  mmqp::MinimaxQp p = mmqp::generate(spec);
  if (out.empty())
    std::cout << p.to_json().dump(2) << "\n";
  else
    p.save(out);
  return kExitOptimal;
}

struct BenchRep {
  mmqp::SolveStatus status = mmqp::SolveStatus::Optimal;
  std::size_t adds = 0, drops = 0, iterations = 0;
  std::uint64_t weighted_ops = 0;
  double setup_ms = 0.0, solve_ms = 0.0;
  double err_z = 0.0, err_u = 0.0;
  std::vector<std::pair<int, mmqp::StepKind>> steps;  // iter -> kind
};

int cmd_bench(int family, const std::vector<std::string>& scale_texts,
              std::size_t reps, std::uint64_t seed, const std::string& out_csv,
              const std::string& step_csv, std::size_t jobs) {
  std::vector<ScaleSpec> scales;
  for (const auto& t : scale_texts) scales.push_back(parse_scale(t));
  if (scales.empty()) scales.push_back(ScaleSpec{100, 200, 300, 100});
  if (jobs == 0) jobs = 1;

  std::string csv =
      "family,nx,ny,m,na,reps,optimal,mean_adds,mean_drops,mean_iterations,"
      "mean_weighted_ops,mean_setup_ms,mean_solve_ms,max_err_z,max_err_u\n";
  std::string steps_csv = "family,nx,ny,m,na,rep,iter,step_kind\n";

  for (const ScaleSpec& sc : scales) {
    std::vector<BenchRep> results(reps);
    std::mutex next_mu;
    std::size_t next = 0;
    auto worker = [&]() {
      while (true) {
        std::size_t rep;
        {
          std::lock_guard<std::mutex> lk(next_mu);
          if (next >= reps) return;
          rep = next++;
        }
        mmqp::GenerateSpec gs;
        gs.family = family;
        gs.nx = sc.nx;
        gs.ny = sc.ny;
        gs.m = sc.m;
        gs.na = sc.na;
        gs.seed = mmqp::Rng::substream(seed, "bench", rep).next_u64();

        const auto t0 = std::chrono::steady_clock::now();
        mmqp::MinimaxQp p = mmqp::generate(gs);
        const auto t1 = std::chrono::steady_clock::now();
        mmqp::SolveOptions so;
        so.record_trace = !step_csv.empty();
        mmqp::SolveOutcome out = mmqp::solve(p, so);
        const auto t2 = std::chrono::steady_clock::now();

        BenchRep br;
        br.status = out.status;
        br.adds = out.adds;
        br.drops = out.drops;
        br.iterations = out.iterations;
        br.weighted_ops = out.ops.weighted_total();
        br.setup_ms = std::chrono::duration<double, std::milli>(t1 - t0).count();
        br.solve_ms = std::chrono::duration<double, std::milli>(t2 - t1).count();
        if (out.status == mmqp::SolveStatus::Optimal && p.planted) {
          br.err_z = mmqp::norm_two(mmqp::sub(out.z, p.planted->z_star));
          br.err_u = mmqp::norm_two(mmqp::sub(out.u_full, p.planted->u_star));
        }
        for (const mmqp::IterationRecord& r : out.trace)
          br.steps.emplace_back(r.iter, r.kind);
        results[rep] = std::move(br);
      }
    };
    std::vector<std::thread> pool;
    for (std::size_t j = 0; j + 1 < jobs; ++j) pool.emplace_back(worker);
    worker();
    for (auto& th : pool) th.join();

    double adds = 0, drops = 0, iters = 0, wops = 0, setup = 0, slv = 0;
    double max_ez = 0, max_eu = 0;
    std::size_t optimal = 0;
    for (std::size_t rep = 0; rep < reps; ++rep) {
      const BenchRep& br = results[rep];
      adds += br.adds;
      drops += br.drops;
      iters += br.iterations;
      wops += static_cast<double>(br.weighted_ops);
      setup += br.setup_ms;
      slv += br.solve_ms;
      max_ez = std::max(max_ez, br.err_z);
      max_eu = std::max(max_eu, br.err_u);
      if (br.status == mmqp::SolveStatus::Optimal) ++optimal;
      if (!step_csv.empty())
        for (const auto& [it, kind] : br.steps) {
          char buf[160];
          std::snprintf(buf, sizeof(buf), "%d,%zu,%zu,%zu,%zu,%zu,%d,%s\n",
                        family, sc.nx, sc.ny, sc.m, sc.na, rep, it,
                        mmqp::to_string(kind));
          steps_csv += buf;
        }
    }
    const double dn = reps ? static_cast<double>(reps) : 1.0;
    char buf[512];
    std::snprintf(buf, sizeof(buf),
                  "%d,%zu,%zu,%zu,%zu,%zu,%zu,%.17g,%.17g,%.17g,%.17g,%.17g,"
                  "%.17g,%.17g,%.17g\n",
                  family, sc.nx, sc.ny, sc.m, sc.na, reps, optimal, adds / dn,
                  drops / dn, iters / dn, wops / dn, setup / dn, slv / dn,
                  max_ez, max_eu);
    csv += buf;
  }

  if (!out_csv.empty())
    mmqp::write_file(out_csv, csv);
  else
    std::cout << csv;
  if (!step_csv.empty()) mmqp::write_file(step_csv, steps_csv);
  return kExitOptimal;
}

int cmd_attack(const std::string& prices, const std::string& volumes,
               const std::string& b_grid, const std::string& methods,
               std::size_t trials, std::size_t top_k, std::uint64_t seed,
               const std::string& out_csv) {
  mmqp::MarketData md = mmqp::load_market_csv(prices, volumes);
  mmqp::AttackOptions opts;
  opts.b_values = parse_b_grid(b_grid);
  opts.methods = split_csv_list(methods);
  opts.trials = trials;
  opts.top_k = top_k;
  opts.seed = seed;
  std::vector<mmqp::AttackRow> rows = mmqp::run_attacks(md, opts);
  const std::string csv = mmqp::attack_rows_to_csv(rows);
  if (!out_csv.empty())
    mmqp::write_file(out_csv, csv);
  else
    std::cout << csv;
  return kExitOptimal;
}

int cmd_synth_market(std::size_t n, std::size_t days, std::uint64_t seed,
                     const std::string& prices_out,
                     const std::string& volumes_out) {
  if (n == 0 || days < 2)
    throw mmqp::InvalidArgument("synth-market: need n >= 1 and days >= 2");
  mmqp::Rng rmu = mmqp::Rng::substream(seed, "drift");
  mmqp::Rng rsig = mmqp::Rng::substream(seed, "vol");
  mmqp::Rng rp0 = mmqp::Rng::substream(seed, "p0");
  mmqp::Rng radv = mmqp::Rng::substream(seed, "adv");
  mmqp::Rng rshock = mmqp::Rng::substream(seed, "shock");
  mmqp::Rng rvshock = mmqp::Rng::substream(seed, "vshock");

  std::vector<double> mu(n), sig(n), p0(n), adv(n);
  for (std::size_t i = 0; i < n; ++i) {
    mu[i] = rmu.uniform(-0.002, 0.004);
    sig[i] = rsig.uniform(0.005, 0.03);
    p0[i] = rp0.uniform(20.0, 200.0);
    adv[i] = radv.uniform(1e5, 5e6);
  }
  const double root3 = 1.7320508075688772;
  std::string hdr;
  for (std::size_t i = 0; i < n; ++i) {
    if (i) hdr += ',';
    hdr += "A" + std::to_string(i + 1);
  }
  std::string prices = hdr + "\n", volumes = hdr + "\n";
  std::vector<double> p = p0;
  for (std::size_t t = 0; t < days; ++t) {
    for (std::size_t i = 0; i < n; ++i) {
      if (t > 0)
        p[i] *= 1.0 + mu[i] + sig[i] * rshock.uniform(-root3, root3);
      char buf[64];
      std::snprintf(buf, sizeof(buf), "%.17g", p[i]);
      prices += buf;
      prices += (i + 1 < n) ? "," : "\n";
      std::snprintf(buf, sizeof(buf), "%.17g",
                    adv[i] * rvshock.uniform(0.5, 1.5));
      volumes += buf;
      volumes += (i + 1 < n) ? "," : "\n";
    }
  }
  mmqp::write_file(prices_out, prices);
  mmqp::write_file(volumes_out, volumes);
  return kExitOptimal;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Dual active-set toolkit for minimax quadratic programs"};
  app.require_subcommand(1);

  // solve
  std::string path, rule = "most-violated", forced, trace_csv, trace_json,
              out_path;
  std::size_t max_iterations = 0;
  auto* solve_cmd = app.add_subcommand("solve", "solve a problem file");
  solve_cmd->add_option("problem", path, "problem JSON file")->required();
  solve_cmd->add_option("--rule", rule,
                        "selection rule: most-violated | first-violated");
  solve_cmd->add_option("--force-sequence", forced,
                        "comma-separated 1-based entering constraints");
  solve_cmd->add_option("--trace", trace_csv, "write iteration trace CSV");
  solve_cmd->add_option("--trace-json", trace_json,
                        "write verbose iteration trace JSON");
  solve_cmd->add_option("--out", out_path, "also write outcome JSON to a file");
  solve_cmd->add_option("--max-iterations", max_iterations,
                        "step cap (0 means 50 * (m + 1))");

  // trace
  std::string tr_path, tr_rule = "most-violated", tr_forced, tr_csv;
  auto* trace_cmd =
      app.add_subcommand("trace", "solve and print the iteration table");
  trace_cmd->add_option("problem", tr_path, "problem JSON file")->required();
  trace_cmd->add_option("--rule", tr_rule,
                        "selection rule: most-violated | first-violated");
  trace_cmd->add_option("--force-sequence", tr_forced,
                        "comma-separated 1-based entering constraints");
  trace_cmd->add_option("--csv", tr_csv, "also write the trace CSV");

  // verify
  std::string vf_path;
  bool vf_enum = false;
  auto* verify_cmd = app.add_subcommand(
      "verify", "check the solution planted in a problem file");
  verify_cmd->add_option("problem", vf_path, "problem JSON file")->required();
  verify_cmd->add_flag("--enumerate", vf_enum,
                       "also enumerate all S-pairs (small m only)");

  // generate
  int family = 2;
  std::size_t g_nx = 2, g_ny = 4, g_m = 5, g_na = 2;
  std::uint64_t g_seed = 1;
  std::string g_out;
  auto* gen_cmd = app.add_subcommand("generate", "generate a planted instance");
  gen_cmd->add_option("--family,--type", family, "construction family: 1 | 2");
  gen_cmd->add_option("--nx", g_nx, "minimizer dimension");
  gen_cmd->add_option("--ny", g_ny, "maximizer dimension");
  gen_cmd->add_option("--m", g_m, "number of constraints");
  gen_cmd->add_option("--na", g_na, "planted active-set size");
  gen_cmd->add_option("--seed", g_seed, "root seed");
  gen_cmd->add_option("--out", g_out, "output problem JSON (default stdout)");

  // bench
  int b_family = 2;
  std::vector<std::string> b_scales;
  std::size_t b_reps = 20, b_jobs = 1;
  std::uint64_t b_seed = 1;
  std::string b_out, b_steps;
  auto* bench_cmd =
      app.add_subcommand("bench", "generate-and-solve batches with statistics");
  bench_cmd->add_option("--family,--type", b_family, "construction family");
  bench_cmd->add_option("--scale", b_scales,
                        "problem scale nx,ny,m,na (repeatable)");
  bench_cmd->add_option("--reps", b_reps, "instances per scale");
  bench_cmd->add_option("--seed", b_seed, "root seed");
  bench_cmd->add_option("--out", b_out, "summary CSV path (default stdout)");
  bench_cmd->add_option("--step-csv", b_steps, "per-iteration step-kind CSV");
  bench_cmd->add_option("--jobs", b_jobs, "worker threads");

  // attack
  std::string a_prices, a_volumes, a_bgrid = "0:2:12",
              a_methods = "minimax,random,no-long", a_out;
  std::size_t a_trials = 2000, a_topk = 20;
  std::uint64_t a_seed = 42;
  auto* attack_cmd =
      app.add_subcommand("attack", "portfolio attack study on market data");
  attack_cmd->add_option("--prices", a_prices, "price CSV")->required();
  attack_cmd->add_option("--volumes", a_volumes, "volume CSV")->required();
  attack_cmd->add_option("--b-grid", a_bgrid, "budget grid start:step:end");
  attack_cmd->add_option("--methods", a_methods, "comma list of methods");
  attack_cmd->add_option("--trials", a_trials, "random baseline trials per b");
  attack_cmd->add_option("--top-k", a_topk, "no-long concentration breadth");
  attack_cmd->add_option("--seed", a_seed, "random baseline seed");
  attack_cmd->add_option("--out", a_out, "results CSV path (default stdout)");

  // synth-market
  std::size_t s_n = 20, s_days = 60;
  std::uint64_t s_seed = 7;
  std::string s_prices = "prices.csv", s_volumes = "volumes.csv";
  auto* synth_cmd = app.add_subcommand(
      "synth-market", "write a synthetic price/volume CSV pair");
  synth_cmd->add_option("--n", s_n, "number of assets");
  synth_cmd->add_option("--days", s_days, "number of days");
  synth_cmd->add_option("--seed", s_seed, "root seed");
  synth_cmd->add_option("--prices-out", s_prices, "price CSV path");
  synth_cmd->add_option("--volumes-out", s_volumes, "volume CSV path");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);  // --help
    app.exit(e);
    return kExitInputError;
  }

  try {
    if (solve_cmd->parsed())
      return cmd_solve(path, rule, forced, trace_csv, trace_json, out_path,
                       max_iterations);
    if (trace_cmd->parsed()) return cmd_trace(tr_path, tr_rule, tr_forced, tr_csv);
    if (verify_cmd->parsed()) return cmd_verify(vf_path, vf_enum);
    if (gen_cmd->parsed())
      return cmd_generate(family, g_nx, g_ny, g_m, g_na, g_seed, g_out);
    if (bench_cmd->parsed())
      return cmd_bench(b_family, b_scales, b_reps, b_seed, b_out, b_steps,
                       b_jobs);
    if (attack_cmd->parsed())
      return cmd_attack(a_prices, a_volumes, a_bgrid, a_methods, a_trials,
                        a_topk, a_seed, a_out);
    if (synth_cmd->parsed())
      return cmd_synth_market(s_n, s_days, s_seed, s_prices, s_volumes);
  } catch (const mmqp::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitInputError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitInputError;
  }
  return kExitInputError;
}
