#pragma once

// Serialization of solve outcomes and iteration traces.
//
// CSV trace: one row per iteration record,
//   iter,step_kind,p,k,t1,t2,t,f,alpha
// with p/k/alpha 1-based, alpha semicolon-joined, infinities printed as
// "inf", and empty cells where a column does not apply (stop rows, no drop).
// Doubles are printed with %.17g so files are byte-stable across runs.
//
// JSON trace/outcome: same data plus the full vectors (z, s, u, d, r).
// JSON cannot hold IEEE infinities, so infinite step lengths appear as the
// string "inf".

#include <cinttypes>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>

#include <json.hpp>

#include "mmqp/problem.hpp"
#include "mmqp/solver.hpp"

namespace mmqp {

inline std::string format_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

namespace detail {

inline nlohmann::json json_scalar(double v) {
  if (v == kInf) return "inf";
  if (v == -kInf) return "-inf";
  return v;
}

inline nlohmann::json one_based(const std::vector<int>& idx) {
  std::vector<int> out;
  out.reserve(idx.size());
  for (int i : idx) out.push_back(i + 1);
  return nlohmann::json(out);
}

inline std::string join_alpha(const std::vector<int>& alpha) {
  std::string s;
  for (std::size_t i = 0; i < alpha.size(); ++i) {
    if (i) s += ';';
    s += std::to_string(alpha[i] + 1);
  }
  return s;
}

}  // namespace detail

inline std::string trace_to_csv(const SolveOutcome& out) {
  std::string csv = "iter,step_kind,p,k,t1,t2,t,f,alpha\n";
  for (const IterationRecord& r : out.trace) {
    csv += std::to_string(r.iter);
    csv += ',';
    csv += to_string(r.kind);
    csv += ',';
    if (r.p >= 0) csv += std::to_string(r.p + 1);
    csv += ',';
    if (r.k >= 0) csv += std::to_string(r.k + 1);
    csv += ',';
    const bool lengths_apply = r.kind != StepKind::Stop;
    auto len = [&](double v) {
      if (lengths_apply) csv += v == kInf ? "inf" : format_double(v);
    };
    len(r.t1);
    csv += ',';
    len(r.t2);
    csv += ',';
    len(r.t);
    csv += ',';
    csv += format_double(r.f);
    csv += ',';
    csv += detail::join_alpha(r.alpha);
    csv += '\n';
  }
  return csv;
}

inline nlohmann::json record_to_json(const IterationRecord& r) {
  nlohmann::json j;
  j["iter"] = r.iter;
  j["step_kind"] = to_string(r.kind);
  j["p"] = r.p >= 0 ? nlohmann::json(r.p + 1) : nlohmann::json();
  j["k"] = r.k >= 0 ? nlohmann::json(r.k + 1) : nlohmann::json();
  j["t1"] = detail::json_scalar(r.t1);
  j["t2"] = detail::json_scalar(r.t2);
  j["t"] = detail::json_scalar(r.t);
  j["f"] = r.f;
  j["alpha"] = detail::one_based(r.alpha);
  j["z"] = r.z;
  j["s"] = r.s;
  j["u"] = r.u;
  j["d"] = r.d;
  j["r"] = r.r;
  return j;
}

inline nlohmann::json trace_to_json(const SolveOutcome& out) {
  nlohmann::json j;
  j["status"] = to_string(out.status);
  nlohmann::json records = nlohmann::json::array();
  for (const IterationRecord& r : out.trace) records.push_back(record_to_json(r));
  j["records"] = std::move(records);
  return j;
}

inline nlohmann::json outcome_to_json(const SolveOutcome& out) {
  nlohmann::json j;
  j["status"] = to_string(out.status);
  j["f"] = out.f;
  j["z"] = out.z;
  j["alpha"] = detail::one_based(out.alpha);
  j["u"] = out.u;
  j["u_full"] = out.u_full;
  j["iterations"] = out.iterations;
  j["adds"] = out.adds;
  j["drops"] = out.drops;
  j["ops"] = {{"mul", out.ops.mul},
              {"div", out.ops.div},
              {"sqrt", out.ops.sqrt},
              {"weighted_total", out.ops.weighted_total()}};
  j["warnings"] = out.warnings;
  if (out.witness) {
    j["witness"] = {{"alpha", detail::one_based(out.witness->alpha)},
                    {"p", out.witness->p + 1},
                    {"r", out.witness->r},
                    {"delta", out.witness->delta}};
  } else {
    j["witness"] = nullptr;
  }
  return j;
}

// Fixed-width human-readable rendering of a trace (the `trace` subcommand).
inline std::string trace_to_table(const SolveOutcome& out) {
  std::ostringstream os;
  auto cell = [&](const std::string& s, int w) {
    os << s;
    for (int i = static_cast<int>(s.size()); i < w; ++i) os << ' ';
  };
  cell("iter", 6);
  cell("kind", 11);
  cell("p", 4);
  cell("k", 4);
  cell("t1", 14);
  cell("t2", 14);
  cell("t", 14);
  cell("f", 16);
  cell("alpha", 12);
  os << '\n';
  auto num = [](double v) {
    if (v == kInf) return std::string("inf");
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.6g", v);
    return std::string(buf);
  };
  for (const IterationRecord& r : out.trace) {
    cell(std::to_string(r.iter), 6);
    cell(to_string(r.kind), 11);
    cell(r.p >= 0 ? std::to_string(r.p + 1) : "-", 4);
    cell(r.k >= 0 ? std::to_string(r.k + 1) : "-", 4);
    const bool lengths = r.kind != StepKind::Stop;
    cell(lengths ? num(r.t1) : "-", 14);
    cell(lengths ? num(r.t2) : "-", 14);
    cell(lengths ? num(r.t) : "-", 14);
    cell(num(r.f), 16);
    cell(r.alpha.empty() ? "-" : detail::join_alpha(r.alpha), 12);
    os << '\n';
  }
  return os.str();
}

inline void write_file(const std::string& path, const std::string& content) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw Error("cannot write file: " + path);
  f << content;
}

}  // namespace mmqp
