#pragma once

// Falsification campaigns: sample, simulate, monitor, and split the cases
// into safe and error tables.

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <istream>
#include <limits>
#include <optional>
#include <ostream>
#include <set>
#include <string>
#include <thread>
#include <vector>

#include "scenfalsify/conformance.hpp"
#include "scenfalsify/detail/text.hpp"
#include "scenfalsify/error.hpp"
#include "scenfalsify/mtl.hpp"
#include "scenfalsify/sampling.hpp"
#include "scenfalsify/scenario.hpp"
#include "scenfalsify/sim_world.hpp"

namespace scenfalsify {

enum class CaseStatus { ok, horizon_exhausted, error };

inline std::string_view to_string(CaseStatus s) {
  switch (s) {
    case CaseStatus::ok: return "ok";
    case CaseStatus::horizon_exhausted: return "horizon_exhausted";
    case CaseStatus::error: return "error";
  }
  return "error";
}

inline CaseStatus parse_case_status(std::string_view s) {
  for (auto v : {CaseStatus::ok, CaseStatus::horizon_exhausted, CaseStatus::error}) {
    if (to_string(v) == s) return v;
  }
  throw Error("unknown case status '" + std::string(s) + "'");
}

struct CaseResult {
  std::int64_t case_id = 0;
  ParamVector params;
  // A case whose simulation or monitoring failed carries rho = -inf so it
  // lands in the error table; `message` says why.
  double rho = 0.0;
  double min_dist = 0.0;
  std::optional<double> min_ttc;
  bool collision = false;
  std::set<FailureKind> failure_tags;
  CaseStatus status = CaseStatus::ok;
  std::string message;
  std::optional<Trace> trace;
  std::string trace_path;
};

enum class TraceRetention { none, errors, all };

struct CampaignConfig {
  SamplerConfig sampler;
  StackConfig stack;
  SimOptions sim;
  unsigned jobs = 1;
  TraceRetention retention = TraceRetention::errors;
  std::vector<std::int64_t> pinned_cases;  // traces kept regardless of retention
};

struct CampaignReport {
  std::vector<std::string> param_names;
  std::vector<CaseResult> safe_table;   // rho > 0
  std::vector<CaseResult> error_table;  // rho <= 0
  std::string formula_text;
  std::string scenario_text;
  CampaignConfig config;

  std::size_t size() const { return safe_table.size() + error_table.size(); }
  double violation_fraction() const {
    return size() ? static_cast<double>(error_table.size()) / static_cast<double>(size()) : 0.0;
  }
  std::size_t collisions() const {
    return static_cast<std::size_t>(
        std::count_if(error_table.begin(), error_table.end(), [](const CaseResult& c) { return c.collision; }));
  }

  /// Both tables merged, ordered by case id.
  std::vector<CaseResult> cases() const {
    std::vector<CaseResult> out = safe_table;
    out.insert(out.end(), error_table.begin(), error_table.end());
    std::sort(out.begin(), out.end(), [](const CaseResult& a, const CaseResult& b) { return a.case_id < b.case_id; });
    return out;
  }

  std::optional<std::size_t> param_index(std::string_view name) const {
    for (std::size_t i = 0; i < param_names.size(); ++i) {
      if (param_names[i] == name) return i;
    }
    return std::nullopt;
  }
};

/// Simulates and monitors one case. Never throws; failures are recorded.
inline CaseResult evaluate_case(const Scene& scene, const mtl::Formula& formula, const ParamVector& pv,
                                const CampaignConfig& cfg) {
  CaseResult r;
  r.case_id = pv.case_id;
  r.params = pv;
  try {
    Trace trace = simulate(scene, pv, cfg.stack, cfg.sim);
    r.rho = mtl::robustness(formula, to_signal_table(trace));
    r.min_dist = min_distance(trace);
    r.min_ttc = min_ttc(trace);
    r.collision = trace.collision;
    r.failure_tags = attribute_failure(trace);
    if (trace.horizon_exhausted) {
      r.status = CaseStatus::horizon_exhausted;
      r.message = trace.diagnostic;
    }
    bool pinned = std::find(cfg.pinned_cases.begin(), cfg.pinned_cases.end(), pv.case_id) != cfg.pinned_cases.end();
    bool keep = cfg.retention == TraceRetention::all || pinned ||
                (cfg.retention == TraceRetention::errors && !mtl::is_satisfied(r.rho));
    if (keep) r.trace = std::move(trace);
  } catch (const std::exception& e) {
    r.rho = -std::numeric_limits<double>::infinity();
    r.min_dist = std::numeric_limits<double>::quiet_NaN();
    r.status = CaseStatus::error;
    r.message = e.what();
  }
  return r;
}

/// Runs every sampled case once. Workers pull cases from a shared counter
/// and write into per-case slots, so the report does not depend on `jobs`.
inline CampaignReport run_campaign(const ScenarioSpec& spec, const mtl::FormulaPtr& formula,
                                   const CampaignConfig& cfg) {
  if (!formula) throw Error("campaign needs a formula");
  cfg.stack.validate();
  const Scene scene(spec, cfg.sim.world);
  const auto cases = sample(sample_space(spec), cfg.sampler);

  std::vector<CaseResult> results(cases.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < cases.size(); i = next++) {
      results[i] = evaluate_case(scene, *formula, cases[i], cfg);
    }
  };
  unsigned jobs = std::max(1u, cfg.jobs);
  if (jobs == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (unsigned w = 0; w < jobs; ++w) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }

  CampaignReport rep;
  for (const auto& p : spec.params) rep.param_names.push_back(p.name);
  rep.formula_text = mtl::to_string(*formula);
  rep.scenario_text = to_text(spec);
  rep.config = cfg;
  for (auto& r : results) {
    (mtl::is_satisfied(r.rho) ? rep.safe_table : rep.error_table).push_back(std::move(r));
  }
  return rep;
}

struct ScatterRow {
  std::int64_t case_id = 0;
  double x = 0.0;
  double y = 0.0;
  double rho = 0.0;
};

/// (x, y, rho) triples for two named parameters, ordered by case id.
inline std::vector<ScatterRow> scatter_export(const CampaignReport& rep, std::string_view x_axis,
                                              std::string_view y_axis) {
  auto xi = rep.param_index(x_axis);
  if (!xi) throw Error("unknown parameter '" + std::string(x_axis) + "'");
  auto yi = rep.param_index(y_axis);
  if (!yi) throw Error("unknown parameter '" + std::string(y_axis) + "'");
  std::vector<ScatterRow> out;
  for (const auto& c : rep.cases()) out.push_back({c.case_id, c.params.values[*xi], c.params.values[*yi], c.rho});
  return out;
}

inline void write_scatter_csv(std::ostream& os, std::string_view x_axis, std::string_view y_axis,
                              const std::vector<ScatterRow>& rows) {
  os << x_axis << ',' << y_axis << ",rho\n";
  for (const auto& r : rows) {
    os << detail::shortest(r.x) << ',' << detail::shortest(r.y) << ',' << detail::shortest(r.rho) << '\n';
  }
}

// ---- campaign table CSV ----

inline std::string join_tags(const std::set<FailureKind>& tags) {
  std::string out;
  for (auto t : tags) {
    if (!out.empty()) out += ';';
    out += to_string(t);
  }
  return out;
}

inline std::set<FailureKind> parse_tags(std::string_view text) {
  std::set<FailureKind> out;
  if (text.empty()) return out;
  for (auto part : detail::split(text, ';')) {
    if (part == "perception") out.insert(FailureKind::perception);
    else if (part == "prediction") out.insert(FailureKind::prediction);
    else if (part == "planning") out.insert(FailureKind::planning);
    else throw Error("unknown failure tag '" + std::string(part) + "'");
  }
  return out;
}

inline std::string campaign_header(const std::vector<std::string>& param_names) {
  std::string h = "case_id";
  for (const auto& n : param_names) h += "," + n;
  h += ",rho,min_dist,min_ttc,collision,failure_tags,status";
  return h;
}

// Shortest round-trip formatting keeps every value exact, so a table read
// back classifies and replays identically.
inline std::string format_number(double v) {
  if (std::isnan(v)) return "";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  return detail::shortest(v);
}

inline void write_campaign_csv(std::ostream& os, const CampaignReport& rep) {
  os << campaign_header(rep.param_names) << '\n';
  for (const auto& c : rep.cases()) {
    os << c.case_id;
    for (double v : c.params.values) os << ',' << format_number(v);
    os << ',' << format_number(c.rho) << ',' << format_number(c.min_dist) << ','
       << (c.min_ttc ? format_number(*c.min_ttc) : std::string()) << ',' << (c.collision ? 1 : 0) << ','
       << join_tags(c.failure_tags) << ',' << to_string(c.status) << '\n';
  }
}

/// Reads a campaign table back into a report (configuration echo left at
/// defaults). Parameter columns are those between case_id and rho.
inline CampaignReport read_campaign_csv(std::istream& is) {
  std::string line;
  if (!std::getline(is, line)) throw Error("campaign csv: empty input");
  auto header = detail::split(detail::trim(line), ',');
  const std::vector<std::string_view> tail = {"rho", "min_dist", "min_ttc", "collision", "failure_tags", "status"};
  if (header.size() < 1 + tail.size() || header.front() != "case_id" ||
      !std::equal(tail.begin(), tail.end(), header.end() - static_cast<std::ptrdiff_t>(tail.size()))) {
    throw Error("campaign csv: unexpected header '" + line + "'");
  }
  CampaignReport rep;
  for (std::size_t i = 1; i + tail.size() < header.size(); ++i) rep.param_names.emplace_back(header[i]);
  const std::size_t np = rep.param_names.size();

  auto number = [](std::string_view s, int lineno) {
    if (s == "inf") return std::numeric_limits<double>::infinity();
    if (s == "-inf") return -std::numeric_limits<double>::infinity();
    if (s.empty()) return std::numeric_limits<double>::quiet_NaN();
    auto v = detail::parse_double(s);
    if (!v) throw Error("campaign csv: line " + std::to_string(lineno) + ": malformed number '" + std::string(s) + "'");
    return *v;
  };
  int lineno = 1;
  std::set<std::int64_t> seen;
  while (std::getline(is, line)) {
    ++lineno;
    auto body = detail::trim(line);
    if (body.empty()) continue;
    auto f = detail::split(body, ',');
    if (f.size() != header.size()) {
      throw Error("campaign csv: line " + std::to_string(lineno) + " has " + std::to_string(f.size()) +
                  " fields, expected " + std::to_string(header.size()));
    }
    CaseResult c;
    double id = number(f[0], lineno);
    if (!(id >= 1.0) || id != std::floor(id)) {
      throw Error("campaign csv: line " + std::to_string(lineno) + ": bad case_id");
    }
    c.case_id = static_cast<std::int64_t>(id);
    if (!seen.insert(c.case_id).second) {
      throw Error("campaign csv: duplicate case_id " + std::to_string(c.case_id));
    }
    c.params.case_id = c.case_id;
    for (std::size_t i = 0; i < np; ++i) c.params.values.push_back(number(f[1 + i], lineno));
    c.rho = number(f[1 + np], lineno);
    c.min_dist = number(f[2 + np], lineno);
    if (!f[3 + np].empty()) c.min_ttc = number(f[3 + np], lineno);
    if (f[4 + np] != "0" && f[4 + np] != "1") {
      throw Error("campaign csv: line " + std::to_string(lineno) + ": collision must be 0 or 1");
    }
    c.collision = f[4 + np] == "1";
    c.failure_tags = parse_tags(f[5 + np]);
    c.status = parse_case_status(f[6 + np]);
    if (std::isnan(c.rho)) throw Error("campaign csv: line " + std::to_string(lineno) + ": missing rho");
    (mtl::is_satisfied(c.rho) ? rep.safe_table : rep.error_table).push_back(std::move(c));
  }
  return rep;
}

}  // namespace scenfalsify
