#pragma once

// Command-line layer: falsify, select, compare, simulate.
//
// Exit codes: 0 success, 1 configuration or input error, 2 internal error.
// Configuration precedence is flag > --config JSON file > built-in default.

#include <openssl/evp.h>

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <memory>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "scenfalsify/scenfalsify.hpp"

namespace scenfalsify::cli {

namespace fs = std::filesystem;
using nlohmann::json;

enum ExitCode : int { kOk = 0, kConfigError = 1, kInternalError = 2 };

inline constexpr const char* kDefaultFormula = "G (dist > 2.5)";
inline constexpr const char* kSeedEnv = "SCENFALSIFY_SEED";

// ---- files and digests ----

inline std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open '" + path.string() + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline void write_file(const fs::path& path, const std::string& bytes) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error("cannot write '" + path.string() + "'");
  out << bytes;
  if (!out) throw Error("write failed for '" + path.string() + "'");
}

inline std::string sha256_hex(const std::string& bytes) {
  std::unique_ptr<EVP_MD_CTX, decltype(&EVP_MD_CTX_free)> ctx(EVP_MD_CTX_new(), &EVP_MD_CTX_free);
  unsigned char md[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (!ctx || EVP_DigestInit_ex(ctx.get(), EVP_sha256(), nullptr) != 1 ||
      EVP_DigestUpdate(ctx.get(), bytes.data(), bytes.size()) != 1 || EVP_DigestFinal_ex(ctx.get(), md, &len) != 1) {
    throw std::runtime_error("sha256 digest failed");
  }
  std::ostringstream hex;
  for (unsigned i = 0; i < len; ++i) hex << std::hex << std::setw(2) << std::setfill('0') << static_cast<int>(md[i]);
  return hex.str();
}

inline json file_entry(const fs::path& root, const fs::path& file) {
  auto bytes = read_file(file);
  return {{"path", fs::relative(file, root).generic_string()}, {"sha256", sha256_hex(bytes)}, {"bytes", bytes.size()}};
}

// SOURCE_DATE_EPOCH pins the timestamp for reproducible manifests.
inline std::string utc_timestamp() {
  std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  if (const char* epoch = std::getenv("SOURCE_DATE_EPOCH")) {
    if (auto v = detail::parse_double(epoch)) now = static_cast<std::time_t>(*v);
  }
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

// ---- configuration ----

struct DoubleField {
  const char* name;
  double StackConfig::*member;
};

inline const std::vector<DoubleField>& stack_double_fields() {
  static const std::vector<DoubleField> fields = {
      {"perception_range", &StackConfig::perception_range},
      {"perception_fov", &StackConfig::perception_fov},
      {"dropout_prob", &StackConfig::dropout_prob},
      {"track_timeout", &StackConfig::track_timeout},
      {"prediction_horizon", &StackConfig::prediction_horizon},
      {"prediction_step", &StackConfig::prediction_step},
      {"corridor_half_width", &StackConfig::corridor_half_width},
      {"yield_distance", &StackConfig::yield_distance},
      {"stop_standoff", &StackConfig::stop_standoff},
      {"resume_gap", &StackConfig::resume_gap},
      {"inch_speed", &StackConfig::inch_speed},
      {"stationary_speed", &StackConfig::stationary_speed},
      {"max_speed", &StackConfig::max_speed},
      {"max_accel", &StackConfig::max_accel},
      {"max_decel", &StackConfig::max_decel},
      {"nondet_noise_std", &StackConfig::nondet_noise_std},
  };
  return fields;
}

inline json stack_to_json(const StackConfig& s) {
  json j;
  for (const auto& f : stack_double_fields()) j[f.name] = s.*(f.member);
  j["prediction_model"] = "constant-velocity";
  j["dropout_seed"] = s.dropout_seed;
  j["noise_seed"] = s.noise_seed;
  return j;
}

inline double json_number(const json& v, const std::string& key) {
  if (!v.is_number()) throw Error("config: '" + key + "' must be a number");
  return v.get<double>();
}

inline std::uint64_t json_seed(const json& v, const std::string& key) {
  if (!v.is_number_integer() || (v.is_number_integer() && !v.is_number_unsigned() && v.get<std::int64_t>() < 0)) {
    throw Error("config: '" + key + "' must be a non-negative integer");
  }
  return v.get<std::uint64_t>();
}

inline void apply_stack_json(const json& j, StackConfig& s) {
  if (!j.is_object()) throw Error("config: 'stack' must be an object");
  for (const auto& [key, value] : j.items()) {
    if (key == "dropout_seed") {
      s.dropout_seed = json_seed(value, key);
      continue;
    }
    if (key == "noise_seed") {
      s.noise_seed = json_seed(value, key);
      continue;
    }
    if (key == "prediction_model") {
      if (value != "constant-velocity") throw Error("config: only the constant-velocity prediction model exists");
      continue;
    }
    bool found = false;
    for (const auto& f : stack_double_fields()) {
      if (key == f.name) {
        s.*(f.member) = json_number(value, key);
        found = true;
      }
    }
    if (!found) throw Error("config: unknown stack field '" + key + "'");
  }
}

/// Everything a --config file may set. Absent keys keep the defaults.
struct FileConfig {
  StackConfig stack;
  SimOptions sim;
  std::optional<std::string> formula;
  std::optional<std::uint64_t> seed;
  std::optional<std::int64_t> samples;
  std::optional<SamplerStrategy> sampler;
  std::optional<unsigned> jobs;
  std::optional<double> epsilon;
  std::optional<std::array<int, 3>> counts;
};

inline FileConfig load_config(const std::string& path) {
  FileConfig c;
  if (path.empty()) return c;
  json j;
  try {
    j = json::parse(read_file(path));
  } catch (const json::parse_error& e) {
    throw Error(path + ": " + e.what());
  }
  if (!j.is_object()) throw Error(path + ": top level must be an object");
  for (const auto& [key, value] : j.items()) {
    if (key == "stack") {
      apply_stack_json(value, c.stack);
    } else if (key == "sim") {
      if (!value.is_object()) throw Error("config: 'sim' must be an object");
      for (const auto& [k, v] : value.items()) {
        if (k == "dt") c.sim.dt = json_number(v, k);
        else if (k == "horizon") c.sim.horizon = json_number(v, k);
        else throw Error("config: unknown sim field '" + k + "'");
      }
    } else if (key == "spec") {
      if (!value.is_string()) throw Error("config: 'spec' must be a string");
      c.formula = value.get<std::string>();
    } else if (key == "seed") {
      c.seed = json_seed(value, key);
    } else if (key == "samples") {
      c.samples = static_cast<std::int64_t>(json_number(value, key));
    } else if (key == "sampler") {
      if (!value.is_string()) throw Error("config: 'sampler' must be a string");
      c.sampler = parse_sampler_strategy(value.get<std::string>());
    } else if (key == "jobs") {
      c.jobs = static_cast<unsigned>(json_seed(value, key));
    } else if (key == "epsilon") {
      c.epsilon = json_number(value, key);
    } else if (key == "counts") {
      if (!value.is_string()) throw Error("config: 'counts' must be a string like \"2:3:2\"");
      c.counts = parse_counts(value.get<std::string>());
    } else {
      throw Error("config: unknown key '" + key + "'");
    }
  }
  return c;
}

inline ScenarioSpec load_scenario(const std::string& path) {
  auto text = read_file(path);
  try {
    return parse_scenario(text);
  } catch (const ParseError& e) {
    throw Error(path + ":" + e.what());
  }
}

inline TraceRetention parse_retention(const std::string& s) {
  if (s == "none") return TraceRetention::none;
  if (s == "errors") return TraceRetention::errors;
  if (s == "all") return TraceRetention::all;
  throw Error("unknown trace retention '" + s + "' (expected none, errors, or all)");
}

inline std::string_view to_string(TraceRetention r) {
  return r == TraceRetention::none ? "none" : r == TraceRetention::all ? "all" : "errors";
}

// ---- subcommands ----

struct FalsifyArgs {
  std::string scenario;
  std::string formula;
  std::int64_t samples = 1294;
  std::uint64_t seed = 0;
  std::string sampler = "uniform";
  std::string out = "out";
  unsigned jobs = 1;
  std::string config;
  std::string keep_trace = "errors";
  std::vector<std::int64_t> pins;
};

inline int cmd_falsify(const CLI::App& sub, const FalsifyArgs& a, std::ostream& out, std::ostream& err) {
  auto file = load_config(a.config);
  auto given = [&](const char* flag) { return sub.get_option(flag)->count() > 0; };

  std::string formula_text = given("--spec") ? a.formula : file.formula.value_or(kDefaultFormula);
  std::string seed_source = "default";
  std::uint64_t seed = 0;
  if (given("--seed")) {
    seed = a.seed;
    seed_source = "flag";
  } else if (file.seed) {
    seed = *file.seed;
    seed_source = "config";
  } else if (const char* env = std::getenv(kSeedEnv)) {
    auto v = detail::parse_double(env);
    if (!v || *v < 0 || *v != std::floor(*v)) throw Error(std::string(kSeedEnv) + " must be a non-negative integer");
    seed = static_cast<std::uint64_t>(*v);
    seed_source = "environment";
  }

  CampaignConfig cfg;
  cfg.stack = file.stack;
  cfg.sim = file.sim;
  cfg.sampler.seed = seed;
  cfg.sampler.count = given("--samples") ? a.samples : file.samples.value_or(a.samples);
  cfg.sampler.strategy =
      given("--sampler") ? parse_sampler_strategy(a.sampler) : file.sampler.value_or(SamplerStrategy::uniform_random);
  cfg.jobs = given("--jobs") ? a.jobs : file.jobs.value_or(a.jobs);
  cfg.retention = parse_retention(a.keep_trace);
  cfg.pinned_cases = a.pins;
  if (cfg.sampler.count < 1) throw Error("--samples must be at least 1");

  auto spec = load_scenario(a.scenario);
  auto formula = mtl::parse_formula(formula_text, trace_signal_names());
  auto report = run_campaign(spec, formula, cfg);

  const fs::path root = a.out;
  fs::create_directories(root);
  std::vector<fs::path> outputs;
  {
    std::ostringstream csv;
    write_campaign_csv(csv, report);
    write_file(root / "campaign.csv", csv.str());
    outputs.push_back(root / "campaign.csv");
  }
  for (std::size_t i = 0; i < report.param_names.size(); ++i) {
    for (std::size_t j = i + 1; j < report.param_names.size(); ++j) {
      const auto& x = report.param_names[i];
      const auto& y = report.param_names[j];
      std::ostringstream csv;
      write_scatter_csv(csv, x, y, scatter_export(report, x, y));
      auto path = root / ("scatter_" + x + "__" + y + ".csv");
      write_file(path, csv.str());
      outputs.push_back(path);
    }
  }
  json traces = json::array();
  for (const auto& c : report.cases()) {
    if (!c.trace) continue;
    auto stem = root / "traces" / ("case_" + std::to_string(c.case_id));
    std::ostringstream t, e;
    write_trace_csv(t, *c.trace);
    write_events_csv(e, *c.trace);
    write_file(stem.string() + ".csv", t.str());
    write_file(stem.string() + "_events.csv", e.str());
    outputs.push_back(stem.string() + ".csv");
    outputs.push_back(stem.string() + "_events.csv");
  }

  int errored = 0;
  json failures = json::array();
  for (const auto& c : report.error_table) {
    if (c.status == CaseStatus::error) {
      ++errored;
      failures.push_back({{"case_id", c.case_id}, {"message", c.message}});
    }
  }

  json manifest;
  manifest["tool"] = "scenfalsify";
  manifest["version"] = kVersion;
  manifest["command"] = "falsify";
  manifest["created"] = utc_timestamp();
  manifest["inputs"] = json::array({{{"role", "scenario"},
                                     {"path", a.scenario},
                                     {"sha256", sha256_hex(read_file(a.scenario))}}});
  if (!a.config.empty()) {
    manifest["inputs"].push_back({{"role", "config"}, {"path", a.config}, {"sha256", sha256_hex(read_file(a.config))}});
  }
  manifest["config"] = {
      {"spec", report.formula_text},
      {"scenario_text", report.scenario_text},
      {"sampler", {{"strategy", std::string(scenfalsify::to_string(cfg.sampler.strategy))}, {"count", cfg.sampler.count}}},
      {"stack", stack_to_json(cfg.stack)},
      {"sim", {{"dt", cfg.sim.dt}, {"horizon", cfg.sim.horizon}}},
      {"jobs", cfg.jobs},
      {"trace_retention", std::string(to_string(cfg.retention))},
      {"pinned_cases", cfg.pinned_cases},
  };
  manifest["seeds"] = {{"sampler", seed},
                       {"sampler_source", seed_source},
                       {"dropout", cfg.stack.dropout_seed},
                       {"noise", cfg.stack.noise_seed}};
  manifest["summary"] = {{"cases", report.size()},
                         {"safe", report.safe_table.size()},
                         {"violations", report.error_table.size()},
                         {"violation_fraction", report.violation_fraction()},
                         {"collisions", report.collisions()},
                         {"errored", errored}};
  manifest["case_errors"] = failures;
  manifest["outputs"] = json::array();
  for (const auto& p : outputs) manifest["outputs"].push_back(file_entry(root, p));
  write_file(root / "manifest.json", manifest.dump(2) + "\n");

  out << "cases " << report.size() << ", violations " << report.error_table.size() << " ("
      << detail::fixed(100.0 * report.violation_fraction(), 2) << "%), collisions " << report.collisions() << "\n";
  out << "wrote " << (root / "campaign.csv").string() << " and " << outputs.size() - 1 << " other file(s)\n";
  if (errored) err << "warning: " << errored << " case(s) failed to evaluate; see manifest.json\n";
  return kOk;
}

struct SelectArgs {
  std::string campaign;
  double epsilon = 0.08;
  std::string counts = "2:3:2";
  std::string out = ".";
  std::string config;
};

inline int cmd_select(const CLI::App& sub, const SelectArgs& a, std::ostream& out, std::ostream& err) {
  auto file = load_config(a.config);
  auto given = [&](const char* flag) { return sub.get_option(flag)->count() > 0; };
  SelectionConfig cfg;
  cfg.epsilon = given("--epsilon") ? a.epsilon : file.epsilon.value_or(a.epsilon);
  cfg.counts = given("--counts") ? parse_counts(a.counts) : file.counts.value_or(parse_counts(a.counts));

  std::istringstream in(read_file(a.campaign));
  CampaignReport report;
  try {
    report = read_campaign_csv(in);
  } catch (const Error& e) {
    throw Error(a.campaign + ": " + e.what());
  }
  auto labeling = label_cases(report, cfg);
  auto sel = pick_representatives(labeling.cases, cfg);

  std::ostringstream csv;
  write_selection_csv(csv, report.param_names, sel);
  fs::path path = fs::path(a.out) / "selection.csv";
  write_file(path, csv.str());
  for (const auto& w : labeling.warnings) err << "warning: " << w << "\n";
  for (const auto& w : sel.warnings) err << "warning: " << w << "\n";
  out << csv.str();
  return kOk;
}

struct CompareArgs {
  std::string a;
  std::string b;
  std::size_t window = 200;
  std::int64_t resim = 0;
  std::size_t k = 5;
  std::string campaign;
  std::string scenario;
  std::string config;
  double noise_std = 0.0;
  std::string out;
};

inline TimedPath load_path(const std::string& path) {
  std::istringstream in(read_file(path));
  try {
    return read_path_csv(in);
  } catch (const Error& e) {
    throw Error(path + ": " + e.what());
  }
}

inline int cmd_compare(const CLI::App& sub, const CompareArgs& a, std::ostream& out, std::ostream& err) {
  auto given = [&](const char* flag) { return sub.get_option(flag)->count() > 0; };
  bool pair_mode = given("--a") || given("--b");
  bool resim_mode = given("--resim");
  if (pair_mode == resim_mode) throw Error("compare needs either --a and --b, or --resim");

  if (pair_mode) {
    if (!given("--a") || !given("--b")) throw Error("compare needs both --a and --b");
    auto gap = compare_paths(load_path(a.a), load_path(a.b), a.window, a.a, a.b);
    std::ostringstream csv;
    csv << "a,b,skorokhod,dtw_normalized\n"
        << gap.label_a << ',' << gap.label_b << ',' << detail::fixed(gap.skorokhod) << ','
        << detail::fixed(gap.dtw_normalized) << '\n';
    if (!a.out.empty()) write_file(fs::path(a.out) / "gap.csv", csv.str());
    out << "skorokhod " << detail::fixed(gap.skorokhod) << "\ndtw_normalized " << detail::fixed(gap.dtw_normalized)
        << "\n";
    return kOk;
  }

  if (a.campaign.empty() || a.scenario.empty()) throw Error("--resim needs --campaign and --scenario");
  if (a.k < 2) throw Error("--k must be at least 2");
  auto file = load_config(a.config);
  StackConfig stack = file.stack;
  if (given("--noise-std")) stack.nondet_noise_std = a.noise_std;
  std::istringstream in(read_file(a.campaign));
  auto report = read_campaign_csv(in);
  auto spec = load_scenario(a.scenario);
  if (report.param_names.size() != spec.params.size()) {
    throw Error("campaign parameters do not match the scenario declarations");
  }
  for (std::size_t i = 0; i < spec.params.size(); ++i) {
    if (report.param_names[i] != spec.params[i].name) {
      throw Error("campaign column '" + report.param_names[i] + "' does not match scenario parameter '" +
                  spec.params[i].name + "'");
    }
  }
  std::optional<CaseResult> target;
  for (const auto& c : report.cases()) {
    if (c.case_id == a.resim) target = c;
  }
  if (!target) throw Error("case " + std::to_string(a.resim) + " is not in " + a.campaign);

  Scene scene(spec, file.sim.world);
  auto rep = resim_variance(scene, target->params, stack, a.k, file.sim, a.window);
  for (const auto& w : rep.warnings) err << "warning: " << w << "\n";
  std::ostringstream csv;
  csv << "i,j,skorokhod,dtw_normalized\n";
  for (const auto& p : rep.pairs) {
    csv << p.i + 1 << ',' << p.j + 1 << ',' << detail::fixed(p.gap.skorokhod) << ','
        << detail::fixed(p.gap.dtw_normalized) << '\n';
  }
  fs::path dir = a.out.empty() ? fs::path(".") : fs::path(a.out);
  write_file(dir / ("resim_" + std::to_string(a.resim) + ".csv"), csv.str());
  out << csv.str() << "mean skorokhod " << detail::fixed(rep.mean_skorokhod) << "\nmean dtw_normalized "
      << detail::fixed(rep.mean_dtw) << "\n";
  return kOk;
}

struct SimulateArgs {
  std::string scenario;
  std::vector<std::string> params;
  std::string config;
  std::int64_t case_id = 1;
  std::string out = ".";
};

inline int cmd_simulate(const SimulateArgs& a, std::ostream& out, std::ostream&) {
  auto file = load_config(a.config);
  auto spec = load_scenario(a.scenario);
  ParamVector pv;
  pv.case_id = a.case_id;
  for (const auto& p : spec.params) pv.values.push_back(p.dist.kind == DistributionKind::constant ? p.dist.lo
                                                                                                  : 0.5 * (p.dist.lo + p.dist.hi));
  for (const auto& kv : a.params) {
    auto eq = kv.find('=');
    if (eq == std::string::npos) throw Error("--param expects NAME=VALUE, got '" + kv + "'");
    auto name = kv.substr(0, eq);
    auto value = detail::parse_double(kv.substr(eq + 1));
    if (!value) throw Error("--param " + name + ": malformed number");
    bool found = false;
    for (std::size_t i = 0; i < spec.params.size(); ++i) {
      if (spec.params[i].name == name) {
        pv.values[i] = *value;
        found = true;
      }
    }
    if (!found) throw Error("unknown parameter '" + name + "'");
  }
  auto trace = simulate(spec, pv, file.stack, file.sim);
  std::ostringstream t, e;
  write_trace_csv(t, trace);
  write_events_csv(e, trace);
  write_file(fs::path(a.out) / "trace.csv", t.str());
  write_file(fs::path(a.out) / "events.csv", e.str());
  out << "ticks " << trace.states.size() << ", min_dist " << detail::fixed(min_distance(trace))
      << ", collision " << (trace.collision ? "yes" : "no") << "\n";
  if (!trace.diagnostic.empty()) out << "diagnostic: " << trace.diagnostic << "\n";
  return kOk;
}

/// Entry point shared by the executable and the tests.
inline int run(const std::vector<std::string>& args, std::ostream& out = std::cout, std::ostream& err = std::cerr) {
  CLI::App app{"Scenario-based falsification of a surrogate autonomous-vehicle stack"};
  app.set_version_flag("--version", kVersion);
  app.require_subcommand(1);

  FalsifyArgs fa;
  auto* falsify = app.add_subcommand("falsify", "sample, simulate, and monitor a campaign");
  falsify->add_option("--scenario", fa.scenario, "scenario file")->required();
  falsify->add_option("--spec", fa.formula, "MTL formula (default: G (dist > 2.5))");
  falsify->add_option("--samples", fa.samples, "number of test cases");
  falsify->add_option("--seed", fa.seed, "sampler seed (fallback: $SCENFALSIFY_SEED, then 0)");
  falsify->add_option("--sampler", fa.sampler, "uniform or halton");
  falsify->add_option("--out", fa.out, "output directory");
  falsify->add_option("--jobs", fa.jobs, "worker threads")->check(CLI::PositiveNumber);
  falsify->add_option("--config", fa.config, "JSON configuration file");
  falsify->add_option("--keep-trace", fa.keep_trace, "trace retention: none, errors, all");
  falsify->add_option("--pin", fa.pins, "always keep the trace of this case id");

  SelectArgs sa;
  auto* select = app.add_subcommand("select", "label a campaign and pick representative cases");
  select->add_option("--campaign", sa.campaign, "campaign.csv")->required();
  select->add_option("--epsilon", sa.epsilon, "marginal radius in normalized parameter space");
  select->add_option("--counts", sa.counts, "representatives per class, F:M:S");
  select->add_option("--out", sa.out, "output directory");
  select->add_option("--config", sa.config, "JSON configuration file");

  CompareArgs ca;
  auto* compare = app.add_subcommand("compare", "distances between trajectories");
  compare->add_option("--a", ca.a, "first trace (trace csv or t,x,y)");
  compare->add_option("--b", ca.b, "second trace");
  compare->add_option("--window", ca.window, "Skorokhod alignment band in samples");
  compare->add_option("--resim", ca.resim, "case id to resimulate");
  compare->add_option("--k", ca.k, "number of resimulations");
  compare->add_option("--campaign", ca.campaign, "campaign.csv holding the case");
  compare->add_option("--scenario", ca.scenario, "scenario file of the campaign");
  compare->add_option("--config", ca.config, "JSON configuration file");
  compare->add_option("--noise-std", ca.noise_std, "override nondet_noise_std");
  compare->add_option("--out", ca.out, "output directory");

  SimulateArgs ma;
  auto* sim = app.add_subcommand("simulate", "run one case and write its trace");
  sim->add_option("--scenario", ma.scenario, "scenario file")->required();
  sim->add_option("--param", ma.params, "NAME=VALUE (undeclared values default to the range midpoint)");
  sim->add_option("--case-id", ma.case_id, "case id used to derive per-case seeds");
  sim->add_option("--config", ma.config, "JSON configuration file");
  sim->add_option("--out", ma.out, "output directory");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) {
      app.exit(e, out, err);
      return kOk;
    }
    app.exit(e, out, err);
    return kConfigError;
  }

  try {
    if (falsify->parsed()) return cmd_falsify(*falsify, fa, out, err);
    if (select->parsed()) return cmd_select(*select, sa, out, err);
    if (compare->parsed()) return cmd_compare(*compare, ca, out, err);
    if (sim->parsed()) return cmd_simulate(ma, out, err);
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return kConfigError;
  } catch (const fs::filesystem_error& e) {
    err << "error: " << e.what() << "\n";
    return kConfigError;
  } catch (const std::exception& e) {
    err << "internal error: " << e.what() << "\n";
    return kInternalError;
  }
  return kInternalError;
}

}  // namespace scenfalsify::cli
