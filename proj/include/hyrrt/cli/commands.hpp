#pragma once

/**
 * @file
 * @brief The `plan`, `benchmark` and `validate` commands. Each returns a process
 * exit code and writes human-readable lines to the given streams.
 */

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <iomanip>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "hyrrt/cli/config.hpp"
#include "hyrrt/cli/serialize.hpp"
#include "hyrrt/planner.hpp"
#include "hyrrt/validation.hpp"

namespace hyrrt::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitError = 1;
inline constexpr int kExitNegative = 2;  ///< plan: Failure; validate: invalid plan

inline constexpr const char* kDefaultPlanOutput = "hyrrt_plan.json";

/// Command-line values that take precedence over the config file.
struct Overrides {
  std::optional<std::uint64_t> seed;
  std::optional<std::string> mode;  ///< one mode for `plan`, comma-separated list for `benchmark`
  std::optional<int> max_iterations;
  std::optional<double> tolerance;
  std::optional<int> runs;
  std::optional<std::string> output;
  bool dump_trees = false;
};

inline std::vector<std::string> split_modes(const std::string& list) {
  std::vector<std::string> out;
  std::stringstream ss(list);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

/// Applies the scalar overrides (all but mode lists and runs) to a loaded config.
inline void apply_overrides(RunConfig& c, const Overrides& o, bool single_mode) {
  auto& p = c.planner;
  if (o.seed) p.seed = *o.seed;
  if (o.max_iterations) p.max_iterations = *o.max_iterations;
  if (o.tolerance) p.delta = *o.tolerance;
  if (o.dump_trees) c.output.dump_trees = true;
  if (single_mode && o.mode) {
    const auto m = parse_planner_mode(*o.mode);
    if (!m) throw Error(ErrorCode::kConfigInvalid, "unknown mode '" + *o.mode + "'");
    p.mode = *m;
  }
  p.check();
}

inline bool write_text(const std::string& path, const std::string& text, std::ostream& err) {
  std::ofstream out(path, std::ios::binary);
  if (out) out << text;
  if (!out) {
    err << "error: cannot write '" << path << "'\n";
    return false;
  }
  return true;
}

inline PlanResult<2, 1> run_once(const RunConfig& c, const PlannerConfig<2>& pc, Trees<2, 1>* trees_out = nullptr) {
  const auto ball = build_problem(c);
  Planner<2, 1> planner(ball.problem, ball.backward, ball.forward_inputs, ball.backward_inputs, pc);
  auto result = planner.run();
  if (trees_out != nullptr) *trees_out = planner.trees();
  return result;
}

inline int cmd_plan(const std::string& config_path, const Overrides& o, std::ostream& out, std::ostream& err) {
  RunConfig c;
  try {
    c = load_run_config(config_path);
    apply_overrides(c, o, /*single_mode=*/true);
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return kExitError;
  }

  Trees<2, 1> trees;
  PlanResult<2, 1> r;
  try {
    r = run_once(c, c.planner, c.output.dump_trees ? &trees : nullptr);
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return kExitError;
  }

  const std::string path = o.output.value_or(c.output.plan.empty() ? kDefaultPlanOutput : c.output.plan);
  const auto doc = run_output(r, c.planner, c.output.dump_trees ? &trees : nullptr);
  if (!write_text(path, doc.dump(1) + "\n", err)) return kExitError;

  out << "status=" << to_string(r.status) << " mode=" << to_string(c.planner.mode)
      << " scenario=" << to_string(r.provenance.scenario) << " vertices=" << r.stats.vertices_fw + r.stats.vertices_bw
      << " (fw " << r.stats.vertices_fw << ", bw " << r.stats.vertices_bw << ")"
      << " iterations=" << r.stats.iterations << " time=" << r.stats.wall_time << "s";
  if (r.found()) out << " endpoint_error=" << r.provenance.endpoint_error;
  out << " output=" << path << "\n";
  return r.found() ? kExitOk : kExitNegative;
}

struct Summary {
  double mean = 0.0;
  double median = 0.0;
  std::optional<double> stddev;  ///< sample standard deviation; absent for a single run
};

inline Summary summarize(std::vector<double> v) {
  Summary s;
  if (v.empty()) return s;
  double sum = 0.0;
  for (double x : v) sum += x;
  s.mean = sum / static_cast<double>(v.size());
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  s.median = n % 2 == 1 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
  if (n > 1) {
    double ss = 0.0;
    for (double x : v) ss += (x - s.mean) * (x - s.mean);
    s.stddev = std::sqrt(ss / static_cast<double>(n - 1));
  }
  return s;
}

struct ModeStats {
  PlannerMode mode = PlannerMode::kHyRRTConnect;
  int runs = 0;
  int found = 0;
  Summary time;
  Summary vertices;  ///< forward plus backward vertices at termination
};

/// Runs seeds base_seed .. base_seed + runs - 1 for one mode.
inline ModeStats benchmark_mode(const RunConfig& c, PlannerMode mode, int runs) {
  ModeStats s;
  s.mode = mode;
  s.runs = runs;
  std::vector<double> times;
  std::vector<double> vertices;
  for (int i = 0; i < runs; ++i) {
    auto pc = c.planner;
    pc.mode = mode;
    pc.seed = c.planner.seed + static_cast<std::uint64_t>(i);
    const auto r = run_once(c, pc);
    s.found += r.found() ? 1 : 0;
    times.push_back(r.stats.wall_time);
    vertices.push_back(static_cast<double>(r.stats.vertices_fw + r.stats.vertices_bw));
  }
  s.time = summarize(std::move(times));
  s.vertices = summarize(std::move(vertices));
  return s;
}

/// Metric rows, one column per mode.
inline std::string benchmark_csv(const std::vector<ModeStats>& stats) {
  std::ostringstream os;
  os << std::setprecision(10);
  os << "metric";
  for (const auto& s : stats) os << "," << to_string(s.mode);
  os << "\n";
  auto row = [&](const char* name, auto get) {
    os << name;
    for (const auto& s : stats) os << "," << get(s);
    os << "\n";
  };
  row("runs", [](const ModeStats& s) { return static_cast<double>(s.runs); });
  row("success_rate", [](const ModeStats& s) { return s.runs ? static_cast<double>(s.found) / s.runs : 0.0; });
  row("time_mean_s", [](const ModeStats& s) { return s.time.mean; });
  row("time_median_s", [](const ModeStats& s) { return s.time.median; });
  const bool spread = std::all_of(stats.begin(), stats.end(), [](const ModeStats& s) { return s.runs > 1; });
  if (spread) row("time_std_s", [](const ModeStats& s) { return *s.time.stddev; });
  row("vertices_mean", [](const ModeStats& s) { return s.vertices.mean; });
  row("vertices_median", [](const ModeStats& s) { return s.vertices.median; });
  if (spread) row("vertices_std", [](const ModeStats& s) { return *s.vertices.stddev; });
  return os.str();
}

inline int cmd_benchmark(const std::string& config_path, const Overrides& o, std::ostream& out, std::ostream& err) {
  RunConfig c;
  std::vector<PlannerMode> modes;
  int runs = o.runs.value_or(20);
  try {
    c = load_run_config(config_path);
    apply_overrides(c, o, /*single_mode=*/false);
    if (runs < 1) throw Error(ErrorCode::kConfigInvalid, "--runs must be at least 1");
    const auto names = split_modes(o.mode.value_or("HyRRT,BiHyRRT,HyRRTConnect"));
    if (names.empty()) throw Error(ErrorCode::kConfigInvalid, "empty mode list");
    for (const auto& n : names) {
      const auto m = parse_planner_mode(n);
      if (!m) throw Error(ErrorCode::kConfigInvalid, "unknown mode '" + n + "'");
      modes.push_back(*m);
    }
    build_problem(c);
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return kExitError;
  }

  std::vector<ModeStats> stats;
  for (auto m : modes) stats.push_back(benchmark_mode(c, m, runs));
  const auto csv = benchmark_csv(stats);
  out << csv;
  const std::string path = o.output.value_or(c.output.benchmark);
  if (!path.empty() && !write_text(path, csv, err)) return kExitError;
  return kExitOk;
}

/**
 * Tolerances a stored plan is checked with: the configured ones, widened the
 * same way the planner widened them for the plan's provenance (admissible S1
 * gap without reconstruction, error bound on set membership with it).
 */
inline ValidationTolerances tolerances_for(const json& doc, const RunConfig& c) {
  ValidationTolerances tol = c.planner.validation;
  if (!doc.contains("provenance") || !doc.at("provenance").is_object()) return tol;
  const auto& p = doc.at("provenance");
  if (p.value("scenario", std::string()) != "S1") return tol;
  if (p.value("reconstruction_applied", false)) {
    if (p.contains("error_bound") && p.at("error_bound").is_number()) {
      tol.set_margin = std::max(tol.set_margin, p.at("error_bound").get<double>());
    }
  } else if (p.contains("seam_gap") && p.at("seam_gap").is_number()) {
    tol.continuity_gap = std::max(tol.continuity_gap, p.at("seam_gap").get<double>());
  }
  return tol;
}

inline int cmd_validate(const std::string& plan_path, const std::string& config_path, std::ostream& out,
                        std::ostream& err) {
  RunConfig c;
  json doc;
  SolutionPair<2, 1> psi;
  systems::BouncingBall ball;
  try {
    c = load_run_config(config_path);
    ball = build_problem(c);
    doc = read_json_file(plan_path);
    const json& plan = doc.contains("plan") ? doc.at("plan") : doc;
    if (plan.is_null()) throw Error(ErrorCode::kConfigInvalid, "file holds no plan");
    psi = solution_pair_from_json<2, 1>(plan);
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return kExitError;
  }

  const auto report = validate_solution_pair(psi, ball.problem.system, tolerances_for(doc, c));
  out << report.summary() << "\n";
  return report.valid ? kExitOk : kExitNegative;
}

}  // namespace hyrrt::cli
