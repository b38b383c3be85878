#pragma once

/**
 * @file
 * @brief Run configuration file: system parameters, problem overrides, planner,
 * simulation and validation settings, output paths. Unknown keys are errors.
 */

#include <json.hpp>

#include <cstdint>
#include <fstream>
#include <initializer_list>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "hyrrt/error.hpp"
#include "hyrrt/planner.hpp"
#include "hyrrt/systems/bouncing_ball.hpp"

namespace hyrrt::cli {

using json = nlohmann::json;

struct OutputPaths {
  std::string plan;       ///< RunOutput JSON for `plan`
  std::string benchmark;  ///< CSV table for `benchmark`
  bool dump_trees = false;
};

struct RunConfig {
  std::string system = "bouncing_ball";
  systems::BouncingBallParams ball;
  PlannerConfig<2> planner;
  OutputPaths output;
};

namespace detail {

[[noreturn]] inline void invalid(const std::string& what) { throw Error(ErrorCode::kConfigInvalid, what); }

inline void reject_unknown(const json& obj, const std::string& where, std::initializer_list<const char*> known) {
  if (!obj.is_object()) invalid(where + " must be an object");
  for (auto it = obj.begin(); it != obj.end(); ++it) {
    bool ok = false;
    for (const char* k : known) ok = ok || it.key() == k;
    if (!ok) invalid("unknown key '" + it.key() + "' in " + where);
  }
}

inline double number(const json& obj, const char* key, double fallback, const std::string& where) {
  if (!obj.contains(key)) return fallback;
  const auto& v = obj.at(key);
  if (!v.is_number()) invalid(where + "." + key + " must be a number");
  return v.get<double>();
}

inline std::int64_t integer(const json& obj, const char* key, std::int64_t fallback, const std::string& where) {
  if (!obj.contains(key)) return fallback;
  const auto& v = obj.at(key);
  if (!v.is_number_integer()) invalid(where + "." + key + " must be an integer");
  return v.get<std::int64_t>();
}

inline bool boolean(const json& obj, const char* key, bool fallback, const std::string& where) {
  if (!obj.contains(key)) return fallback;
  const auto& v = obj.at(key);
  if (!v.is_boolean()) invalid(where + "." + key + " must be a boolean");
  return v.get<bool>();
}

inline std::string text(const json& obj, const char* key, const std::string& fallback, const std::string& where) {
  if (!obj.contains(key)) return fallback;
  const auto& v = obj.at(key);
  if (!v.is_string()) invalid(where + "." + key + " must be a string");
  return v.get<std::string>();
}

inline Vector<2> pair2(const json& obj, const char* key, const Vector<2>& fallback, const std::string& where) {
  if (!obj.contains(key)) return fallback;
  const auto& v = obj.at(key);
  if (!v.is_array() || v.size() != 2 || !v[0].is_number() || !v[1].is_number()) {
    invalid(where + "." + key + " must be an array of two numbers");
  }
  return Vector<2>(v[0].get<double>(), v[1].get<double>());
}

}  // namespace detail

inline RunConfig parse_run_config(const json& root) {
  using namespace detail;
  RunConfig c;
  reject_unknown(root, "config", {"system", "problem", "planner", "simulation", "validation", "output"});

  if (root.contains("system")) {
    const auto& s = root.at("system");
    reject_unknown(s, "system", {"name", "gamma", "lambda", "u_max", "sampling_box"});
    c.system = text(s, "name", c.system, "system");
    c.ball.gamma = number(s, "gamma", c.ball.gamma, "system");
    c.ball.lambda = number(s, "lambda", c.ball.lambda, "system");
    c.ball.u_max = number(s, "u_max", c.ball.u_max, "system");
    if (s.contains("sampling_box")) {
      const auto& b = s.at("sampling_box");
      reject_unknown(b, "system.sampling_box", {"lower", "upper"});
      c.ball.sampling_box.lower = pair2(b, "lower", c.ball.sampling_box.lower, "system.sampling_box");
      c.ball.sampling_box.upper = pair2(b, "upper", c.ball.sampling_box.upper, "system.sampling_box");
    }
  }
  if (c.system != "bouncing_ball") invalid("unsupported system '" + c.system + "'");

  if (root.contains("problem")) {
    const auto& p = root.at("problem");
    reject_unknown(p, "problem", {"initial_state", "final_state", "unsafe_input_below", "unsafe_input_above"});
    c.ball.initial_state = pair2(p, "initial_state", c.ball.initial_state, "problem");
    c.ball.final_state = pair2(p, "final_state", c.ball.final_state, "problem");
    c.ball.unsafe_below = number(p, "unsafe_input_below", c.ball.unsafe_below, "problem");
    c.ball.unsafe_above = number(p, "unsafe_input_above", c.ball.unsafe_above, "problem");
  }

  auto& pc = c.planner;
  if (root.contains("planner")) {
    const auto& p = root.at("planner");
    reject_unknown(p, "planner",
                   {"mode", "p_n_fw", "p_n_bw", "max_iterations", "delta", "delta_jump_pos", "reconstruction_enabled",
                    "seed", "init_samples"});
    const auto mode = parse_planner_mode(text(p, "mode", to_string(pc.mode), "planner"));
    if (!mode) invalid("planner.mode must be one of HyRRT, BiHyRRT, HyRRTConnect");
    pc.mode = *mode;
    pc.p_n_fw = number(p, "p_n_fw", pc.p_n_fw, "planner");
    pc.p_n_bw = number(p, "p_n_bw", pc.p_n_bw, "planner");
    pc.max_iterations = static_cast<int>(integer(p, "max_iterations", pc.max_iterations, "planner"));
    pc.delta = number(p, "delta", pc.delta, "planner");
    pc.delta_jump_pos = number(p, "delta_jump_pos", pc.delta_jump_pos, "planner");
    pc.reconstruction_enabled = boolean(p, "reconstruction_enabled", pc.reconstruction_enabled, "planner");
    const auto seed = integer(p, "seed", 0, "planner");
    if (seed < 0) invalid("planner.seed must be nonnegative");
    pc.seed = static_cast<std::uint64_t>(seed);
    pc.init_samples = static_cast<int>(integer(p, "init_samples", pc.init_samples, "planner"));
  }

  if (root.contains("simulation")) {
    const auto& s = root.at("simulation");
    reject_unknown(s, "simulation", {"step", "flow_duration_max", "event_tolerance", "jump_retries"});
    pc.simulation.step = number(s, "step", pc.simulation.step, "simulation");
    pc.simulation.event_tolerance = number(s, "event_tolerance", pc.simulation.event_tolerance, "simulation");
    pc.simulation.jump_retries = static_cast<int>(integer(s, "jump_retries", pc.simulation.jump_retries, "simulation"));
    c.ball.flow_duration_max = number(s, "flow_duration_max", c.ball.flow_duration_max, "simulation");
  }

  if (root.contains("validation")) {
    const auto& v = root.at("validation");
    reject_unknown(v, "validation",
                   {"set_margin", "jump_residual", "flow_residual_scale", "flow_residual_floor"});
    auto& t = pc.validation;
    t.set_margin = number(v, "set_margin", t.set_margin, "validation");
    t.jump_residual = number(v, "jump_residual", t.jump_residual, "validation");
    t.flow_residual_scale = number(v, "flow_residual_scale", t.flow_residual_scale, "validation");
    t.flow_residual_floor = number(v, "flow_residual_floor", t.flow_residual_floor, "validation");
  }

  if (root.contains("output")) {
    const auto& o = root.at("output");
    reject_unknown(o, "output", {"plan", "benchmark", "dump_trees"});
    c.output.plan = text(o, "plan", c.output.plan, "output");
    c.output.benchmark = text(o, "benchmark", c.output.benchmark, "output");
    c.output.dump_trees = boolean(o, "dump_trees", c.output.dump_trees, "output");
  }

  pc.check();
  if (c.ball.sampling_box.lower[0] > c.ball.sampling_box.upper[0] ||
      c.ball.sampling_box.lower[1] > c.ball.sampling_box.upper[1]) {
    invalid("system.sampling_box lower exceeds upper");
  }
  return c;
}

inline json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kConfigInvalid, "cannot open '" + path + "'");
  std::stringstream buf;
  buf << in.rdbuf();
  const auto text = buf.str();
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    throw Error(ErrorCode::kConfigInvalid, "'" + path + "' is not valid JSON: " + e.what());
  }
}

inline RunConfig load_run_config(const std::string& path) { return parse_run_config(read_json_file(path)); }

/// Ball planning problem, backward system and input libraries described by a config.
inline systems::BouncingBall build_problem(const RunConfig& c) {
  try {
    return systems::bouncing_ball(c.ball);
  } catch (const Error& e) {
    throw Error(ErrorCode::kConfigInvalid, std::string("system parameters rejected: ") + e.what());
  }
}

}  // namespace hyrrt::cli
