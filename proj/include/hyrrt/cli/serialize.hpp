#pragma once

/**
 * @file
 * @brief JSON form of solution pairs, planner results and search trees.
 *
 * Doubles are written in shortest round-trip form, so a pair read back from
 * its own output compares equal bit for bit.
 */

#include <json.hpp>

#include <optional>
#include <string>
#include <vector>

#include "hyrrt/cli/config.hpp"
#include "hyrrt/error.hpp"
#include "hyrrt/hybrid_time.hpp"
#include "hyrrt/planner.hpp"

namespace hyrrt::cli {

inline constexpr const char* kRunOutputFormat = "hyrrt-run-output";
inline constexpr int kRunOutputVersion = 1;

template <int Dim>
json to_json(const Vector<Dim>& v) {
  json a = json::array();
  for (int i = 0; i < Dim; ++i) a.push_back(v[i]);
  return a;
}

template <int Dim>
Vector<Dim> vector_from_json(const json& a, const std::string& where) {
  if (!a.is_array() || a.size() != static_cast<std::size_t>(Dim)) {
    throw Error(ErrorCode::kDimensionMismatch, where + " must be an array of " + std::to_string(Dim) + " numbers");
  }
  Vector<Dim> v;
  for (int i = 0; i < Dim; ++i) {
    if (!a[static_cast<std::size_t>(i)].is_number()) throw Error(ErrorCode::kConfigInvalid, where + " holds a non-number");
    v[i] = a[static_cast<std::size_t>(i)].template get<double>();
  }
  return v;
}

/// {state_dim, input_dim, domain: [{j, t_start, t_end}], phases: [{j, rows: [[t, x..., u...]]}]}
template <int N, int M>
json to_json(const SolutionPair<N, M>& psi) {
  json domain = json::array();
  json phases = json::array();
  for (int j = 0; j < psi.domain().size(); ++j) {
    const auto& iv = psi.domain().interval(j);
    domain.push_back({{"j", j}, {"t_start", iv.t_start}, {"t_end", iv.t_end}});
    const auto& xs = psi.arc().phase(j);
    const auto& us = psi.input().phase(j);
    json rows = json::array();
    for (std::size_t k = 0; k < xs.size(); ++k) {
      json row = json::array({xs.times[k]});
      for (int i = 0; i < N; ++i) row.push_back(xs.values[k][i]);
      for (int i = 0; i < M; ++i) row.push_back(us.values[k][i]);
      rows.push_back(std::move(row));
    }
    phases.push_back({{"j", j}, {"rows", std::move(rows)}});
  }
  return {{"state_dim", N}, {"input_dim", M}, {"domain", std::move(domain)}, {"phases", std::move(phases)}};
}

/// Inverse of to_json; malformed documents raise ConfigInvalid, DimensionMismatch or domain errors.
template <int N, int M>
SolutionPair<N, M> solution_pair_from_json(const json& doc) {
  auto bad = [](const std::string& what) { throw Error(ErrorCode::kConfigInvalid, "plan: " + what); };
  if (!doc.is_object()) bad("expected an object");
  for (const char* key : {"state_dim", "input_dim", "domain", "phases"}) {
    if (!doc.contains(key)) bad(std::string("missing '") + key + "'");
  }
  if (doc.at("state_dim") != N || doc.at("input_dim") != M) {
    throw Error(ErrorCode::kDimensionMismatch, "plan dimensions do not match the system");
  }
  const auto& dom = doc.at("domain");
  const auto& phs = doc.at("phases");
  if (!dom.is_array() || !phs.is_array() || dom.size() != phs.size() || dom.empty()) {
    bad("domain and phases must be nonempty arrays of equal length");
  }
  std::vector<TimeInterval> intervals;
  std::vector<Phase<N>> arc;
  std::vector<Phase<M>> input;
  for (std::size_t j = 0; j < dom.size(); ++j) {
    const auto& d = dom[j];
    const auto& p = phs[j];
    if (!d.is_object() || !d.contains("j") || !d.contains("t_start") || !d.contains("t_end") ||
        !d.at("t_start").is_number() || !d.at("t_end").is_number() || d.at("j") != j) {
      bad("domain entry " + std::to_string(j) + " is malformed");
    }
    if (!p.is_object() || !p.contains("rows") || !p.at("rows").is_array() || p.value("j", -1) != static_cast<int>(j)) {
      bad("phase " + std::to_string(j) + " is malformed");
    }
    intervals.push_back({d.at("t_start").get<double>(), d.at("t_end").get<double>()});
    Phase<N> xs;
    Phase<M> us;
    for (const auto& row : p.at("rows")) {
      if (!row.is_array() || row.size() != static_cast<std::size_t>(1 + N + M)) bad("row width mismatch");
      for (const auto& v : row) {
        if (!v.is_number()) bad("row holds a non-number");
      }
      const double t = row[0].get<double>();
      Vector<N> x;
      Vector<M> u;
      for (int i = 0; i < N; ++i) x[i] = row[static_cast<std::size_t>(1 + i)].get<double>();
      for (int i = 0; i < M; ++i) u[i] = row[static_cast<std::size_t>(1 + N + i)].get<double>();
      xs.times.push_back(t);
      xs.values.push_back(x);
      us.times.push_back(t);
      us.values.push_back(u);
    }
    arc.push_back(std::move(xs));
    input.push_back(std::move(us));
  }
  HybridTimeDomain domain(std::move(intervals));
  return SolutionPair<N, M>(HybridSignal<N>(domain, std::move(arc)), HybridSignal<M>(domain, std::move(input)));
}

template <int N, int M>
json to_json(const SearchTree<N, M>& tree) {
  json vertices = json::array();
  for (const auto& v : tree.vertices()) {
    vertices.push_back({{"id", v.id}, {"parent", v.parent}, {"state", to_json<N>(v.state)}});
  }
  json edges = json::array();
  for (const auto& e : tree.edges()) {
    const auto mx = e.pair.max();
    edges.push_back({{"from", e.from},
                     {"to", e.to},
                     {"kind", mx.j > 0 ? "jump" : "flow"},
                     {"duration", mx.t},
                     {"jumps", mx.j},
                     {"from_state", to_json<N>(e.pair.start_state())},
                     {"to_state", to_json<N>(e.pair.end_state())}});
  }
  return {{"direction", to_string(tree.direction())},
          {"roots", tree.root_ids()},
          {"vertices", std::move(vertices)},
          {"edges", std::move(edges)}};
}

/**
 * RunOutput document. Everything except the "timing" object is a pure function
 * of the configuration and seed.
 */
template <int N, int M>
json run_output(const PlanResult<N, M>& r, const PlannerConfig<N>& config, const Trees<N, M>* trees = nullptr) {
  const auto& p = r.provenance;
  json prov = {{"scenario", to_string(p.scenario)},
               {"fw_path", p.fw_path},
               {"bw_path", p.bw_path},
               {"u_star", p.u_star ? to_json<M>(*p.u_star) : json(nullptr)},
               {"reconstruction_applied", p.reconstruction_applied},
               {"endpoint_error", p.endpoint_error},
               {"seam_gap", p.seam_gap},
               {"backward_span", {{"t", p.backward_span.t}, {"j", p.backward_span.j}}},
               {"error_bound", p.error_bound ? json(*p.error_bound) : json(nullptr)}};
  json out = {{"format", kRunOutputFormat},
              {"version", kRunOutputVersion},
              {"status", to_string(r.status)},
              {"config",
               {{"mode", to_string(config.mode)},
                {"seed", config.seed},
                {"max_iterations", config.max_iterations},
                {"delta", config.delta},
                {"p_n_fw", config.p_n_fw},
                {"p_n_bw", config.p_n_bw},
                {"reconstruction_enabled", config.reconstruction_enabled}}},
              {"plan", r.plan ? to_json(*r.plan) : json(nullptr)},
              {"provenance", std::move(prov)},
              {"stats",
               {{"iterations", r.stats.iterations},
                {"vertices_fw", r.stats.vertices_fw},
                {"vertices_bw", r.stats.vertices_bw},
                {"vertices_total", r.stats.vertices_fw + r.stats.vertices_bw},
                {"rejected_assemblies", r.stats.rejected_assemblies}}},
              {"timing", {{"wall_time_s", r.stats.wall_time}}}};
  if (r.validation) {
    double worst_jump = 0.0;
    for (double v : r.validation->jump_residuals) worst_jump = std::max(worst_jump, v);
    out["validation"] = {{"valid", r.validation->valid},
                         {"worst_flow_residual", r.validation->worst_flow_residual},
                         {"worst_set_violation", r.validation->worst_set_violation},
                         {"worst_jump_residual", worst_jump}};
  }
  if (trees != nullptr) out["trees"] = {{"forward", to_json(trees->fw)}, {"backward", to_json(trees->bw)}};
  return out;
}

/// Copy of a RunOutput without its wall-clock fields.
inline json without_timing(json doc) {
  if (doc.is_object()) doc.erase("timing");
  return doc;
}

}  // namespace hyrrt::cli
