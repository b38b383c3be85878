#pragma once

/**
 * @file
 * @brief HyRRT-Connect: interleaved forward and backward tree growth, overlap
 * detection by state matching during flow (S1) or by a solved jump input (S2),
 * and assembly of the forward-time motion plan.
 */

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <optional>
#include <string>
#include <type_traits>
#include <utility>
#include <vector>

#include "hyrrt/error.hpp"
#include "hyrrt/hybrid_time.hpp"
#include "hyrrt/input_library.hpp"
#include "hyrrt/region.hpp"
#include "hyrrt/search_tree.hpp"
#include "hyrrt/simulation.hpp"
#include "hyrrt/system.hpp"
#include "hyrrt/validation.hpp"

namespace hyrrt {

enum class PlannerMode {
  kHyRRT,         ///< forward tree only
  kBiHyRRT,       ///< both trees, S1 connections only
  kHyRRTConnect,  ///< both trees, S1 and S2 connections
};

inline const char* to_string(PlannerMode m) {
  switch (m) {
    case PlannerMode::kHyRRT:
      return "HyRRT";
    case PlannerMode::kBiHyRRT:
      return "BiHyRRT";
    case PlannerMode::kHyRRTConnect:
      return "HyRRTConnect";
  }
  return "Unknown";
}

inline std::optional<PlannerMode> parse_planner_mode(const std::string& s) {
  if (s == "HyRRT") return PlannerMode::kHyRRT;
  if (s == "BiHyRRT") return PlannerMode::kBiHyRRT;
  if (s == "HyRRTConnect") return PlannerMode::kHyRRTConnect;
  return std::nullopt;
}

template <int N>
using StatePredicate = std::function<bool(const Vector<N>&)>;

template <int N>
struct PlannerConfig {
  PlannerMode mode = PlannerMode::kHyRRTConnect;
  double p_n_fw = 0.5;
  double p_n_bw = 0.5;
  int max_iterations = 2000;     ///< K
  double delta = 0.2;            ///< S1 matching tolerance
  double delta_jump_pos = 1e-9;  ///< positional tolerance handed to the jump-input solver
  /// Nearest-neighbor constraint sets; empty means the closure of C' (X_c) or D' (X_d) of that tree's system.
  StatePredicate<N> X_c_fw, X_d_fw, X_c_bw, X_d_bw;
  bool reconstruction_enabled = true;
  std::uint64_t seed = 0;
  int init_samples = 1;
  SimulationOptions simulation;
  ValidationTolerances validation;

  void check() const {
    auto fail = [](const std::string& what) { throw Error(ErrorCode::kConfigInvalid, what); };
    if (!(p_n_fw > 0.0 && p_n_fw < 1.0)) fail("p_n_fw must lie in (0, 1)");
    if (!(p_n_bw > 0.0 && p_n_bw < 1.0)) fail("p_n_bw must lie in (0, 1)");
    if (max_iterations < 0) fail("max_iterations must be nonnegative");
    if (!(delta >= 0.0)) fail("delta must be nonnegative");
    if (!(delta_jump_pos >= 0.0)) fail("delta_jump_pos must be nonnegative");
    if (init_samples < 1) fail("init_samples must be at least 1");
    if (!(simulation.step > 0.0)) fail("simulation step must be positive");
    if (!(simulation.event_tolerance > 0.0)) fail("event tolerance must be positive");
  }
};

enum class PlanStatus { kFound, kFailure };

inline const char* to_string(PlanStatus s) { return s == PlanStatus::kFound ? "Found" : "Failure"; }

enum class Scenario {
  kNone,
  kGoalReached,  ///< forward tree alone reached Xf (HyRRT)
  kS1,           ///< matching states during flow
  kS2,           ///< connecting jump with a solved input
};

inline const char* to_string(Scenario s) {
  switch (s) {
    case Scenario::kNone:
      return "none";
    case Scenario::kGoalReached:
      return "goal_reached";
    case Scenario::kS1:
      return "S1";
    case Scenario::kS2:
      return "S2";
  }
  return "unknown";
}

template <int M>
struct Provenance {
  Scenario scenario = Scenario::kNone;
  std::vector<int> fw_path;
  std::vector<int> bw_path;
  std::optional<Vector<M>> u_star;
  bool reconstruction_applied = false;
  double endpoint_error = 0.0;  ///< distance from the plan's final state to Xf
  double seam_gap = 0.0;        ///< |x_fw - x_bw| at the connection
  HybridTime backward_span;     ///< max dom of the reversed backward partial plan
  std::optional<double> error_bound;
};

struct PlannerStats {
  int iterations = 0;
  int vertices_fw = 0;
  int vertices_bw = 0;
  int rejected_assemblies = 0;  ///< connections whose assembled plan failed validation or safety
  double wall_time = 0.0;       ///< seconds; excluded from determinism comparisons
};

template <int N, int M>
struct PlanResult {
  PlanStatus status = PlanStatus::kFailure;
  std::optional<SolutionPair<N, M>> plan;
  Provenance<M> provenance;
  PlannerStats stats;
  std::optional<ValidationReport> validation;

  bool found() const { return status == PlanStatus::kFound; }
};

enum class ExtendStatus { kAdvanced, kTrapped };

template <int N, int M>
struct Trees {
  SearchTree<N, M> fw{TreeDirection::kForward};
  SearchTree<N, M> bw{TreeDirection::kBackward};
};

/// Uniform draw from one of a system's bounded state samplers.
template <int N>
Vector<N> random_state(const Sampler<N>& region, Rng& rng) {
  return region(rng);
}

/// One step of tree growth toward x_rand; returns the new vertex id when Advanced.
template <int N, int M>
std::pair<ExtendStatus, int> extend(SearchTree<N, M>& tree, const Vector<N>& x_rand, const InputLibrary<M>& library,
                                    const HybridSystem<N, M>& sys, const std::type_identity_t<UnsafeSet<N, M>>& unsafe,
                                    const std::type_identity_t<StatePredicate<N>>& constraint, double flow_probability,
                                    Rng& rng,
                                    const SimulationOptions& opt = {}) {
  const auto v_cur = nearest_neighbor(x_rand, tree, constraint);
  if (!v_cur) return {ExtendStatus::kTrapped, -1};
  auto r = new_state(tree.vertex(*v_cur).state, library, sys, unsafe, flow_probability, rng, opt);
  if (!r.generated) return {ExtendStatus::kTrapped, -1};
  return {ExtendStatus::kAdvanced, tree.add_child(*v_cur, std::move(*r.pair))};
}

/// A pair of paths (vertex ids root..leaf) satisfying S1 or S2.
template <int M>
struct Connection {
  Scenario scenario = Scenario::kNone;
  int fw_leaf = -1;
  int bw_leaf = -1;
  std::optional<Vector<M>> u_star;
  double gap = 0.0;
};

namespace detail {

template <int N, int M>
bool purely_continuous(const SolutionPair<N, M>& p) {
  return p.domain().is_purely_continuous();
}

// C2 / C4: consecutive purely continuous edges meet inside C.
template <int N, int M>
bool junctions_in_flow_set(const SearchTree<N, M>& tree, const std::vector<int>& path,
                           const HybridSystem<N, M>& sys) {
  for (std::size_t i = 2; i < path.size(); ++i) {
    const auto& a = tree.edge_into(path[i - 1]).pair;
    const auto& b = tree.edge_into(path[i]).pair;
    if (purely_continuous(a) && purely_continuous(b) && !sys.in_flow_set(b.start_state(), b.start_input())) {
      return false;
    }
  }
  return true;
}

}  // namespace detail

/**
 * Checks the path pair ending at (fw_leaf, bw_leaf) against C1-C4 and C6; C5
 * (with tolerance delta) is the caller's distance test.
 */
template <int N, int M>
bool s1_conditions(const Trees<N, M>& trees, int fw_leaf, int bw_leaf, const MotionPlanningProblem<N, M>& problem,
                   const HybridSystem<N, M>& bw_sys) {
  const auto fw_path = trees.fw.path_to(fw_leaf);
  const auto bw_path = trees.bw.path_to(bw_leaf);
  if (!problem.initial.contains(trees.fw.vertex(fw_path.front()).state)) return false;  // C1
  if (!problem.goal.contains(trees.bw.vertex(bw_path.front()).state)) return false;     // C3
  if (!detail::junctions_in_flow_set(trees.fw, fw_path, problem.system)) return false;  // C2
  if (!detail::junctions_in_flow_set(trees.bw, bw_path, bw_sys)) return false;          // C4
  if (fw_path.size() > 1 && bw_path.size() > 1) {                                       // C6
    const auto& e_fw = trees.fw.edge_into(fw_leaf).pair;
    const auto& e_bw = trees.bw.edge_into(bw_leaf).pair;
    if (detail::purely_continuous(e_fw) && detail::purely_continuous(e_bw)) {
      const auto& last_in = e_bw.input().phase(0);
      const auto& u = last_in.values[last_in.size() - 2];
      if (!problem.system.in_flow_set(e_bw.end_state(), u)) return false;
    }
  }
  return true;
}

/**
 * Looks for a connection involving the newly added vertex `new_id` of the tree
 * given by `in_forward`: S1 against every vertex of the other tree (closest
 * qualifying match, ties to the lowest id), then S2 when enabled.
 */
template <int N, int M>
std::optional<Connection<M>> solution_check(const Trees<N, M>& trees, bool in_forward, int new_id,
                                            const MotionPlanningProblem<N, M>& problem,
                                            const HybridSystem<N, M>& bw_sys, const PlannerConfig<N>& config) {
  const auto& mine = in_forward ? trees.fw : trees.bw;
  const auto& other = in_forward ? trees.bw : trees.fw;
  const auto& x_new = mine.vertex(new_id).state;
  auto leaves = [&](int other_id) {
    return in_forward ? std::pair{new_id, other_id} : std::pair{other_id, new_id};
  };

  std::optional<Connection<M>> best;
  for (const auto& v : other.vertices()) {
    const double gap = (v.state - x_new).norm();
    if (!(gap <= config.delta)) continue;
    if (best && !(gap < best->gap)) continue;
    const auto [fw_leaf, bw_leaf] = leaves(v.id);
    if (!s1_conditions(trees, fw_leaf, bw_leaf, problem, bw_sys)) continue;
    best = Connection<M>{Scenario::kS1, fw_leaf, bw_leaf, std::nullopt, gap};
  }
  if (best || config.mode != PlannerMode::kHyRRTConnect || !problem.system.jump_input_solver) return best;

  const auto& solver = *problem.system.jump_input_solver;
  for (const auto& v : other.vertices()) {
    const auto [fw_leaf, bw_leaf] = leaves(v.id);
    const auto& x_fw = trees.fw.vertex(fw_leaf).state;
    const auto& x_bw = trees.bw.vertex(bw_leaf).state;
    for (const auto& u : solver(x_fw, x_bw, config.delta_jump_pos)) {
      if (!problem.system.in_jump_set(x_fw, u)) continue;
      if (problem.unsafe && problem.unsafe(x_fw, u)) continue;
      if (!problem.initial.contains(trees.fw.vertex(trees.fw.path_to(fw_leaf).front()).state)) continue;
      if (!problem.goal.contains(trees.bw.vertex(trees.bw.path_to(bw_leaf).front()).state)) continue;
      return Connection<M>{Scenario::kS2, fw_leaf, bw_leaf, u, (x_fw - x_bw).norm()};
    }
  }
  return std::nullopt;
}

template <int N, int M>
struct AssembledPlan {
  SolutionPair<N, M> plan;
  Provenance<M> provenance;
  ValidationReport validation;
};

/**
 * Builds the forward-time plan for a connection: psi_fw | psi_bw' (S1, or its
 * reconstruction when enabled) or psi_fw | jump(u*) | psi_bw' (S2), then
 * validates it against the forward system and the unsafe set.
 *
 * A plan that is not reconstructed carries the S1 gap as an admissible
 * discontinuity; a reconstructed plan follows the backward plan's hybrid time
 * domain rather than C and D, so its set-membership tolerance is widened to the
 * reconstruction error bound when Lipschitz constants are known.
 */
template <int N, int M>
AssembledPlan<N, M> assemble_plan(const Trees<N, M>& trees, const Connection<M>& c,
                                  const MotionPlanningProblem<N, M>& problem, const PlannerConfig<N>& config) {
  const auto& sys = problem.system;
  AssembledPlan<N, M> out;
  auto& prov = out.provenance;
  prov.scenario = c.scenario;
  prov.fw_path = trees.fw.path_to(c.fw_leaf);
  prov.u_star = c.u_star;
  prov.seam_gap = c.gap;

  const auto psi_fw = trees.fw.path_pair(c.fw_leaf);
  ValidationTolerances tol = config.validation;

  if (c.scenario == Scenario::kGoalReached) {
    out.plan = psi_fw;
  } else {
    prov.bw_path = trees.bw.path_to(c.bw_leaf);
    // A backward path that is only a root carries no input; hold the forward plan's last one.
    const auto rev = reverse(trees.bw.path_pair(c.bw_leaf, psi_fw.input().back()));
    prov.backward_span = rev.max();
    if (c.scenario == Scenario::kS1 && sys.lipschitz && sys.lipschitz->flow_x > 0.0 && sys.lipschitz->jump_x > 0.0) {
      prov.error_bound =
          reconstruction_error_bound(sys.lipschitz->flow_x, sys.lipschitz->jump_x, rev.max().t, rev.max().j, c.gap);
    }
    if (c.scenario == Scenario::kS1) {
      if (config.reconstruction_enabled && !rev.is_trivial()) {
        const auto sim = reconstruct(sys, psi_fw.end_state(), rev.input(), &rev.arc());
        out.plan = concatenate(psi_fw, sim);
        prov.reconstruction_applied = true;
        if (prov.error_bound) tol.set_margin = std::max(tol.set_margin, *prov.error_bound);
      } else {
        out.plan = concatenate(psi_fw, rev);
        tol.continuity_gap = std::max(tol.continuity_gap, c.gap);
      }
    } else {
      const auto& x_fw = psi_fw.end_state();
      const auto jump = SolutionPair<N, M>::jump(x_fw, rev.start_state(), *c.u_star);
      prov.seam_gap = sys.jump_map.distance(x_fw, *c.u_star, rev.start_state());
      out.plan = concatenate(concatenate(psi_fw, jump), rev);
    }
  }

  prov.endpoint_error = problem.goal.distance(out.plan.end_state());
  out.validation = validate_solution_pair(out.plan, sys, tol);
  if (!out.validation.valid) {
    throw Error(ErrorCode::kAssembledPlanInvalid, "assembled plan failed validation: " + out.validation.summary());
  }
  if (!problem.initial.contains(out.plan.start_state())) {
    throw Error(ErrorCode::kAssembledPlanInvalid, "assembled plan does not start in X0");
  }
  if (intersects_unsafe(out.plan, UnsafeSet<N, M>(problem.unsafe))) {
    throw Error(ErrorCode::kAssembledPlanInvalid, "assembled plan intersects the unsafe set");
  }
  return out;
}

/// Algorithm state of one planning run; exposes the trees after the run.
template <int N, int M>
class Planner {
 public:
  Planner(MotionPlanningProblem<N, M> problem, HybridSystem<N, M> backward, InputLibrary<M> fw_inputs,
          InputLibrary<M> bw_inputs, PlannerConfig<N> config)
      : problem_(std::move(problem)),
        backward_(std::move(backward)),
        fw_inputs_(std::move(fw_inputs)),
        bw_inputs_(std::move(bw_inputs)),
        config_(std::move(config)) {
    config_.check();
    auto state_set = [](const HybridSystem<N, M>& s, bool flow) -> StatePredicate<N> {
      if (flow) return [&s](const Vector<N>& x) { return s.in_flow_state_set(x); };
      return [&s](const Vector<N>& x) { return s.in_jump_state_set(x); };
    };
    if (!config_.X_c_fw) config_.X_c_fw = state_set(problem_.system, true);
    if (!config_.X_d_fw) config_.X_d_fw = state_set(problem_.system, false);
    if (!config_.X_c_bw) config_.X_c_bw = state_set(backward_, true);
    if (!config_.X_d_bw) config_.X_d_bw = state_set(backward_, false);
  }

  Planner(const Planner&) = delete;
  Planner& operator=(const Planner&) = delete;

  const Trees<N, M>& trees() const { return trees_; }
  const PlannerConfig<N>& config() const { return config_; }

  /// Runs from a fresh engine seeded with config.seed.
  PlanResult<N, M> run() {
    Rng rng(config_.seed);
    return run(rng);
  }

  PlanResult<N, M> run(Rng& rng) {
    const auto start = std::chrono::steady_clock::now();
    trees_ = Trees<N, M>{};
    PlanResult<N, M> result;
    const bool bidirectional = config_.mode != PlannerMode::kHyRRT;

    for (int i = 0; i < config_.init_samples; ++i) trees_.fw.add_root(problem_.initial.sample(rng));
    if (bidirectional) {
      for (int i = 0; i < config_.init_samples; ++i) trees_.bw.add_root(problem_.goal.sample(rng));
    }

    const UnsafeSet<N, M> unsafe(problem_.unsafe);
    auto grow = [&](SearchTree<N, M>& tree, const HybridSystem<N, M>& sys, const InputLibrary<M>& lib, double p_n,
                    const StatePredicate<N>& X_c, const StatePredicate<N>& X_d) {
      const double r = uniform(rng, 0.0, 1.0);
      const bool flow = r <= p_n;
      const Vector<N> x_rand = random_state(flow ? sys.sample_flow_state : sys.sample_jump_state, rng);
      return extend(tree, x_rand, lib, sys, unsafe, flow ? X_c : X_d, p_n, rng, config_.simulation);
    };

    for (int k = 1; k <= config_.max_iterations; ++k) {
      result.stats.iterations = k;
      const auto [fw_status, fw_new] =
          grow(trees_.fw, problem_.system, fw_inputs_, config_.p_n_fw, config_.X_c_fw, config_.X_d_fw);
      std::pair<ExtendStatus, int> bw{ExtendStatus::kTrapped, -1};
      if (bidirectional) {
        bw = grow(trees_.bw, backward_, bw_inputs_, config_.p_n_bw, config_.X_c_bw, config_.X_d_bw);
      }

      std::vector<Connection<M>> candidates;
      if (fw_status == ExtendStatus::kAdvanced) {
        if (!bidirectional) {
          const double d = problem_.goal.distance(trees_.fw.vertex(fw_new).state);
          if (d <= config_.delta) candidates.push_back({Scenario::kGoalReached, fw_new, -1, std::nullopt, d});
        } else if (auto c = solution_check(trees_, true, fw_new, problem_, backward_, config_)) {
          candidates.push_back(*c);
        }
      }
      if (bw.first == ExtendStatus::kAdvanced) {
        if (auto c = solution_check(trees_, false, bw.second, problem_, backward_, config_)) candidates.push_back(*c);
      }

      for (const auto& c : candidates) {
        try {
          auto assembled = assemble_plan(trees_, c, problem_, config_);
          result.status = PlanStatus::kFound;
          result.plan = std::move(assembled.plan);
          result.provenance = std::move(assembled.provenance);
          result.validation = std::move(assembled.validation);
          break;
        } catch (const Error& e) {
          if (e.code() != ErrorCode::kAssembledPlanInvalid) throw;
          ++result.stats.rejected_assemblies;
        }
      }
      if (result.found()) break;
    }

    result.stats.vertices_fw = static_cast<int>(trees_.fw.size());
    result.stats.vertices_bw = static_cast<int>(trees_.bw.size());
    result.stats.wall_time = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return result;
  }

 private:
  MotionPlanningProblem<N, M> problem_;
  HybridSystem<N, M> backward_;
  InputLibrary<M> fw_inputs_;
  InputLibrary<M> bw_inputs_;
  PlannerConfig<N> config_;
  Trees<N, M> trees_;
};

/// One seeded planning run (engine seeded from config.seed).
template <int N, int M>
PlanResult<N, M> hyrrt_connect(const MotionPlanningProblem<N, M>& problem, const HybridSystem<N, M>& backward,
                               const InputLibrary<M>& fw_inputs, const InputLibrary<M>& bw_inputs,
                               const PlannerConfig<N>& config) {
  Planner<N, M> planner(problem, backward, fw_inputs, bw_inputs, config);
  return planner.run();
}

}  // namespace hyrrt
