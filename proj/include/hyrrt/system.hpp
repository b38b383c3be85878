#pragma once

/**
 * @file
 * @brief Data (C, f, D, g) of a hybrid system with inputs, plus the hooks the
 * planner needs: state samplers for C' and D', an optional jump-input solver
 * and optional Lipschitz constants.
 *
 * Sets are described by signed margins: a margin <= 0 means the point lies in
 * the closure of the set. Membership tests accept margins up to the system's
 * membership tolerance so that event-located states on a boundary count.
 */

#include <functional>
#include <limits>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "hyrrt/hybrid_time.hpp"
#include "hyrrt/region.hpp"

namespace hyrrt {

struct LipschitzConstants {
  double flow_x = 0.0;  ///< K_x^f
  double flow_u = 0.0;  ///< K_u^f
  double jump_x = 0.0;  ///< K_x^g
  double jump_u = 0.0;  ///< K_u^g
};

/// Possibly set-valued jump map.
template <int N, int M>
struct JumpMap {
  using State = Vector<N>;
  using Input = Vector<M>;

  /// Finite enumeration of g(x, u); empty when the image is a continuum or undefined.
  std::function<std::vector<State>(const State&, const Input&)> successors;
  /// One random element of g(x, u).
  std::function<std::optional<State>(const State&, const Input&, Rng&)> sample;
  /// Element of g(x, u) closest to a target.
  std::function<std::optional<State>(const State&, const Input&, const State&)> nearest;

  static JumpMap single_valued(std::function<State(const State&, const Input&)> g) {
    return JumpMap{[g](const State& x, const Input& u) { return std::vector<State>{g(x, u)}; },
                   [g](const State& x, const Input& u, Rng&) { return std::optional<State>(g(x, u)); },
                   [g](const State& x, const Input& u, const State&) { return std::optional<State>(g(x, u)); }};
  }

  /// Distance from target to g(x, u); infinity when g(x, u) is empty.
  double distance(const State& x, const Input& u, const State& target) const {
    const auto z = nearest(x, u, target);
    if (!z) return std::numeric_limits<double>::infinity();
    return (*z - target).norm();
  }
};

template <int N, int M>
struct HybridSystem {
  using State = Vector<N>;
  using Input = Vector<M>;
  using Margin = std::function<double(const State&, const Input&)>;
  using StateMargin = std::function<double(const State&)>;
  /// Inputs u with to = g(from, u) and (from, u) in D; tol bounds positional mismatch.
  using JumpInputSolver = std::function<std::vector<Input>(const State& from, const State& to, double tol)>;

  static constexpr int kStateDim = N;
  static constexpr int kInputDim = M;

  std::string name;
  std::function<State(const State&, const Input&)> flow_map;
  JumpMap<N, M> jump_map;
  Margin flow_margin;
  Margin jump_margin;
  StateMargin flow_state_margin;  ///< projection C' of C onto the state space
  StateMargin jump_state_margin;  ///< projection D' of D onto the state space
  Sampler<N> sample_flow_state;   ///< bounded sampler for the closure of C'
  Sampler<N> sample_jump_state;   ///< bounded sampler for D'
  std::optional<JumpInputSolver> jump_input_solver;
  std::optional<LipschitzConstants> lipschitz;
  double membership_tolerance = 1e-9;

  bool in_flow_set(const State& x, const Input& u) const { return flow_margin(x, u) <= membership_tolerance; }
  bool in_jump_set(const State& x, const Input& u) const { return jump_margin(x, u) <= membership_tolerance; }
  bool in_flow_state_set(const State& x) const { return flow_state_margin(x) <= membership_tolerance; }
  bool in_jump_state_set(const State& x) const { return jump_state_margin(x) <= membership_tolerance; }
};

/// Preimage data the generic backward construction cannot derive on its own.
template <int N, int M>
struct JumpPreimage {
  /// x, u -> { z : x = g(z, u), (z, u) in D } of the forward system.
  JumpMap<N, M> map;
  /// Margin of { (x, u) : preimage nonempty }.
  typename HybridSystem<N, M>::Margin margin;
  /// Margin of the state projection of that set.
  typename HybridSystem<N, M>::StateMargin state_margin;
  Sampler<N> sample_state;
  std::optional<double> jump_x_lipschitz;
  std::optional<double> jump_u_lipschitz;
};

/// Backward-in-time system: same flow set, negated flow map, preimage jump map.
template <int N, int M>
HybridSystem<N, M> backward_system(const HybridSystem<N, M>& fw, JumpPreimage<N, M> preimage) {
  HybridSystem<N, M> bw;
  bw.name = fw.name + "/backward";
  bw.flow_map = [f = fw.flow_map](const Vector<N>& x, const Vector<M>& u) -> Vector<N> { return -f(x, u); };
  bw.jump_map = std::move(preimage.map);
  bw.flow_margin = fw.flow_margin;
  bw.jump_margin = std::move(preimage.margin);
  bw.flow_state_margin = fw.flow_state_margin;
  bw.jump_state_margin = std::move(preimage.state_margin);
  bw.sample_flow_state = fw.sample_flow_state;
  bw.sample_jump_state = std::move(preimage.sample_state);
  bw.membership_tolerance = fw.membership_tolerance;
  if (fw.lipschitz) {
    LipschitzConstants k;
    k.flow_x = fw.lipschitz->flow_x;
    k.flow_u = fw.lipschitz->flow_u;
    k.jump_x = preimage.jump_x_lipschitz.value_or(0.0);
    k.jump_u = preimage.jump_u_lipschitz.value_or(0.0);
    bw.lipschitz = k;
  }
  return bw;
}

/// Motion planning problem (X0, Xf, Xu, H) for the forward system H.
template <int N, int M>
struct MotionPlanningProblem {
  HybridSystem<N, M> system;
  StateRegion<N> initial;
  StateRegion<N> goal;
  std::function<bool(const Vector<N>&, const Vector<M>&)> unsafe;
};

}  // namespace hyrrt
