#pragma once

/**
 * @file
 * @brief Propagation of solution pairs: RK4 flow with event location, jumps,
 * the tree extension primitive, and forward re-simulation of a reversed input
 * on its own hybrid time domain.
 */

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <optional>
#include <utility>
#include <vector>

#include "hyrrt/error.hpp"
#include "hyrrt/hybrid_time.hpp"
#include "hyrrt/input_library.hpp"
#include "hyrrt/region.hpp"
#include "hyrrt/system.hpp"

namespace hyrrt {

struct SimulationOptions {
  double step = 1e-3;
  double event_tolerance = 1e-9;  ///< |margin| at a located flow-set exit
  int jump_retries = 16;          ///< input draws before a jump extension gives up
  int max_bisections = 200;
};

enum class FlowEvent {
  kDurationReached,
  kExitedFlowSet,
  kEnteredJumpSet,
};

inline const char* to_string(FlowEvent e) {
  switch (e) {
    case FlowEvent::kDurationReached:
      return "DurationReached";
    case FlowEvent::kExitedFlowSet:
      return "ExitedFlowSet";
    case FlowEvent::kEnteredJumpSet:
      return "EnteredJumpSet";
  }
  return "Unknown";
}

template <int N, int M>
struct FlowSegment {
  SolutionPair<N, M> pair;
  FlowEvent event = FlowEvent::kDurationReached;
};

template <int N, int M>
Vector<N> rk4_step(const HybridSystem<N, M>& sys, const Vector<N>& x, const Vector<M>& u, double h) {
  const Vector<N> k1 = sys.flow_map(x, u);
  const Vector<N> k2 = sys.flow_map(x + 0.5 * h * k1, u);
  const Vector<N> k3 = sys.flow_map(x + 0.5 * h * k2, u);
  const Vector<N> k4 = sys.flow_map(x + h * k3, u);
  return x + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
}

namespace detail {

// Bisects [0, h] for the first time the flow from x satisfies `crossed` (false
// at 0, true at h) until `done` holds. Returns the last located time before the
// crossing, or the first one after it when `land_after` is set.
template <int N, int M, class Done, class Crossed>
std::pair<double, Vector<N>> bisect(const HybridSystem<N, M>& sys, const Vector<N>& x, const Vector<M>& u, double h,
                                    const SimulationOptions& opt, Done&& done, bool land_after, Crossed&& crossed) {
  double lo = 0.0;
  double hi = h;
  Vector<N> x_lo = x;
  Vector<N> x_hi = rk4_step(sys, x, u, h);
  for (int it = 0; it < opt.max_bisections; ++it) {
    if (done(x_lo, x_hi, hi - lo)) break;
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    const Vector<N> x_mid = rk4_step(sys, x, u, mid);
    if (crossed(x_mid)) {
      hi = mid;
      x_hi = x_mid;
    } else {
      lo = mid;
      x_lo = x_mid;
    }
  }
  return land_after ? std::pair{hi, x_hi} : std::pair{lo, x_lo};
}

}  // namespace detail

/**
 * Integrates the flow from x0 under a constant input for at most max_duration.
 *
 * Steps of fixed size are accepted while the state stays in the closure of C.
 * When a step leaves it, the exit is located by bisection and the segment ends
 * at the last located point inside, whose margin is within event_tolerance of
 * the boundary. With seek_jump set, the segment also stops on first entering D.
 */
template <int N, int M>
FlowSegment<N, M> integrate_flow(const HybridSystem<N, M>& sys, const Vector<N>& x0, const Vector<M>& u,
                                 double max_duration, const SimulationOptions& opt = {}, bool seek_jump = false) {
  if (!(max_duration > 0.0)) throw Error(ErrorCode::kParameterOutOfRange, "max_duration must be positive");
  if (!(opt.step > 0.0)) throw Error(ErrorCode::kParameterOutOfRange, "step must be positive");
  if (!sys.in_flow_set(x0, u)) throw Error(ErrorCode::kInitialStateOutsideFlowSet, "flow must start in closure(C)");

  std::vector<double> times{0.0};
  std::vector<Vector<N>> states{x0};
  FlowEvent event = FlowEvent::kDurationReached;
  const double tol = sys.membership_tolerance;
  const bool started_in_jump_set = sys.jump_margin(x0, u) <= tol;

  Vector<N> x = x0;
  double t = 0.0;
  for (long k = 1; t < max_duration; ++k) {
    double t_next = static_cast<double>(k) * opt.step;
    if (t_next >= max_duration || max_duration - t_next < 1e-9 * opt.step) t_next = max_duration;
    const double h = t_next - t;
    const Vector<N> x_next = rk4_step(sys, x, u, h);

    if (sys.flow_margin(x_next, u) > 0.0) {
      auto [tau, x_hit] = detail::bisect(
          sys, x, u, h, opt,
          [&](const Vector<N>& lo, const Vector<N>&, double) {
            return sys.flow_margin(lo, u) >= -opt.event_tolerance;
          },
          /*land_after=*/false, [&](const Vector<N>& z) { return sys.flow_margin(z, u) > 0.0; });
      if (tau > 0.0 && t + tau > t) {
        times.push_back(t + tau);
        states.push_back(x_hit);
      }
      event = FlowEvent::kExitedFlowSet;
      break;
    }
    if (seek_jump && !started_in_jump_set && sys.jump_margin(x_next, u) <= tol) {
      auto [tau, x_hit] = detail::bisect(
          sys, x, u, h, opt, [](const Vector<N>&, const Vector<N>&, double width) { return width <= 1e-13; },
          /*land_after=*/true, [&](const Vector<N>& z) { return sys.jump_margin(z, u) <= tol; });
      times.push_back(t + tau);
      states.push_back(x_hit);
      event = FlowEvent::kEnteredJumpSet;
      break;
    }
    times.push_back(t_next);
    states.push_back(x_next);
    x = x_next;
    t = t_next;
  }

  const double end = times.back();
  std::vector<Vector<M>> inputs(times.size(), u);
  auto domain = HybridTimeDomain::flow(end);
  HybridSignal<N> arc(domain, {Phase<N>{times, std::move(states)}});
  HybridSignal<M> input(domain, {Phase<M>{std::move(times), std::move(inputs)}});
  return {SolutionPair<N, M>(std::move(arc), std::move(input)), event};
}

/// One successor of x under g(x, u): uniform among enumerable successors, else drawn from the map's sampler.
template <int N, int M>
Vector<N> apply_jump(const HybridSystem<N, M>& sys, const Vector<N>& x, const Vector<M>& u, Rng& rng) {
  if (!sys.in_jump_set(x, u)) throw Error(ErrorCode::kNotInJumpSet, "jump requested outside D");
  const auto succ = sys.jump_map.successors(x, u);
  if (succ.size() == 1) return succ.front();
  if (!succ.empty()) {
    std::uniform_int_distribution<std::size_t> pick(0, succ.size() - 1);
    return succ[pick(rng)];
  }
  if (auto z = sys.jump_map.sample(x, u, rng)) return *z;
  throw Error(ErrorCode::kJumpMapUndefined, "g(x, u) is empty");
}

template <int N, int M>
struct NewStateResult {
  bool generated = false;
  Vector<N> x_new = Vector<N>::Zero();
  std::optional<SolutionPair<N, M>> pair;
};

template <int N, int M>
using UnsafeSet = std::function<bool(const Vector<N>&, const Vector<M>&)>;

template <int N, int M>
bool intersects_unsafe(const SolutionPair<N, M>& psi, const UnsafeSet<N, M>& unsafe) {
  if (!unsafe) return false;
  for (int j = 0; j < psi.domain().size(); ++j) {
    const auto& xs = psi.arc().phase(j);
    const auto& us = psi.input().phase(j);
    for (std::size_t k = 0; k < xs.size(); ++k) {
      if (unsafe(xs.values[k], us.values[k])) return true;
    }
  }
  return false;
}

/**
 * Extends from a vertex state by a random flow (state in closure(C') only), a
 * random jump (state in D' only) or a coin flip with flow probability
 * flow_probability (state in both). The result is rejected when it is trivial
 * or touches the unsafe set.
 */
template <int N, int M>
NewStateResult<N, M> new_state(const Vector<N>& x, const InputLibrary<M>& library, const HybridSystem<N, M>& sys,
                               const UnsafeSet<N, M>& unsafe, double flow_probability, Rng& rng,
                               const SimulationOptions& opt = {}) {
  NewStateResult<N, M> out;
  const bool can_flow = sys.in_flow_state_set(x);
  const bool can_jump = sys.in_jump_state_set(x);
  if (!can_flow && !can_jump) return out;

  bool flow = can_flow;
  if (can_flow && can_jump) flow = uniform(rng, 0.0, 1.0) <= flow_probability;

  if (flow) {
    const double duration = library.sample_flow_duration(rng);
    std::optional<Vector<M>> u;
    for (int attempt = 0; attempt < std::max(1, opt.jump_retries) && !u; ++attempt) {
      Vector<M> cand = library.sample_flow_value(rng);
      if (sys.in_flow_set(x, cand)) u = cand;
    }
    if (!u) return out;
    out.pair = integrate_flow(sys, x, *u, duration, opt).pair;
  } else {
    std::optional<Vector<M>> u;
    for (int attempt = 0; attempt < std::max(1, opt.jump_retries) && !u; ++attempt) {
      Vector<M> cand = library.sample_jump_value(rng);
      if (sys.in_jump_set(x, cand)) u = cand;
    }
    if (!u) return out;
    out.pair = SolutionPair<N, M>::jump(x, apply_jump(sys, x, *u, rng), *u);
  }

  if (out.pair->is_trivial() || intersects_unsafe(*out.pair, unsafe)) return out;
  out.generated = true;
  out.x_new = out.pair->end_state();
  return out;
}

/// Jump instants {(t, j) : (t, j + 1) in dom} and flow spans of positive length of a domain.
struct ReconstructionTemplate {
  std::vector<HybridTime> jump_instants;
  std::vector<std::pair<int, TimeInterval>> flow_spans;

  static ReconstructionTemplate from(const HybridTimeDomain& d) {
    ReconstructionTemplate r;
    for (int j = 0; j < d.size(); ++j) {
      const auto& iv = d.interval(j);
      if (iv.t_end > iv.t_start) r.flow_spans.emplace_back(j, iv);
      if (j < d.jumps()) r.jump_instants.push_back({iv.t_end, j});
    }
    return r;
  }
};

/**
 * Re-simulates the forward system from `start` under a reversed input, flowing
 * and jumping when its hybrid time domain says so rather than when the state is
 * in C or D. The result has exactly the input's domain and sample grid.
 *
 * When g is set-valued at a jump the successor closest to the matching sample
 * of `reference` (typically the reversed backward arc) is used.
 */
template <int N, int M>
SolutionPair<N, M> reconstruct(const HybridSystem<N, M>& sys, const Vector<N>& start,
                               const HybridSignal<M>& reversed_input, const HybridSignal<N>* reference = nullptr) {
  const auto& dom = reversed_input.domain();
  if (reference != nullptr && !(reference->domain() == dom)) {
    throw Error(ErrorCode::kDimensionMismatch, "reference arc domain differs from the input domain");
  }
  std::vector<Phase<N>> phases(static_cast<std::size_t>(dom.size()));
  Vector<N> x = start;
  for (int j = 0; j < dom.size(); ++j) {
    const auto& in = reversed_input.phase(j);
    auto& out = phases[static_cast<std::size_t>(j)];
    out.times = in.times;
    out.values.reserve(in.size());
    out.values.push_back(x);
    for (std::size_t k = 0; k + 1 < in.size(); ++k) {
      x = rk4_step(sys, x, in.values[k], in.times[k + 1] - in.times[k]);
      out.values.push_back(x);
    }
    if (j < dom.jumps()) {
      const auto& u = in.values.back();
      const Vector<N> target = reference ? reference->phase(j + 1).values.front() : x;
      const auto succ = sys.jump_map.successors(x, u);
      std::optional<Vector<N>> next;
      if (!succ.empty()) {
        next = *std::min_element(succ.begin(), succ.end(), [&](const Vector<N>& a, const Vector<N>& b) {
          return (a - target).norm() < (b - target).norm();
        });
      } else {
        next = sys.jump_map.nearest(x, u, target);
      }
      if (!next) throw Error(ErrorCode::kJumpMapUndefined, "g is empty at jump " + std::to_string(j));
      x = *next;
    }
  }
  return SolutionPair<N, M>(HybridSignal<N>(dom, std::move(phases)), reversed_input);
}

/// exp(K_x^f T + J ln K_x^g) delta: deviation bound for a reconstruction started delta away.
inline double reconstruction_error_bound(double flow_lipschitz, double jump_lipschitz, double T, int J,
                                         double delta) {
  if (!(flow_lipschitz > 0.0) || !(jump_lipschitz > 0.0) || !(T >= 0.0) || J < 0 || !(delta >= 0.0)) {
    throw Error(ErrorCode::kParameterOutOfRange, "reconstruction_error_bound arguments out of range");
  }
  return std::exp(flow_lipschitz * T + static_cast<double>(J) * std::log(jump_lipschitz)) * delta;
}

}  // namespace hyrrt
