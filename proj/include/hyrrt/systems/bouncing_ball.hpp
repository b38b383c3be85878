#pragma once

/**
 * @file
 * @brief Actuated bouncing ball: x = (height, velocity), input applied at impacts.
 *
 *   flow:  x' = (x2, -gamma)             on C = { x1 >= 0 }
 *   jump:  x+ = (x1, -lambda x2 + u)      on D = { x1 = 0, x2 <= 0, u >= 0 }
 */

#include <algorithm>
#include <cmath>
#include <optional>
#include <string>
#include <vector>

#include "hyrrt/error.hpp"
#include "hyrrt/input_library.hpp"
#include "hyrrt/system.hpp"

namespace hyrrt::systems {

using BallSystem = HybridSystem<2, 1>;
using BallState = Vector<2>;
using BallInput = Vector<1>;

struct BouncingBallParams {
  double gamma = 9.81;
  double lambda = 0.8;
  double u_max = 5.0;
  Box<2> sampling_box{BallState(0.0, -18.0), BallState(16.0, 18.0)};
  BallState initial_state{14.0, 0.0};
  BallState final_state{10.0, 0.0};
  /// Xu = { u <= unsafe_below or u >= unsafe_above }.
  double unsafe_below = 0.0;
  double unsafe_above = 5.0;
  double flow_duration_max = 2.0;
  double membership_tolerance = 1e-9;
  /// Velocity range drawn from when the backward jump map is a continuum (lambda = 0).
  double lambda_zero_velocity_min = -18.0;
};

namespace detail {

inline void check_ball_params(double gamma, double lambda, bool allow_zero_lambda) {
  if (!(gamma > 0.0)) throw Error(ErrorCode::kParameterOutOfRange, "gamma must be positive");
  const bool lambda_ok = allow_zero_lambda ? (lambda >= 0.0 && lambda <= 1.0) : (lambda > 0.0 && lambda <= 1.0);
  if (!lambda_ok) throw Error(ErrorCode::kParameterOutOfRange, "lambda out of range");
}

inline Sampler<2> ball_jump_state_sampler(const Box<2>& box, bool upward) {
  // D' of the forward ball has x2 <= 0; D' of the backward ball has x2 >= 0.
  const double lo = upward ? std::max(0.0, box.lower[1]) : box.lower[1];
  const double hi = upward ? box.upper[1] : std::min(0.0, box.upper[1]);
  return [lo, hi](Rng& rng) { return BallState(0.0, uniform(rng, lo, hi)); };
}

}  // namespace detail

/// Forward ball; lambda = 0 is accepted here so the degenerate case can be probed.
inline BallSystem bouncing_ball_system(double gamma, double lambda, const BouncingBallParams& p = {}) {
  detail::check_ball_params(gamma, lambda, /*allow_zero_lambda=*/true);
  BallSystem s;
  s.name = "bouncing_ball";
  s.flow_map = [gamma](const BallState& x, const BallInput&) { return BallState(x[1], -gamma); };
  s.jump_map = JumpMap<2, 1>::single_valued(
      [lambda](const BallState& x, const BallInput& u) { return BallState(x[0], -lambda * x[1] + u[0]); });
  s.flow_margin = [](const BallState& x, const BallInput&) { return -x[0]; };
  s.jump_margin = [](const BallState& x, const BallInput& u) {
    return std::max({std::abs(x[0]), x[1], -u[0]});
  };
  s.flow_state_margin = [](const BallState& x) { return -x[0]; };
  s.jump_state_margin = [](const BallState& x) { return std::max(std::abs(x[0]), x[1]); };
  s.sample_flow_state = [box = p.sampling_box](Rng& rng) { return box.sample(rng); };
  s.sample_jump_state = detail::ball_jump_state_sampler(p.sampling_box, /*upward=*/false);
  s.jump_input_solver = [lambda](const BallState& from, const BallState& to, double tol) {
    std::vector<BallInput> out;
    if (std::abs(from[0]) > tol || std::abs(to[0] - from[0]) > tol || from[1] > 0.0) return out;
    const double u = to[1] + lambda * from[1];
    if (u >= 0.0) out.push_back(BallInput(u));
    return out;
  };
  // df/dx = [[0, 1], [0, 0]] has norm 1; f does not depend on u.
  s.lipschitz = LipschitzConstants{1.0, 0.0, std::max(1.0, lambda), 1.0};
  s.membership_tolerance = p.membership_tolerance;
  return s;
}

/// Backward ball for lambda in (0, 1]: the jump map inverts to a single preimage.
inline BallSystem bouncing_ball_backward(double gamma, double lambda, const BouncingBallParams& p = {}) {
  detail::check_ball_params(gamma, lambda, /*allow_zero_lambda=*/false);
  const BallSystem fw = bouncing_ball_system(gamma, lambda, p);
  const double tol = p.membership_tolerance;
  JumpPreimage<2, 1> pre;
  auto preimage = [lambda, tol](const BallState& x, const BallInput& u) -> std::optional<BallState> {
    const BallState z(x[0], (u[0] - x[1]) / lambda);
    if (std::max({std::abs(z[0]), z[1], -u[0]}) > tol) return std::nullopt;
    return z;
  };
  pre.map.successors = [preimage](const BallState& x, const BallInput& u) {
    std::vector<BallState> out;
    if (auto z = preimage(x, u)) out.push_back(*z);
    return out;
  };
  pre.map.sample = [preimage](const BallState& x, const BallInput& u, Rng&) { return preimage(x, u); };
  pre.map.nearest = [preimage](const BallState& x, const BallInput& u, const BallState&) { return preimage(x, u); };
  pre.margin = [](const BallState& x, const BallInput& u) {
    return std::max({std::abs(x[0]), u[0] - x[1], -u[0]});
  };
  pre.state_margin = [](const BallState& x) { return std::max(std::abs(x[0]), -x[1]); };
  pre.sample_state = detail::ball_jump_state_sampler(p.sampling_box, /*upward=*/true);
  pre.jump_x_lipschitz = 1.0 / lambda;
  pre.jump_u_lipschitz = 1.0 / lambda;
  return backward_system(fw, std::move(pre));
}

/// Backward ball for lambda = 0, where g is not invertible and g_bw(x, u) = {x1} x (-inf, 0].
inline BallSystem bouncing_ball_lambda_zero(double gamma, const BouncingBallParams& p = {}) {
  detail::check_ball_params(gamma, 0.0, /*allow_zero_lambda=*/true);
  const BallSystem fw = bouncing_ball_system(gamma, 0.0, p);
  const double tol = p.membership_tolerance;
  const double v_min = std::min(p.lambda_zero_velocity_min, 0.0);
  auto margin = [](const BallState& x, const BallInput& u) {
    return std::max({std::abs(x[0]), std::abs(x[1] - u[0]), -u[0]});
  };
  JumpPreimage<2, 1> pre;
  pre.map.successors = [](const BallState&, const BallInput&) { return std::vector<BallState>{}; };
  pre.map.sample = [margin, tol, v_min](const BallState& x, const BallInput& u,
                                        Rng& rng) -> std::optional<BallState> {
    if (margin(x, u) > tol) return std::nullopt;
    return BallState(x[0], uniform(rng, v_min, 0.0));
  };
  pre.map.nearest = [margin, tol](const BallState& x, const BallInput& u,
                                  const BallState& target) -> std::optional<BallState> {
    if (margin(x, u) > tol) return std::nullopt;
    return BallState(x[0], std::min(target[1], 0.0));
  };
  pre.margin = margin;
  pre.state_margin = [](const BallState& x) { return std::max(std::abs(x[0]), -x[1]); };
  pre.sample_state = detail::ball_jump_state_sampler(p.sampling_box, /*upward=*/true);
  BallSystem bw = backward_system(fw, std::move(pre));
  bw.name = "bouncing_ball_lambda_zero/backward";
  return bw;
}

struct BouncingBall {
  MotionPlanningProblem<2, 1> problem;
  BallSystem backward;
  InputLibrary<1> forward_inputs;
  InputLibrary<1> backward_inputs;
};

/// Planning problem for the ball; defaults give X0 = {(14, 0)}, Xf = {(10, 0)}, Xu = {u <= 0 or u >= 5}.
inline BouncingBall bouncing_ball(const BouncingBallParams& p = {}) {
  detail::check_ball_params(p.gamma, p.lambda, /*allow_zero_lambda=*/false);
  if (!(p.u_max > 0.0)) throw Error(ErrorCode::kParameterOutOfRange, "u_max must be positive");
  if (!(p.flow_duration_max > 0.0)) throw Error(ErrorCode::kParameterOutOfRange, "flow_duration_max must be positive");
  BouncingBall b;
  b.problem.system = bouncing_ball_system(p.gamma, p.lambda, p);
  b.problem.initial = StateRegion<2>::point(p.initial_state);
  b.problem.goal = StateRegion<2>::point(p.final_state);
  b.problem.unsafe = [lo = p.unsafe_below, hi = p.unsafe_above](const BallState&, const BallInput& u) {
    return u[0] <= lo || u[0] >= hi;
  };
  b.backward = bouncing_ball_backward(p.gamma, p.lambda, p);
  const Box<1> inputs{BallInput(0.0), BallInput(p.u_max)};
  b.forward_inputs = InputLibrary<1>{inputs, p.flow_duration_max, inputs};
  b.backward_inputs = b.forward_inputs;
  return b;
}

}  // namespace hyrrt::systems
