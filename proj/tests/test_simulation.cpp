#include <gtest/gtest.h>

#include <cmath>

#include "hyrrt/hyrrt.hpp"
#include "support/generators.hpp"
#include "support/oracles.hpp"

using namespace hyrrt;
using hyrrt::systems::BallInput;
using hyrrt::systems::BallState;
using hyrrt::systems::ChainValue;

namespace {

constexpr double kGamma = 9.81;
constexpr double kLambda = 0.8;

InputLibrary<1> pinned_library(double flow_u, double jump_u, double duration = 2.0) {
  return InputLibrary<1>{{BallInput(flow_u), BallInput(flow_u)}, duration, {BallInput(jump_u), BallInput(jump_u)}};
}

}  // namespace

TEST(IntegrateFlow, DropEndsAtImpact) {
  const auto sys = systems::bouncing_ball_system(kGamma, kLambda);
  const auto seg = integrate_flow(sys, BallState(14.0, 0.0), BallInput(0.0), 5.0);
  EXPECT_EQ(seg.event, FlowEvent::kExitedFlowSet);
  const double t_star = std::sqrt(2.0 * 14.0 / kGamma);
  EXPECT_LE(std::abs(seg.pair.domain().end_time() - t_star), 1e-8);
  const auto& x = seg.pair.end_state();
  EXPECT_LE(std::abs(x[0]), 1e-9);
  EXPECT_GE(x[0], 0.0);
  EXPECT_NEAR(x[1], -kGamma * t_star, 1e-7);
  EXPECT_NEAR(x[1], -16.573, 1e-3);
}

TEST(IntegrateFlow, DurationReached) {
  const auto sys = systems::bouncing_ball_system(kGamma, kLambda);
  const auto seg = integrate_flow(sys, BallState(14.0, 0.0), BallInput(0.0), 0.5);
  EXPECT_EQ(seg.event, FlowEvent::kDurationReached);
  EXPECT_EQ(seg.pair.domain().end_time(), 0.5);
  const auto b = oracle::ballistic(14.0, 0.0, kGamma, 0.5);
  EXPECT_NEAR(seg.pair.end_state()[0], b.height, 1e-9);
  EXPECT_NEAR(seg.pair.end_state()[1], b.velocity, 1e-9);
  EXPECT_NEAR(b.height, 12.77375, 1e-12);
}

TEST(IntegrateFlow, GroundWithDownwardVelocityExitsImmediately) {
  const auto sys = systems::bouncing_ball_system(kGamma, kLambda);
  const auto seg = integrate_flow(sys, BallState(0.0, -1.0), BallInput(0.0), 1.0);
  EXPECT_EQ(seg.event, FlowEvent::kExitedFlowSet);
  EXPECT_TRUE(seg.pair.is_trivial());
}

TEST(IntegrateFlow, Errors) {
  const auto sys = systems::bouncing_ball_system(kGamma, kLambda);
  try {
    integrate_flow(sys, BallState(-1.0, 0.0), BallInput(0.0), 1.0);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kInitialStateOutsideFlowSet);
  }
  EXPECT_THROW(integrate_flow(sys, BallState(1.0, 0.0), BallInput(0.0), 0.0), Error);
  SimulationOptions bad;
  bad.step = 0.0;
  EXPECT_THROW(integrate_flow(sys, BallState(1.0, 0.0), BallInput(0.0), 1.0, bad), Error);
}

TEST(IntegrateFlow, SamplesLieOnTheFixedGrid) {
  const auto sys = systems::bouncing_ball_system(kGamma, kLambda);
  const auto seg = integrate_flow(sys, BallState(10.0, 5.0), BallInput(0.0), 1.2345);
  const auto& ts = seg.pair.arc().phase(0).times;
  for (std::size_t k = 0; k + 1 < ts.size(); ++k) EXPECT_EQ(ts[k], static_cast<double>(k) * 1e-3);
  EXPECT_EQ(ts.back(), 1.2345);
}

TEST(IntegrateFlow, MatchesBallisticClosedForm) {
  const auto sys = systems::bouncing_ball_system(kGamma, kLambda);
  Rng rng(1);
  double worst = 0.0;
  for (int trial = 0; trial < 50; ++trial) {
    const double h = uniform(rng, 5.0, 15.0);
    const double v = uniform(rng, -8.0, 8.0);
    const auto seg = integrate_flow(sys, BallState(h, v), BallInput(uniform(rng, 0.0, 5.0)), 2.0);
    const auto& ph = seg.pair.arc().phase(0);
    for (std::size_t k = 0; k < ph.size(); ++k) {
      const auto b = oracle::ballistic(h, v, kGamma, ph.times[k]);
      worst = std::max(worst, std::abs(ph.values[k][0] - b.height));
      worst = std::max(worst, std::abs(ph.values[k][1] - b.velocity));
    }
  }
  EXPECT_LE(worst, 1e-9);
}

TEST(IntegrateFlow, LocatedExitIsWithinEventTolerance) {
  const auto sys = systems::bouncing_ball_system(kGamma, kLambda);
  Rng rng(2);
  int exits = 0;
  for (int trial = 0; trial < 200; ++trial) {
    const double h = uniform(rng, 0.0, 15.0);
    const double v = uniform(rng, -15.0, 5.0);
    const auto seg = integrate_flow(sys, BallState(h, v), BallInput(0.0), 5.0);
    if (seg.event != FlowEvent::kExitedFlowSet) continue;
    ++exits;
    const double margin = sys.flow_margin(seg.pair.end_state(), BallInput(0.0));
    EXPECT_LE(margin, 0.0);
    EXPECT_GE(margin, -1e-9);
    const double t_hit = oracle::impact_time(h, v, kGamma);
    EXPECT_LE(std::abs(seg.pair.domain().end_time() - t_hit), 1e-8);
  }
  EXPECT_GT(exits, 150);
}

TEST(IntegrateFlow, SeekJumpStopsOnEnteringJumpSet) {
  const auto sys = systems::bouncing_ball_system(kGamma, kLambda);
  const auto seg = integrate_flow(sys, BallState(14.0, 0.0), BallInput(0.0), 5.0, {}, /*seek_jump=*/true);
  EXPECT_TRUE(seg.event == FlowEvent::kEnteredJumpSet || seg.event == FlowEvent::kExitedFlowSet);
  EXPECT_LE(std::abs(seg.pair.end_state()[0]), 1e-9);
}

TEST(ApplyJump, BallImpacts) {
  Rng rng(0);
  const auto fw = systems::bouncing_ball_system(kGamma, kLambda);
  const auto bw = systems::bouncing_ball_backward(kGamma, kLambda);
  EXPECT_EQ(apply_jump(fw, BallState(0.0, -5.0), BallInput(1.0), rng), BallState(0.0, 5.0));
  const auto z = apply_jump(bw, BallState(0.0, 5.0), BallInput(1.0), rng);
  EXPECT_EQ(z[0], 0.0);
  EXPECT_NEAR(z[1], -5.0, 1e-15);
  try {
    apply_jump(fw, BallState(2.0, -5.0), BallInput(1.0), rng);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kNotInJumpSet);
  }
}

TEST(ApplyJump, LambdaZeroDrawsNonpositiveVelocity) {
  Rng rng(4);
  const auto bw = systems::bouncing_ball_lambda_zero(kGamma);
  for (int i = 0; i < 50; ++i) {
    const auto z = apply_jump(bw, BallState(0.0, 3.0), BallInput(3.0), rng);
    EXPECT_EQ(z[0], 0.0);
    EXPECT_LE(z[1], 0.0);
  }
}

TEST(NewState, JumpFromImpactState) {
  const auto sys = systems::bouncing_ball_system(kGamma, kLambda);
  Rng rng(9);
  const auto r = new_state(BallState(0.0, -5.0), pinned_library(1.0, 1.0), sys, {}, /*flow_probability=*/0.0, rng);
  ASSERT_TRUE(r.generated);
  EXPECT_EQ(r.x_new, BallState(0.0, 5.0));
  EXPECT_EQ(*r.pair, (SolutionPair<2, 1>::jump(BallState(0.0, -5.0), BallState(0.0, 5.0), BallInput(1.0))));
}

TEST(NewState, UnsafeInputIsRejected) {
  const auto ball = systems::bouncing_ball();
  Rng rng(9);
  const auto r = new_state(BallState(0.0, -5.0), pinned_library(1.0, 6.0), ball.problem.system,
                           UnsafeSet<2, 1>(ball.problem.unsafe), 0.0, rng);
  EXPECT_FALSE(r.generated);
}

TEST(NewState, TrivialFlowIsRejected) {
  const auto sys = systems::bouncing_ball_system(kGamma, kLambda);
  Rng rng(9);
  const auto r = new_state(BallState(0.0, -1.0), pinned_library(1.0, 1.0), sys, {}, 1.0, rng);
  EXPECT_FALSE(r.generated);
}

TEST(NewState, StateOutsideBothSetsGeneratesNothing) {
  const auto sys = systems::bouncing_ball_system(kGamma, kLambda);
  Rng rng(9);
  EXPECT_FALSE(new_state(BallState(-1.0, 0.0), pinned_library(1.0, 1.0), sys, {}, 0.5, rng).generated);
}

TEST(NewState, GeneratedPairsAreNontrivialSafeAndEndAtNewState) {
  const auto ball = systems::bouncing_ball();
  const UnsafeSet<2, 1> unsafe(ball.problem.unsafe);
  Rng rng(10);
  int generated = 0;
  for (int i = 0; i < 500; ++i) {
    const bool backward = i % 2 == 1;
    const auto& sys = backward ? ball.backward : ball.problem.system;
    const auto x = gen::ball_start(rng, backward);
    const auto r = new_state(x, ball.forward_inputs, sys, unsafe, 0.5, rng);
    if (!r.generated) continue;
    ++generated;
    ASSERT_TRUE(r.pair);
    EXPECT_FALSE(r.pair->is_trivial());
    EXPECT_FALSE(intersects_unsafe(*r.pair, unsafe));
    EXPECT_EQ(r.pair->start_state(), x);
    EXPECT_EQ(r.pair->end_state(), r.x_new);
  }
  EXPECT_GT(generated, 300);
}

TEST(Reconstruct, ZeroOffsetReproducesReversedArc) {
  const auto ball = systems::bouncing_ball();
  Rng rng(12);
  for (int trial = 0; trial < 30; ++trial) {
    const auto psi = gen::random_chain(ball.backward, ball.backward_inputs, gen::ball_start(rng, true), 4, rng);
    if (!psi) continue;
    const auto rev = reverse(*psi);
    const auto sim = reconstruct(ball.problem.system, rev.start_state(), rev.input(), &rev.arc());
    ASSERT_EQ(sim.domain(), rev.domain());
    EXPECT_EQ(sim.input(), rev.input());
    for (int j = 0; j < sim.domain().size(); ++j) {
      const auto& a = sim.arc().phase(j);
      const auto& b = rev.arc().phase(j);
      ASSERT_EQ(a.times, b.times);
      for (std::size_t k = 0; k < a.size(); ++k) EXPECT_LE((a.values[k] - b.values[k]).norm(), 1e-9);
    }
  }
}

TEST(Reconstruct, HeightOffsetIsPreservedByFlow) {
  const auto ball = systems::bouncing_ball();
  Rng rng(13);
  for (int trial = 0; trial < 20; ++trial) {
    const BallState x0(uniform(rng, 2.0, 14.0), uniform(rng, -5.0, 5.0));
    const auto psi = integrate_flow(ball.backward, x0, BallInput(0.0), uniform(rng, 0.1, 2.0)).pair;
    const auto rev = reverse(psi);
    const double eps = uniform(rng, 1e-3, 1.0);
    const BallState start = rev.start_state() + BallState(eps, 0.0);
    const auto sim = reconstruct(ball.problem.system, start, rev.input());
    const double T = rev.domain().end_time();
    const auto b = oracle::ballistic(start[0], start[1], kGamma, T);
    EXPECT_NEAR(sim.end_state()[0], b.height, 1e-9);
    EXPECT_NEAR(sim.end_state()[1], b.velocity, 1e-9);
    const BallState offset = sim.end_state() - rev.end_state();
    EXPECT_NEAR(offset[0], eps, 1e-9);
    EXPECT_NEAR(offset[1], 0.0, 1e-9);
  }
}

TEST(Reconstruct, ChainOffsetDoublesPerJump) {
  const auto chain = systems::discrete_chain(2.0, 6);
  const InputLibrary<1> lib{{ChainValue(-1.0), ChainValue(1.0)}, 1.0, {ChainValue(-1.0), ChainValue(1.0)}};
  Rng rng(14);
  const auto psi = gen::random_chain(chain.backward, lib, ChainValue(0.3), 3, rng);
  ASSERT_TRUE(psi);
  ASSERT_EQ(psi->domain().jumps(), 3);
  const auto rev = reverse(*psi);
  const auto sim = reconstruct(chain.forward, ChainValue(rev.start_state() + ChainValue(0.1)), rev.input());
  EXPECT_EQ(sim.domain(), rev.domain());
  const double dev = sim.end_state()[0] - rev.end_state()[0];
  EXPECT_NEAR(dev, oracle::chain_deviation(2.0, 3, 0.1), 1e-12);
  EXPECT_NEAR(dev, 0.8, 1e-12);
}

TEST(Reconstruct, ReferenceDomainMustMatch) {
  const auto ball = systems::bouncing_ball();
  const auto psi = integrate_flow(ball.backward, BallState(5.0, 0.0), BallInput(0.0), 0.5).pair;
  const auto rev = reverse(psi);
  const HybridSignal<2> wrong(BallState(0.0, 0.0));
  EXPECT_THROW(reconstruct(ball.problem.system, rev.start_state(), rev.input(), &wrong), Error);
}

TEST(ErrorBound, Examples) {
  EXPECT_NEAR(reconstruction_error_bound(1.0, 1.0, 1.0, 0, 0.2), std::exp(1.0) * 0.2, 1e-15);
  EXPECT_NEAR(reconstruction_error_bound(1.0, 1.0, 1.0, 0, 0.2), 0.5437, 1e-4);
  EXPECT_EQ(reconstruction_error_bound(3.0, 0.5, 2.0, 4, 0.0), 0.0);
  EXPECT_NEAR(reconstruction_error_bound(1.0, 2.0, 0.0, 3, 0.1), 0.8, 1e-15);
  EXPECT_THROW(reconstruction_error_bound(0.0, 1.0, 1.0, 0, 0.1), Error);
  EXPECT_THROW(reconstruction_error_bound(1.0, 1.0, -1.0, 0, 0.1), Error);
  EXPECT_THROW(reconstruction_error_bound(1.0, 1.0, 1.0, -1, 0.1), Error);
  EXPECT_THROW(reconstruction_error_bound(1.0, 1.0, 1.0, 0, -0.1), Error);
}

TEST(ErrorBound, HoldsForFlowOnlyReconstructions) {
  const auto ball = systems::bouncing_ball();
  Rng rng(15);
  for (int trial = 0; trial < 100; ++trial) {
    const BallState x0(uniform(rng, 2.0, 14.0), uniform(rng, -5.0, 5.0));
    const auto psi = integrate_flow(ball.backward, x0, BallInput(0.0), uniform(rng, 0.05, 2.0)).pair;
    const auto rev = reverse(psi);
    const double delta = uniform(rng, 1e-3, 1.0);
    const double angle = uniform(rng, 0.0, 2.0 * M_PI);
    const BallState start = rev.start_state() + delta * BallState(std::cos(angle), std::sin(angle));
    const auto sim = reconstruct(ball.problem.system, start, rev.input());
    const double T = rev.domain().end_time();
    EXPECT_LE((sim.end_state() - rev.end_state()).norm(), reconstruction_error_bound(1.0, 1.0, T, 0, delta));
  }
}

TEST(ReconstructionTemplate, ListsJumpsAndFlowSpans) {
  const HybridTimeDomain d({{0.0, 1.0}, {1.0, 1.0}, {1.0, 2.5}});
  const auto t = ReconstructionTemplate::from(d);
  ASSERT_EQ(t.jump_instants.size(), 2u);
  EXPECT_EQ(t.jump_instants[0], (HybridTime{1.0, 0}));
  EXPECT_EQ(t.jump_instants[1], (HybridTime{1.0, 1}));
  ASSERT_EQ(t.flow_spans.size(), 2u);
  EXPECT_EQ(t.flow_spans[1].first, 2);
  EXPECT_EQ(t.flow_spans[1].second, (TimeInterval{1.0, 2.5}));
}
