#include <gtest/gtest.h>

#include <vector>

#include "hyrrt/hyrrt.hpp"
#include "support/oracles.hpp"

using namespace hyrrt;
using hyrrt::systems::BallInput;
using hyrrt::systems::BallState;

namespace {

constexpr double kGamma = 9.81;

// Closed-form drop from (h0, 0) on [0, 1] sampled every `step`, with u = 0.
SolutionPair<2, 1> ballistic_drop(double h0, double step = 1e-3) {
  Phase<2> xs;
  Phase<1> us;
  const int n = static_cast<int>(1.0 / step + 0.5);
  for (int k = 0; k <= n; ++k) {
    const double t = k == n ? 1.0 : k * step;
    const auto b = oracle::ballistic(h0, 0.0, kGamma, t);
    xs.times.push_back(t);
    xs.values.push_back(BallState(b.height, b.velocity));
    us.times.push_back(t);
    us.values.push_back(BallInput(0.0));
  }
  const auto d = HybridTimeDomain::flow(1.0);
  return SolutionPair<2, 1>(HybridSignal<2>(d, {xs}), HybridSignal<1>(d, {us}));
}

}  // namespace

TEST(Validate, ClosedFormDropIsValid) {
  const auto sys = systems::bouncing_ball_system(kGamma, 0.8);
  const auto report = validate_solution_pair(ballistic_drop(14.0), sys);
  EXPECT_TRUE(report.valid) << report.summary();
  EXPECT_EQ(report.worst_set_violation, 0.0);
  EXPECT_LT(report.worst_flow_residual, 1e-9);
}

TEST(Validate, DropBelowGroundViolatesFlowSet) {
  const auto sys = systems::bouncing_ball_system(kGamma, 0.8);
  const auto report = validate_solution_pair(ballistic_drop(-1.0), sys);
  EXPECT_FALSE(report.valid);
  ASSERT_FALSE(report.failures.empty());
  EXPECT_EQ(report.failures.front().kind, ValidationFailureKind::kInitialPoint);
  EXPECT_GE(report.worst_set_violation, 1.0);
  bool flow_set = false;
  for (const auto& f : report.failures) flow_set = flow_set || f.kind == ValidationFailureKind::kFlowSet;
  EXPECT_TRUE(flow_set);
}

TEST(Validate, ImpactJumpHasZeroResidual) {
  const auto sys = systems::bouncing_ball_system(kGamma, 0.8);
  const auto psi = SolutionPair<2, 1>::jump(BallState(0.0, -5.0), BallState(0.0, 5.0), BallInput(1.0));
  const auto report = validate_solution_pair(psi, sys);
  EXPECT_TRUE(report.valid) << report.summary();
  ASSERT_EQ(report.jump_residuals.size(), 1u);
  EXPECT_EQ(report.jump_residuals[0], 0.0);
}

TEST(Validate, WrongJumpTargetIsReported) {
  const auto sys = systems::bouncing_ball_system(kGamma, 0.8);
  const auto psi = SolutionPair<2, 1>::jump(BallState(0.0, -5.0), BallState(0.0, 5.5), BallInput(1.0));
  const auto report = validate_solution_pair(psi, sys);
  EXPECT_FALSE(report.valid);
  EXPECT_NEAR(report.jump_residuals[0], 0.5, 1e-15);
  EXPECT_EQ(report.failures.front().kind, ValidationFailureKind::kJumpResidual);
}

TEST(Validate, JumpOutsideJumpSetIsReported) {
  const auto sys = systems::bouncing_ball_system(kGamma, 0.8);
  // Consistent with g but from height 1, where D does not apply.
  const auto psi = SolutionPair<2, 1>::jump(BallState(1.0, -5.0), BallState(1.0, 5.0), BallInput(1.0));
  const auto report = validate_solution_pair(psi, sys);
  EXPECT_FALSE(report.valid);
  bool jump_set = false;
  for (const auto& f : report.failures) jump_set = jump_set || f.kind == ValidationFailureKind::kJumpSet;
  EXPECT_TRUE(jump_set);
}

TEST(Validate, PerturbedFlowSampleBreaksResidual) {
  const auto sys = systems::bouncing_ball_system(kGamma, 0.8);
  const auto good = ballistic_drop(14.0);
  auto phase = good.arc().phase(0);
  phase.values[500][0] += 1e-3;
  const SolutionPair<2, 1> bad(HybridSignal<2>(good.domain(), {phase}), good.input());
  const auto report = validate_solution_pair(bad, sys);
  EXPECT_FALSE(report.valid);
  EXPECT_EQ(report.failures.front().kind, ValidationFailureKind::kFlowResidual);
}

TEST(Validate, ContinuityGapAllowsBoundedDiscontinuity) {
  const auto sys = systems::bouncing_ball_system(kGamma, 0.8);
  const auto good = ballistic_drop(14.0);
  auto phase = good.arc().phase(0);
  for (std::size_t k = 600; k < phase.size(); ++k) phase.values[k][0] += 0.01;
  const SolutionPair<2, 1> gapped(HybridSignal<2>(good.domain(), {phase}), good.input());
  EXPECT_FALSE(validate_solution_pair(gapped, sys).valid);
  ValidationTolerances tol;
  tol.continuity_gap = 0.01;
  EXPECT_TRUE(validate_solution_pair(gapped, sys, tol).valid);
}

TEST(Validate, SinglePointPairChecksInitialMembershipOnly) {
  const auto sys = systems::bouncing_ball_system(kGamma, 0.8);
  EXPECT_TRUE(validate_solution_pair(SolutionPair<2, 1>::point(BallState(3.0, 1.0), BallInput(0.0)), sys).valid);
  EXPECT_FALSE(validate_solution_pair(SolutionPair<2, 1>::point(BallState(-3.0, 1.0), BallInput(0.0)), sys).valid);
}
