#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>

#include "hyrrt/hyrrt.hpp"
#include "support/generators.hpp"
#include "support/oracles.hpp"

using namespace hyrrt;
using hyrrt::systems::ChainValue;

namespace {

double worst_jump_residual(const ValidationReport& r) {
  double w = 0.0;
  for (double x : r.jump_residuals) w = std::max(w, x);
  return w;
}

struct ReversalStats {
  int pairs = 0;
  int jumps = 0;
};

// Reverses `count` random pairs of `from` and validates them against `to`.
template <int N, int M, class Start>
ReversalStats check_reversals(const HybridSystem<N, M>& from, const HybridSystem<N, M>& to,
                              const InputLibrary<M>& lib, Start start, int count, Rng& rng) {
  ReversalStats s;
  for (int attempt = 0; s.pairs < count && attempt < 20 * count; ++attempt) {
    const auto psi = gen::random_chain(from, lib, start(rng), 1 + attempt % 5, rng);
    if (!psi) continue;
    ++s.pairs;
    s.jumps += psi->domain().jumps();
    const auto rev = reverse(*psi);
    EXPECT_EQ(rev.domain(), domain_mirror(psi->domain()));
    const auto report = validate_solution_pair(rev, to);
    EXPECT_TRUE(report.valid) << report.summary();
    EXPECT_LE(worst_jump_residual(report), 1e-12);
  }
  EXPECT_EQ(s.pairs, count);
  return s;
}

}  // namespace

TEST(ReversalProperty, ForwardBallPairsAreBackwardSolutions) {
  const auto ball = systems::bouncing_ball();
  Rng rng(101);
  const auto s = check_reversals(ball.problem.system, ball.backward, ball.forward_inputs,
                                 [](Rng& r) { return gen::ball_start(r, false); }, 200, rng);
  EXPECT_GT(s.jumps, 20);
}

TEST(ReversalProperty, BackwardBallPairsAreForwardSolutions) {
  const auto ball = systems::bouncing_ball();
  Rng rng(102);
  const auto s = check_reversals(ball.backward, ball.problem.system, ball.backward_inputs,
                                 [](Rng& r) { return gen::ball_start(r, true); }, 200, rng);
  EXPECT_GT(s.jumps, 20);
}

TEST(ReversalProperty, ChainPairsBothDirections) {
  const auto chain = systems::discrete_chain(2.0, 6);
  const InputLibrary<1> lib{{ChainValue(-1.0), ChainValue(1.0)}, 1.0, {ChainValue(-1.0), ChainValue(1.0)}};
  Rng rng(103);
  auto start = [](Rng& r) { return ChainValue(uniform(r, -1.0, 1.0)); };
  check_reversals(chain.forward, chain.backward, lib, start, 200, rng);
  check_reversals(chain.backward, chain.forward, lib, start, 200, rng);
}

TEST(ConcatenationProperty, CompatiblePairsStaySolutionsAndFollowTheDomainLaw) {
  const auto ball = systems::bouncing_ball();
  Rng rng(104);
  int checked = 0;
  for (int attempt = 0; checked < 200 && attempt < 4000; ++attempt) {
    const bool backward = attempt % 2 == 1;
    const auto& sys = backward ? ball.backward : ball.problem.system;
    const auto p1 = gen::random_chain(sys, ball.forward_inputs, gen::ball_start(rng, backward), 1 + attempt % 3, rng);
    if (!p1) continue;
    const auto p2 = gen::random_chain(sys, ball.forward_inputs, p1->end_state(), 1 + attempt % 4, rng);
    if (!p2) continue;
    ++checked;

    const auto psi = concatenate(*p1, *p2);
    const auto report = validate_solution_pair(psi, sys);
    EXPECT_TRUE(report.valid) << report.summary();

    const double T = p1->domain().end_time();
    const int J = p1->domain().jumps();
    const auto lhs = oracle::intervals_of(p1->domain());
    const auto rhs = oracle::shifted(p2->domain(), T, J);
    const auto got = oracle::intervals_of(psi.domain());
    const double horizon = psi.domain().end_time();
    for (double t : oracle::probe_times({lhs, rhs, got}, horizon)) {
      for (int j = -1; j <= psi.domain().jumps() + 1; ++j) {
        const bool expected = oracle::member(lhs, t, j) || oracle::member(rhs, t, j);
        ASSERT_EQ(psi.domain().contains({t, j}), expected) << "t=" << t << " j=" << j;
      }
    }
    EXPECT_EQ(psi.arc().sample_count(), p1->arc().sample_count() + p2->arc().sample_count() - 1);
    EXPECT_EQ(psi.start_state(), p1->start_state());
    EXPECT_EQ(psi.end_state(), p2->end_state());
  }
  EXPECT_EQ(checked, 200);
}
