#pragma once

#include <vector>

#include "hyrrt/error.hpp"
#include "hyrrt/system.hpp"

namespace hyrrt::systems {

using ChainSystem = HybridSystem<1, 1>;
using ChainValue = Vector<1>;

/// Scalar system that never flows and jumps by x+ = gain * x + u everywhere.
struct DiscreteChain {
  ChainSystem forward;
  ChainSystem backward;
  int max_jumps = 0;  ///< longest chain the fixture is meant to exercise
};

inline DiscreteChain discrete_chain(double gain, int max_jumps, double sampling_radius = 10.0) {
  if (!(gain > 0.0)) throw Error(ErrorCode::kParameterOutOfRange, "gain must be positive");
  if (max_jumps < 0) throw Error(ErrorCode::kParameterOutOfRange, "max_jumps must be nonnegative");

  const Box<1> box{ChainValue(-sampling_radius), ChainValue(sampling_radius)};
  ChainSystem fw;
  fw.name = "discrete_chain";
  fw.flow_map = [](const ChainValue&, const ChainValue&) { return ChainValue(0.0); };
  fw.jump_map = JumpMap<1, 1>::single_valued(
      [gain](const ChainValue& x, const ChainValue& u) { return ChainValue(gain * x[0] + u[0]); });
  // C is empty, D is everything.
  fw.flow_margin = [](const ChainValue&, const ChainValue&) { return 1.0; };
  fw.jump_margin = [](const ChainValue&, const ChainValue&) { return -1.0; };
  fw.flow_state_margin = [](const ChainValue&) { return 1.0; };
  fw.jump_state_margin = [](const ChainValue&) { return -1.0; };
  fw.sample_flow_state = [box](Rng& rng) { return box.sample(rng); };
  fw.sample_jump_state = fw.sample_flow_state;
  fw.jump_input_solver = [gain](const ChainValue& from, const ChainValue& to, double) {
    return std::vector<ChainValue>{ChainValue(to[0] - gain * from[0])};
  };
  // Any positive constant bounds the zero flow map.
  fw.lipschitz = LipschitzConstants{1.0, 1.0, gain, 1.0};

  JumpPreimage<1, 1> pre;
  pre.map = JumpMap<1, 1>::single_valued(
      [gain](const ChainValue& x, const ChainValue& u) { return ChainValue((x[0] - u[0]) / gain); });
  pre.margin = fw.jump_margin;
  pre.state_margin = fw.jump_state_margin;
  pre.sample_state = fw.sample_jump_state;
  pre.jump_x_lipschitz = 1.0 / gain;
  pre.jump_u_lipschitz = 1.0 / gain;

  DiscreteChain chain;
  chain.backward = backward_system(fw, std::move(pre));
  chain.forward = std::move(fw);
  chain.max_jumps = max_jumps;
  return chain;
}

}  // namespace hyrrt::systems
