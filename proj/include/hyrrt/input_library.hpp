#pragma once

#include "hyrrt/error.hpp"
#include "hyrrt/region.hpp"

namespace hyrrt {

/// Piecewise-constant flow inputs (value box, duration in (0, flow_duration_max]) and jump input values.
template <int M>
struct InputLibrary {
  Box<M> flow_values;
  double flow_duration_max = 2.0;
  Box<M> jump_values;

  Vector<M> sample_flow_value(Rng& rng) const { return flow_values.sample(rng); }
  Vector<M> sample_jump_value(Rng& rng) const { return jump_values.sample(rng); }

  double sample_flow_duration(Rng& rng) const {
    if (!(flow_duration_max > 0.0)) {
      throw Error(ErrorCode::kParameterOutOfRange, "flow_duration_max must be positive");
    }
    // uniform on [0, max) mirrored onto (0, max]
    return flow_duration_max - std::uniform_real_distribution<double>(0.0, flow_duration_max)(rng);
  }
};

}  // namespace hyrrt
