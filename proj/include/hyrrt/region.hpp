#pragma once

#include <functional>
#include <random>
#include <utility>

#include "hyrrt/hybrid_time.hpp"

namespace hyrrt {

/// Every random draw in the library goes through an explicitly passed engine of this type.
using Rng = std::mt19937_64;

/// Uniform draw from [lo, hi]; a degenerate range returns lo without consuming the engine.
inline double uniform(Rng& rng, double lo, double hi) {
  if (!(lo < hi)) return lo;
  return std::uniform_real_distribution<double>(lo, hi)(rng);
}

/// Axis-aligned box; lower == upper along an axis pins that coordinate.
template <int Dim>
struct Box {
  Vector<Dim> lower = Vector<Dim>::Zero();
  Vector<Dim> upper = Vector<Dim>::Zero();

  Vector<Dim> sample(Rng& rng) const {
    Vector<Dim> x;
    for (int i = 0; i < Dim; ++i) x[i] = uniform(rng, lower[i], upper[i]);
    return x;
  }

  bool contains(const Vector<Dim>& x) const {
    return (x.array() >= lower.array()).all() && (x.array() <= upper.array()).all();
  }

  Vector<Dim> center() const { return 0.5 * (lower + upper); }
};

template <int Dim>
using Sampler = std::function<Vector<Dim>(Rng&)>;

/// A set of states with a sampler, a membership test and a distance (X0 and Xf).
template <int N>
struct StateRegion {
  using State = Vector<N>;

  Sampler<N> sample;
  std::function<bool(const State&)> contains;
  std::function<double(const State&)> distance;

  /// The singleton {p}; membership is exact equality.
  static StateRegion point(const State& p) {
    return StateRegion{[p](Rng&) { return p; },
                       [p](const State& x) { return x == p; },
                       [p](const State& x) { return (x - p).norm(); }};
  }
};

}  // namespace hyrrt
