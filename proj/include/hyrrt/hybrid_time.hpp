#pragma once

/**
 * @file
 * @brief Compact hybrid time domains, sampled hybrid signals and solution pairs.
 *
 * A hybrid time domain is stored as the ordered list of its flow intervals
 * [t_j, t_{j+1}] x {j}. Signals keep one sample grid per interval. Interval
 * endpoints are copied, never recomputed, so seams between consecutive
 * intervals compare equal bit for bit.
 *
 * Input signals follow a hold convention: the value stored at a sample that is
 * not the last one of its phase is the value held on the open interval that
 * starts there. The last sample of a phase followed by a jump stores the input
 * applied at that jump.
 */

#include <Eigen/Core>

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <string>
#include <utility>
#include <vector>

#include "hyrrt/error.hpp"

namespace hyrrt {

template <int Dim>
using Vector = Eigen::Matrix<double, Dim, 1>;

struct HybridTime {
  double t = 0.0;
  int j = 0;

  friend bool operator==(const HybridTime&, const HybridTime&) = default;
};

struct TimeInterval {
  double t_start = 0.0;
  double t_end = 0.0;

  double length() const { return t_end - t_start; }
  friend bool operator==(const TimeInterval&, const TimeInterval&) = default;
};

/// Compact hybrid time domain: union over j = 0..J of [t_start(j), t_end(j)] x {j}.
class HybridTimeDomain {
 public:
  /// The single point {(0, 0)}.
  HybridTimeDomain() : intervals_{TimeInterval{0.0, 0.0}} {}

  explicit HybridTimeDomain(std::vector<TimeInterval> intervals) : intervals_(std::move(intervals)) {
    if (intervals_.empty()) {
      throw Error(ErrorCode::kNonCompactDomain, "a compact hybrid time domain has at least one interval");
    }
    if (intervals_.front().t_start != 0.0) {
      throw Error(ErrorCode::kInvalidDomain, "first interval must start at t = 0");
    }
    for (std::size_t j = 0; j < intervals_.size(); ++j) {
      const auto& iv = intervals_[j];
      if (!(iv.t_start <= iv.t_end)) {
        throw Error(ErrorCode::kInvalidDomain, "interval " + std::to_string(j) + " has t_start > t_end");
      }
      if (j + 1 < intervals_.size() && iv.t_end != intervals_[j + 1].t_start) {
        throw Error(ErrorCode::kInvalidDomain,
                    "interval " + std::to_string(j) + " does not end where interval " + std::to_string(j + 1) +
                        " starts");
      }
    }
  }

  static HybridTimeDomain flow(double duration) { return HybridTimeDomain({TimeInterval{0.0, duration}}); }

  /// {0} x {0, ..., jumps}.
  static HybridTimeDomain jumps_only(int jumps) {
    return HybridTimeDomain(std::vector<TimeInterval>(static_cast<std::size_t>(jumps) + 1, TimeInterval{0.0, 0.0}));
  }

  const std::vector<TimeInterval>& intervals() const { return intervals_; }
  const TimeInterval& interval(int j) const { return intervals_.at(static_cast<std::size_t>(j)); }
  int size() const { return static_cast<int>(intervals_.size()); }
  int jumps() const { return size() - 1; }
  double end_time() const { return intervals_.back().t_end; }
  HybridTime max() const { return {end_time(), jumps()}; }
  bool is_point() const { return intervals_.size() == 1 && intervals_.front().t_end == 0.0; }

  /// Purely continuous: no jumps and positive flow time.
  bool is_purely_continuous() const { return jumps() == 0 && end_time() > 0.0; }
  bool is_purely_discrete() const { return end_time() == 0.0; }

  bool contains(HybridTime p) const {
    if (p.j < 0 || p.j >= size()) return false;
    const auto& iv = intervals_[static_cast<std::size_t>(p.j)];
    return iv.t_start <= p.t && p.t <= iv.t_end;
  }

  friend bool operator==(const HybridTimeDomain&, const HybridTimeDomain&) = default;

 private:
  std::vector<TimeInterval> intervals_;
};

/// d1 united with d2 shifted by max d1 (Minkowski sum).
inline HybridTimeDomain domain_union_shift(const HybridTimeDomain& d1, const HybridTimeDomain& d2) {
  const double T = d1.end_time();
  std::vector<TimeInterval> out(d1.intervals());
  out.back().t_end = T + d2.interval(0).t_end;
  for (int k = 1; k < d2.size(); ++k) {
    const auto& iv = d2.interval(k);
    out.push_back({T + iv.t_start, T + iv.t_end});
  }
  return HybridTimeDomain(std::move(out));
}

/// {max d} minus d (Minkowski difference).
inline HybridTimeDomain domain_mirror(const HybridTimeDomain& d) {
  const double T = d.end_time();
  const int J = d.jumps();
  std::vector<TimeInterval> out;
  out.reserve(static_cast<std::size_t>(d.size()));
  for (int k = 0; k <= J; ++k) {
    const auto& iv = d.interval(J - k);
    out.push_back({T - iv.t_end, T - iv.t_start});
  }
  return HybridTimeDomain(std::move(out));
}

/// Samples of a signal on one interval of its domain.
template <int Dim>
struct Phase {
  std::vector<double> times;
  std::vector<Vector<Dim>> values;

  std::size_t size() const { return times.size(); }
  friend bool operator==(const Phase&, const Phase&) = default;
};

/// Hybrid arc or hybrid input sampled on a compact hybrid time domain.
template <int Dim>
class HybridSignal {
 public:
  using Value = Vector<Dim>;

  HybridSignal() : HybridSignal(Value::Zero()) {}

  /// Signal defined on the single point {(0, 0)}.
  explicit HybridSignal(const Value& value) : phases_{Phase<Dim>{{0.0}, {value}}} {}

  HybridSignal(HybridTimeDomain domain, std::vector<Phase<Dim>> phases)
      : domain_(std::move(domain)), phases_(std::move(phases)) {
    if (static_cast<int>(phases_.size()) != domain_.size()) {
      throw Error(ErrorCode::kInvalidDomain, "one sample phase is required per domain interval");
    }
    for (int j = 0; j < domain_.size(); ++j) {
      const auto& ph = phases_[static_cast<std::size_t>(j)];
      const auto& iv = domain_.interval(j);
      if (ph.times.empty() || ph.times.size() != ph.values.size()) {
        throw Error(ErrorCode::kInvalidDomain, "phase " + std::to_string(j) + " has no samples or ragged data");
      }
      if (ph.times.front() != iv.t_start || ph.times.back() != iv.t_end) {
        throw Error(ErrorCode::kInvalidDomain, "phase " + std::to_string(j) + " does not span its interval");
      }
      for (std::size_t k = 1; k < ph.times.size(); ++k) {
        if (!(ph.times[k - 1] < ph.times[k])) {
          throw Error(ErrorCode::kInvalidDomain, "phase " + std::to_string(j) + " times are not increasing");
        }
      }
    }
  }

  static constexpr int dimension() { return Dim; }

  const HybridTimeDomain& domain() const { return domain_; }
  const std::vector<Phase<Dim>>& phases() const { return phases_; }
  const Phase<Dim>& phase(int j) const { return phases_.at(static_cast<std::size_t>(j)); }

  const Value& front() const { return phases_.front().values.front(); }
  const Value& back() const { return phases_.back().values.back(); }

  std::size_t sample_count() const {
    std::size_t n = 0;
    for (const auto& ph : phases_) n += ph.size();
    return n;
  }

  friend bool operator==(const HybridSignal&, const HybridSignal&) = default;

 private:
  HybridTimeDomain domain_;
  std::vector<Phase<Dim>> phases_;
};

/// Hybrid arc of dimension N and hybrid input of dimension M on a shared domain and grid.
template <int N, int M>
class SolutionPair {
 public:
  using State = Vector<N>;
  using Input = Vector<M>;

  SolutionPair() = default;

  SolutionPair(HybridSignal<N> arc, HybridSignal<M> input) : arc_(std::move(arc)), input_(std::move(input)) {
    if (!(arc_.domain() == input_.domain())) {
      throw Error(ErrorCode::kInvalidDomain, "arc and input domains differ");
    }
    for (int j = 0; j < arc_.domain().size(); ++j) {
      if (arc_.phase(j).times != input_.phase(j).times) {
        throw Error(ErrorCode::kInvalidDomain, "arc and input sample grids differ in phase " + std::to_string(j));
      }
    }
  }

  static SolutionPair point(const State& x, const Input& u) {
    return SolutionPair(HybridSignal<N>(x), HybridSignal<M>(u));
  }

  /// Single jump x -> x_plus under input u; domain {(0,0), (0,1)}.
  static SolutionPair jump(const State& x, const State& x_plus, const Input& u) {
    auto domain = HybridTimeDomain::jumps_only(1);
    HybridSignal<N> arc(domain, {Phase<N>{{0.0}, {x}}, Phase<N>{{0.0}, {x_plus}}});
    HybridSignal<M> in(domain, {Phase<M>{{0.0}, {u}}, Phase<M>{{0.0}, {u}}});
    return SolutionPair(std::move(arc), std::move(in));
  }

  const HybridSignal<N>& arc() const { return arc_; }
  const HybridSignal<M>& input() const { return input_; }
  const HybridTimeDomain& domain() const { return arc_.domain(); }
  HybridTime max() const { return domain().max(); }

  const State& start_state() const { return arc_.front(); }
  const State& end_state() const { return arc_.back(); }
  const Input& start_input() const { return input_.front(); }

  bool is_trivial() const { return domain().is_point(); }

  friend bool operator==(const SolutionPair&, const SolutionPair&) = default;

 private:
  HybridSignal<N> arc_;
  HybridSignal<M> input_;
};

/// Concatenation s1 | s2: values of s2 (shifted by max dom s1) win at the seam.
template <int Dim>
HybridSignal<Dim> concatenate(const HybridSignal<Dim>& s1, const HybridSignal<Dim>& s2) {
  const double T = s1.domain().end_time();
  std::vector<Phase<Dim>> phases(s1.phases());
  auto& seam = phases.back();
  seam.times.pop_back();
  seam.values.pop_back();
  for (int k = 0; k < s2.domain().size(); ++k) {
    const auto& src = s2.phase(k);
    if (k > 0) phases.emplace_back();
    auto& dst = phases.back();
    for (std::size_t i = 0; i < src.size(); ++i) {
      dst.times.push_back(T + src.times[i]);
      dst.values.push_back(src.values[i]);
    }
  }
  return HybridSignal<Dim>(domain_union_shift(s1.domain(), s2.domain()), std::move(phases));
}

template <int N, int M>
SolutionPair<N, M> concatenate(const SolutionPair<N, M>& psi1, const SolutionPair<N, M>& psi2) {
  return SolutionPair<N, M>(concatenate(psi1.arc(), psi2.arc()), concatenate(psi1.input(), psi2.input()));
}

/// Fill rule for reversed-input samples that the reversal leaves unconstrained.
enum class BoundaryInputPolicy {
  kCopyNearest,  ///< copy the nearest prescribed sample
  kZero,
};

/// Time mirror of an arc: phi'(t, j) = phi(T - t, J - j).
template <int Dim>
HybridSignal<Dim> reverse_arc(const HybridSignal<Dim>& s) {
  const double T = s.domain().end_time();
  const int J = s.domain().jumps();
  std::vector<Phase<Dim>> phases(static_cast<std::size_t>(J) + 1);
  for (int p = 0; p <= J; ++p) {
    const auto& src = s.phase(J - p);
    auto& dst = phases[static_cast<std::size_t>(p)];
    const std::size_t n = src.size();
    dst.times.resize(n);
    dst.values.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
      dst.times[i] = T - src.times[n - 1 - i];
      dst.values[i] = src.values[n - 1 - i];
    }
  }
  return HybridSignal<Dim>(domain_mirror(s.domain()), std::move(phases));
}

/**
 * Reversal of an input signal under the hold convention.
 *
 * Flow samples take the value held on the mirrored interval, jump instants take
 * the input of the mirrored jump (one jump index earlier), and the terminal
 * sample of the reversed signal, which nothing constrains, is filled by policy.
 */
template <int Dim>
HybridSignal<Dim> reverse_input(const HybridSignal<Dim>& s, BoundaryInputPolicy policy) {
  const double T = s.domain().end_time();
  const int J = s.domain().jumps();
  std::vector<Phase<Dim>> phases(static_cast<std::size_t>(J) + 1);
  for (int p = 0; p <= J; ++p) {
    const int q = J - p;
    const auto& src = s.phase(q);
    auto& dst = phases[static_cast<std::size_t>(p)];
    const std::size_t n = src.size();
    dst.times.resize(n);
    dst.values.resize(n);
    for (std::size_t i = 0; i < n; ++i) dst.times[i] = T - src.times[n - 1 - i];
    for (std::size_t i = 0; i + 1 < n; ++i) dst.values[i] = src.values[n - 2 - i];
    if (p < J) {
      dst.values[n - 1] = s.phase(q - 1).values.back();
    } else if (policy == BoundaryInputPolicy::kZero) {
      dst.values[n - 1] = Vector<Dim>::Zero();
    } else if (n > 1) {
      dst.values[n - 1] = dst.values[n - 2];
    } else if (p > 0) {
      dst.values[n - 1] = phases[static_cast<std::size_t>(p) - 1].values.back();
    } else {
      dst.values[n - 1] = src.values.front();
    }
  }
  return HybridSignal<Dim>(domain_mirror(s.domain()), std::move(phases));
}

template <int N, int M>
SolutionPair<N, M> reverse(const SolutionPair<N, M>& psi,
                           BoundaryInputPolicy policy = BoundaryInputPolicy::kCopyNearest) {
  return SolutionPair<N, M>(reverse_arc(psi.arc()), reverse_input(psi.input(), policy));
}

/**
 * Samples of a signal that a reversal round trip reproduces (all but the terminal one).
 * Values must match exactly; sample times may differ by `time_tol` times the horizon.
 */
template <int Dim>
bool prescribed_samples_equal(const HybridSignal<Dim>& a, const HybridSignal<Dim>& b, double time_tol = 1e-14) {
  if (!(a.domain() == b.domain())) return false;
  const int J = a.domain().jumps();
  const double slack = time_tol * std::max(1.0, a.domain().end_time());
  for (int j = 0; j <= J; ++j) {
    const auto& pa = a.phase(j);
    const auto& pb = b.phase(j);
    if (pa.size() != pb.size()) return false;
    for (std::size_t i = 0; i < pa.size(); ++i) {
      if (std::abs(pa.times[i] - pb.times[i]) > slack) return false;
    }
    const std::size_t n = pa.size() - (j == J ? 1 : 0);
    for (std::size_t i = 0; i < n; ++i) {
      if (pa.values[i] != pb.values[i]) return false;
    }
  }
  return true;
}

}  // namespace hyrrt
