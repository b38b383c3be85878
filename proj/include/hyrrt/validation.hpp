#pragma once

/**
 * @file
 * @brief Residual-based check that a sampled pair is a solution pair of a system.
 *
 * Flow is checked interval by interval: on [t_k, t_{k+1}] the difference
 * quotient of the arc is compared with the trapezoid average of f under the
 * input held on that interval (the value stored at t_k). The allowed residual
 * is max(floor, scale * max|f| * h) + continuity_gap / h, where max|f| is taken
 * over the phase.
 */

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "hyrrt/hybrid_time.hpp"
#include "hyrrt/system.hpp"

namespace hyrrt {

struct ValidationTolerances {
  double set_margin = 1e-6;           ///< allowed positive margin for C and D membership
  double jump_residual = 1e-6;        ///< |phi(t, j+1) - g(phi(t, j), u(t, j))|
  double flow_residual_scale = 10.0;  ///< c / max|f| in the c * h flow tolerance
  double flow_residual_floor = 1e-6;
  double continuity_gap = 0.0;        ///< admissible arc discontinuity in state units
};

enum class ValidationFailureKind {
  kInitialPoint,
  kFlowSet,
  kFlowResidual,
  kJumpSet,
  kJumpResidual,
};

inline const char* to_string(ValidationFailureKind k) {
  switch (k) {
    case ValidationFailureKind::kInitialPoint:
      return "initial_point";
    case ValidationFailureKind::kFlowSet:
      return "flow_set";
    case ValidationFailureKind::kFlowResidual:
      return "flow_residual";
    case ValidationFailureKind::kJumpSet:
      return "jump_set";
    case ValidationFailureKind::kJumpResidual:
      return "jump_residual";
  }
  return "unknown";
}

struct ValidationFailure {
  ValidationFailureKind kind;
  HybridTime at;
  double value = 0.0;
  double tolerance = 0.0;
};

struct ValidationReport {
  bool valid = true;
  double worst_flow_residual = 0.0;
  double worst_set_violation = 0.0;  ///< max positive margin over checked samples
  std::vector<double> jump_residuals;
  std::vector<ValidationFailure> failures;

  std::string summary() const {
    std::string s = valid ? "valid" : "invalid";
    s += " worst_flow_residual=" + std::to_string(worst_flow_residual);
    s += " worst_set_violation=" + std::to_string(worst_set_violation);
    double worst_jump = 0.0;
    for (double r : jump_residuals) worst_jump = std::max(worst_jump, r);
    s += " worst_jump_residual=" + std::to_string(worst_jump);
    if (!failures.empty()) {
      const auto& f = failures.front();
      s += " first_failure=" + std::string(to_string(f.kind)) + "@(" + std::to_string(f.at.t) + "," +
           std::to_string(f.at.j) + ")";
    }
    return s;
  }
};

namespace detail {

// Failures beyond this count are still reflected in `valid` but not listed.
inline constexpr std::size_t kMaxListedFailures = 64;

inline void record(ValidationReport& r, ValidationFailureKind kind, HybridTime at, double value, double tol) {
  r.valid = false;
  if (r.failures.size() < kMaxListedFailures) r.failures.push_back({kind, at, value, tol});
}

}  // namespace detail

template <int N, int M>
ValidationReport validate_solution_pair(const SolutionPair<N, M>& psi, const HybridSystem<N, M>& sys,
                                        const ValidationTolerances& tol = {}) {
  ValidationReport report;
  const auto& arc = psi.arc();
  const auto& in = psi.input();
  const int J = psi.domain().jumps();

  auto set_violation = [&](double margin, ValidationFailureKind kind, HybridTime at) {
    const double v = std::max(margin, 0.0);
    report.worst_set_violation = std::max(report.worst_set_violation, v);
    if (margin > tol.set_margin) detail::record(report, kind, at, margin, tol.set_margin);
  };

  {
    const double m = std::min(sys.flow_margin(arc.front(), in.front()), sys.jump_margin(arc.front(), in.front()));
    if (m > tol.set_margin) detail::record(report, ValidationFailureKind::kInitialPoint, {0.0, 0}, m, tol.set_margin);
  }

  for (int j = 0; j <= J; ++j) {
    const auto& xs = arc.phase(j);
    const auto& us = in.phase(j);
    const std::size_t n = xs.size();
    if (n < 2) continue;

    double f_max = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
      const auto& u = us.values[k + 1 < n ? k : k - 1];
      f_max = std::max(f_max, sys.flow_map(xs.values[k], u).norm());
    }

    for (std::size_t k = 0; k < n; ++k) {
      const auto& u = us.values[k + 1 < n ? k : k - 1];
      set_violation(sys.flow_margin(xs.values[k], u), ValidationFailureKind::kFlowSet, {xs.times[k], j});
    }

    for (std::size_t k = 0; k + 1 < n; ++k) {
      const double h = xs.times[k + 1] - xs.times[k];
      const auto& u = us.values[k];
      const auto& x0 = xs.values[k];
      const auto& x1 = xs.values[k + 1];
      const Vector<N> slope = (x1 - x0) / h;
      const Vector<N> avg = 0.5 * (sys.flow_map(x0, u) + sys.flow_map(x1, u));
      const double r = (slope - avg).norm();
      const double allowed =
          std::max(tol.flow_residual_floor, tol.flow_residual_scale * f_max * h) + tol.continuity_gap / h;
      report.worst_flow_residual = std::max(report.worst_flow_residual, r);
      if (!(r <= allowed)) detail::record(report, ValidationFailureKind::kFlowResidual, {xs.times[k], j}, r, allowed);
    }
  }

  for (int j = 0; j < J; ++j) {
    const auto& pre = arc.phase(j);
    const double t = pre.times.back();
    const auto& x = pre.values.back();
    const auto& u = in.phase(j).values.back();
    const auto& x_plus = arc.phase(j + 1).values.front();
    set_violation(sys.jump_margin(x, u), ValidationFailureKind::kJumpSet, {t, j});
    const double r = sys.jump_map.distance(x, u, x_plus);
    report.jump_residuals.push_back(r);
    const double allowed = tol.jump_residual + tol.continuity_gap;
    if (!(r <= allowed)) detail::record(report, ValidationFailureKind::kJumpResidual, {t, j}, r, allowed);
  }
  return report;
}

}  // namespace hyrrt
