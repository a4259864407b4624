#pragma once

// Shared helpers for the unit tests and the acceptance binary. Everything
// here recomputes quantities from recorded trajectories or from closed
// forms, independently of the drivers under test.

#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "holderbt/descent.hpp"
#include "holderbt/minimax.hpp"
#include "holderbt/oracles.hpp"
#include "holderbt/rng.hpp"

namespace holderbt::testing {

inline Vector uniform_point(CounterRng& rng, Index dim, double lo, double hi) {
  Vector x(dim);
  for (Index i = 0; i < dim; ++i) x[i] = rng.uniform(lo, hi);
  return x;
}

struct ReplayReport {
  bool ok = true;
  std::int64_t first_bad = -1;
  std::string detail;
};

/// Every accepted step of a descent trajectory satisfies
/// f(x_{n+1}) <= f(x_n) - delta * step_n * |grad f(x_n)|^2, using the
/// recorded values.
inline ReplayReport replay_descent(const Trajectory& t, double delta) {
  ReplayReport r;
  for (std::size_t i = 0; i + 1 < t.records.size(); ++i) {
    const auto& a = t.records[i];
    const auto& b = t.records[i + 1];
    if (!sufficient_decrease(b.f_value, a.f_value, delta, a.step, a.grad_norm)) {
      r.ok = false;
      r.first_bad = a.n;
      r.detail = "n=" + std::to_string(a.n);
      return r;
    }
  }
  return r;
}

/// Same check on a min-max trajectory. For exact-oracle drivers the value
/// compared is the next record's loss, which is also checked against
/// accepted_value; for the heuristic driver only accepted_value is defined.
inline ReplayReport replay_minmax(const MinMaxTrajectory& t, double delta, bool exact) {
  ReplayReport r;
  for (std::size_t i = 0; i + 1 < t.records.size(); ++i) {
    const auto& a = t.records[i];
    const auto& b = t.records[i + 1];
    const double value = exact ? b.loss : a.accepted_value;
    bool good = sufficient_decrease(value, a.loss, delta, a.step, a.grad_x_norm);
    if (exact) good = good && a.accepted_value == b.loss;
    if (!good) {
      r.ok = false;
      r.first_bad = a.n;
      r.detail = "n=" + std::to_string(a.n);
      return r;
    }
  }
  return r;
}

}  // namespace holderbt::testing
