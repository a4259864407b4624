#pragma once

// Outer loop shared by every backtracking driver. Drivers differ only in how a
// point is evaluated (the Model), the step formula and the k update rule, so
// the reduction of the min-max driver to plain descent on the value function
// holds bit for bit.

#include <algorithm>
#include <cstdint>
#include <optional>
#include <utility>
#include <vector>

#include "holderbt/descent.hpp"

namespace holderbt::detail {

enum class KUpdate {
  kMonotone,            // k starts at k_{n-1}, only increases
  kResetEachIteration,  // k starts at 0 every iteration
  kNonMonotone,         // one delta_plus probe may lower k by one
};

enum class StepFormula { kHolder, kArmijo };

struct SearchOptions {
  BacktrackParams params;
  StopRule stop;
  KUpdate k_update = KUpdate::kMonotone;
  StepFormula formula = StepFormula::kHolder;
  int initial_k = 0;
};

struct Point {
  Vector x;
  Vector y;  // empty for plain objectives
  double value = 0.0;
  Vector grad;
  double grad_norm = 0.0;
};

struct Probe {
  Vector x;
  double value = 0.0;
  std::optional<Point> point;  // set when probing already produced the full point
};

struct SearchRecord {
  std::int64_t n = 0;
  std::uint64_t calls = 0;
  Point point;
  double step = 0.0;
  int k = 0;
  double accepted_value = 0.0;
};

struct SearchResult {
  std::vector<SearchRecord> records;
  TerminalStatus status = TerminalStatus::kIterBudget;
};

inline Point make_point(Vector x, Vector y, double value, Vector grad) {
  Point p{std::move(x), std::move(y), value, std::move(grad), 0.0};
  p.grad_norm = p.grad.norm();
  return p;
}

inline void check_point(const Point& p, std::int64_t n) {
  if (!std::isfinite(p.value)) throw NumericError("non-finite objective value", n);
  if (!p.grad.allFinite()) throw NumericError("non-finite gradient", n);
}

/// Model requirements:
///   Point evaluate(const Vector& x, const Point* previous);   // one oracle call
///   Probe probe(const Point& current, Vector x_trial);
///   Point accept(const Point& current, Probe&& probe);
///   std::uint64_t calls() const;
///   static constexpr bool kProbeUsesOracle;
template <class Model>
void run_backtracking(Model& model, const Vector& x0, const SearchOptions& opt, SearchResult& out) {
  const BacktrackParams& prm = opt.params;
  prm.validate();
  opt.stop.validate();
  if (opt.k_update == KUpdate::kNonMonotone && !prm.delta_plus)
    throw ParameterError("non-monotone backtracking needs delta_plus");
  if (opt.initial_k < 0) throw ParameterError("initial k must be nonnegative");

  const auto step_for = [&](int k, double grad_norm) {
    return opt.formula == StepFormula::kHolder ? backtrack_step(k, grad_norm, prm)
                                               : armijo_step(k, prm);
  };
  const auto budget_left = [&] { return model.calls() < opt.stop.max_oracle_calls; };

  out = SearchResult{};
  Point current = model.evaluate(x0, nullptr);
  check_point(current, 0);
  int k = opt.initial_k;
  out.records.push_back({0, model.calls(), current, 0.0, k, 0.0});

  for (std::int64_t n = 0;; ++n) {
    const double g = current.grad_norm;
    if (g == 0.0 || g <= opt.stop.grad_tol) {
      out.status = TerminalStatus::kConverged;
      return;
    }
    if (n >= opt.stop.max_iters) {
      out.status = TerminalStatus::kIterBudget;
      return;
    }
    if (!budget_left()) {
      out.status = TerminalStatus::kOracleBudget;
      return;
    }
    if (opt.k_update == KUpdate::kResetEachIteration) k = 0;

    double step = step_for(k, g);
    Probe trial = model.probe(current, current.x - step * current.grad);
    if (opt.k_update == KUpdate::kNonMonotone &&
        sufficient_decrease(trial.value, current.value, *prm.delta_plus, step, g)) {
      k = std::max(k - 1, 0);
    }
    while (!sufficient_decrease(trial.value, current.value, prm.delta, step, g)) {
      if (++k > prm.k_max) {
        out.status = TerminalStatus::kKCapExceeded;
        return;
      }
      step = step_for(k, g);
      if (Model::kProbeUsesOracle && !budget_left()) {
        out.status = TerminalStatus::kOracleBudget;
        return;
      }
      trial = model.probe(current, current.x - step * current.grad);
    }
    if (!Model::kProbeUsesOracle && !budget_left()) {
      out.status = TerminalStatus::kOracleBudget;
      return;
    }

    SearchRecord& rec = out.records.back();
    rec.step = step;
    rec.k = k;
    rec.accepted_value = trial.value;
    current = model.accept(current, std::move(trial));
    check_point(current, n + 1);
    out.records.push_back({n + 1, model.calls(), current, 0.0, k, 0.0});
  }
}

}  // namespace holderbt::detail
