#include "holderbt/minimax.hpp"

#include <algorithm>
#include <cmath>

#include "backtracking_engine.hpp"

namespace holderbt {
namespace {

void check_problem(const MinMaxProblem& problem, const Vector& x0) {
  if (!problem.loss || !problem.grad_x) throw ParameterError("problem lacks loss or grad_x");
  if (x0.size() != problem.dim_x) throw ParameterError("x0 has the wrong dimension");
}

// One exact inner solve per evaluated point.
class ExactModel {
 public:
  static constexpr bool kProbeUsesOracle = true;

  explicit ExactModel(const MinMaxProblem& problem) : problem_(problem) {}

  detail::Point evaluate(const Vector& x, const detail::Point*) {
    ++calls_;
    Vector y = problem_.best_response(x);
    const double value = problem_.loss(x, y);
    Vector grad = problem_.grad_x(x, y);
    return detail::make_point(x, std::move(y), value, std::move(grad));
  }
  detail::Probe probe(const detail::Point&, Vector x_trial) {
    detail::Point p = evaluate(x_trial, nullptr);
    const double value = p.value;
    return {std::move(x_trial), value, std::move(p)};
  }
  detail::Point accept(const detail::Point&, detail::Probe&& probe) { return std::move(*probe.point); }
  std::uint64_t calls() const { return calls_; }

 private:
  const MinMaxProblem& problem_;
  std::uint64_t calls_ = 0;
};

// Inexact inner solver; trial points are tested with y_n frozen and only an
// accepted point triggers a new inner solve.
class HeuristicModel {
 public:
  static constexpr bool kProbeUsesOracle = false;

  HeuristicModel(const MinMaxProblem& problem, const InnerAscentBudget& inner)
      : problem_(problem), inner_(inner) {}

  detail::Point evaluate(const Vector& x, const detail::Point* previous) {
    ++calls_;
    const Vector start = (inner_.warm_start && previous != nullptr)
                             ? previous->y
                             : Vector::Zero(problem_.dim_y).eval();
    Vector y = problem_.approx_response(x, start, inner_);
    const double value = problem_.loss(x, y);
    Vector grad = problem_.grad_x(x, y);
    return detail::make_point(x, std::move(y), value, std::move(grad));
  }
  detail::Probe probe(const detail::Point& current, Vector x_trial) {
    const double value = problem_.loss(x_trial, current.y);
    return {std::move(x_trial), value, std::nullopt};
  }
  detail::Point accept(const detail::Point& current, detail::Probe&& probe) {
    return evaluate(probe.x, &current);
  }
  std::uint64_t calls() const { return calls_; }

 private:
  const MinMaxProblem& problem_;
  InnerAscentBudget inner_;
  std::uint64_t calls_ = 0;
};

MinMaxTrajectory to_trajectory(detail::SearchResult&& result) {
  MinMaxTrajectory t;
  t.terminal_status = result.status;
  t.records.reserve(result.records.size());
  for (auto& r : result.records) {
    t.records.push_back({r.n, r.calls, std::move(r.point.x), std::move(r.point.y), r.point.value,
                         r.point.grad_norm, r.step, r.k, r.accepted_value});
  }
  return t;
}

template <class Model>
MinMaxTrajectory run_search(Model& model, const Vector& x0, const detail::SearchOptions& opt,
                            MinMaxTrajectory* partial) {
  detail::SearchResult out;
  try {
    detail::run_backtracking(model, x0, opt, out);
  } catch (...) {
    if (partial != nullptr) *partial = to_trajectory(std::move(out));
    throw;
  }
  return to_trajectory(std::move(out));
}

MinMaxTrajectory run_exact(const MinMaxProblem& problem, const Vector& x0,
                           const detail::SearchOptions& opt, MinMaxTrajectory* partial) {
  check_problem(problem, x0);
  if (!problem.has_best_response())
    throw ParameterError("driver needs an exact best response: " + problem.name);
  ExactModel model(problem);
  return run_search(model, x0, opt, partial);
}

MinMaxTrajectory run_nonmonotone(const MinMaxProblem& problem, const Vector& x0,
                                 const BacktrackParams& params, const StopRule& stop,
                                 int initial_k, detail::StepFormula formula,
                                 MinMaxTrajectory* partial) {
  if (problem.sense != Sense::kMinMin)
    throw ParameterError("non-monotone drivers expect a min-min problem: " + problem.name);
  if (!params.delta_plus) throw ParameterError("non-monotone drivers need delta_plus");
  return run_exact(problem, x0,
                   {params, stop, detail::KUpdate::kNonMonotone, formula, initial_k}, partial);
}

}  // namespace

int MinMaxTrajectory::max_k() const {
  int best = 0;
  for (const auto& r : records) best = std::max(best, r.k);
  return best;
}

MinMaxTrajectory minmax_backtrack(const MinMaxProblem& problem, const Vector& x0,
                                  const BacktrackParams& params, const StopRule& stop,
                                  MinMaxTrajectory* partial) {
  if (problem.sense != Sense::kMinMax)
    throw ParameterError("minmax_backtrack expects a min-max problem: " + problem.name);
  return run_exact(problem, x0,
                   {params, stop, detail::KUpdate::kMonotone, detail::StepFormula::kHolder, 0},
                   partial);
}

MinMaxTrajectory minmin_backtrack_nonmonotone(const MinMaxProblem& problem, const Vector& x0,
                                              const BacktrackParams& params,
                                              const StopRule& stop, int initial_k,
                                              MinMaxTrajectory* partial) {
  return run_nonmonotone(problem, x0, params, stop, initial_k, detail::StepFormula::kHolder,
                         partial);
}

MinMaxTrajectory minmin_armijo_nonmonotone(const MinMaxProblem& problem, const Vector& x0,
                                           const BacktrackParams& params,
                                           const StopRule& stop, int initial_k,
                                           MinMaxTrajectory* partial) {
  return run_nonmonotone(problem, x0, params, stop, initial_k, detail::StepFormula::kArmijo,
                         partial);
}

MinMaxTrajectory minmax_heuristic(const MinMaxProblem& problem, const Vector& x0,
                                  const BacktrackParams& params, const InnerAscentBudget& inner,
                                  const StopRule& stop, MinMaxTrajectory* partial) {
  check_problem(problem, x0);
  inner.validate();
  if (!problem.has_approx_response())
    throw ParameterError("heuristic driver needs approx_response: " + problem.name);
  HeuristicModel model(problem, inner);
  return run_search(
      model, x0,
      {params, stop, detail::KUpdate::kResetEachIteration, detail::StepFormula::kHolder, 0},
      partial);
}

MinMaxTrajectory minmax_constant(const MinMaxProblem& problem, const Vector& x0, double gamma,
                                 const StopRule& stop, std::optional<InnerAscentBudget> inner,
                                 MinMaxTrajectory* partial) {
  check_problem(problem, x0);
  stop.validate();
  if (!(gamma > 0.0) || !std::isfinite(gamma)) throw ParameterError("gamma must be positive");
  const bool exact = problem.has_best_response() && !inner;
  if (!exact) {
    if (!problem.has_approx_response())
      throw ParameterError("problem has no inner oracle: " + problem.name);
    if (!inner) inner = InnerAscentBudget{};
    inner->validate();
  }

  MinMaxTrajectory t;
  try {
    std::uint64_t calls = 0;
    Vector x = x0;
    Vector y = Vector::Zero(problem.dim_y);
    for (std::int64_t n = 0;; ++n) {
      ++calls;
      if (exact) {
        y = problem.best_response(x);
      } else {
        const Vector start = inner->warm_start ? y : Vector::Zero(problem.dim_y).eval();
        y = problem.approx_response(x, start, *inner);
      }
      const double value = problem.loss(x, y);
      const Vector grad = problem.grad_x(x, y);
      if (!std::isfinite(value)) throw NumericError("non-finite loss", n);
      if (!grad.allFinite()) throw NumericError("non-finite gradient", n);
      const double g = grad.norm();
      t.records.push_back({n, calls, x, y, value, g, 0.0, 0, 0.0});
      if (g == 0.0 || g <= stop.grad_tol) {
        t.terminal_status = TerminalStatus::kConverged;
        return t;
      }
      if (n >= stop.max_iters) {
        t.terminal_status = TerminalStatus::kIterBudget;
        return t;
      }
      if (calls >= stop.max_oracle_calls) {
        t.terminal_status = TerminalStatus::kOracleBudget;
        return t;
      }
      t.records.back().step = gamma;
      x -= gamma * grad;
    }
  } catch (...) {
    if (partial != nullptr) *partial = std::move(t);
    throw;
  }
}

}  // namespace holderbt
