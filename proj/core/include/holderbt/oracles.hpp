#pragma once

#include <atomic>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <string_view>

#include "holderbt/common.hpp"

namespace holderbt {

/// (beta, nu) such that ||grad f(a) - grad f(b)|| <= beta ||a - b||^nu.
struct HolderCertificate {
  double beta = 1.0;
  double nu = 1.0;
  bool global = false;  ///< pair holds on all of R^d

  void validate() const;
};

struct ValueGrad {
  double value = 0.0;
  Vector gradient;
};

/// Value-and-gradient oracle for f: R^dim -> R with an evaluation counter.
///
/// The counter is atomic so one objective may be shared between threads;
/// the evaluator itself must be reentrant.
class SmoothObjective {
 public:
  using Evaluator = std::function<ValueGrad(const Vector&)>;

  SmoothObjective(Index dim, Evaluator eval, std::optional<HolderCertificate> certificate = {});
  SmoothObjective(const SmoothObjective& other);
  SmoothObjective& operator=(const SmoothObjective& other);

  /// Evaluates f and its gradient; counts one oracle call.
  ValueGrad eval(const Vector& x) const;
  double value(const Vector& x) const { return eval(x).value; }

  Index dim() const { return dim_; }
  std::uint64_t call_count() const { return calls_.load(std::memory_order_relaxed); }
  void reset_call_count() { calls_.store(0, std::memory_order_relaxed); }
  const std::optional<HolderCertificate>& certificate() const { return certificate_; }

 private:
  Index dim_;
  Evaluator eval_;
  std::optional<HolderCertificate> certificate_;
  mutable std::atomic<std::uint64_t> calls_{0};
};

enum class Sense { kMinMax, kMinMin };

/// Budget for the inexact inner solver (a few gradient steps on y).
struct InnerAscentBudget {
  int steps = 10;
  double step_size = 0.1;
  bool warm_start = true;

  void validate() const;
};

/// Joint loss L(x, y) with an exact and/or approximate inner oracle.
///
/// `best_response(x)` returns argmax_y L(x, y) for kMinMax and argmin_y for
/// kMinMin. `approx_response(x, y_start, budget)` runs `budget.steps` inner
/// gradient steps from `y_start`. Either may be empty.
struct MinMaxProblem {
  using Loss = std::function<double(const Vector& x, const Vector& y)>;
  using GradX = std::function<Vector(const Vector& x, const Vector& y)>;
  using BestResponse = std::function<Vector(const Vector& x)>;
  using ApproxResponse =
      std::function<Vector(const Vector& x, const Vector& y_start, const InnerAscentBudget&)>;

  std::string name;
  Index dim_x = 0;
  Index dim_y = 0;
  Sense sense = Sense::kMinMax;
  Loss loss;
  GradX grad_x;
  BestResponse best_response;
  ApproxResponse approx_response;
  /// Hoelder pair of the value function's gradient, when known.
  std::optional<HolderCertificate> value_certificate;
  /// Draws a point of the inner feasible set Y (used by property checks).
  std::function<Vector(std::uint64_t seed)> sample_y;
  /// Starting point used when a run does not specify one.
  Vector default_x0;

  bool has_best_response() const { return static_cast<bool>(best_response); }
  bool has_approx_response() const { return static_cast<bool>(approx_response); }
};

/// g(x) = L(x, p(x)) with gradient grad_x L(x, p(x)); one call per evaluation.
SmoothObjective value_function(const MinMaxProblem& problem);

/// L(x, y) = x y - y^3 / 3 over y >= 0; p(x) = sqrt(max(x, 0)).
MinMaxProblem make_sqrt_problem();

/// L(x, y) = <x, y> - |y|^2 / 2 over R^dim; p(x) = x, g(x) = |x|^2 / 2.
MinMaxProblem make_quadratic_saddle(Index dim);

/// Min-min twin: L(x, y) = |x - y|^2 / 2 + |y|^2 / 2; p(x) = x / 2, g(x) = |x|^2 / 4.
MinMaxProblem make_quadratic_minmin(Index dim);

/// Separable power objective as a min-max problem with a scalar inner
/// variable: L(x, y) = sum |x_i|^(1+nu) / (1+nu) - y^2 / 2, so p(x) = 0 and
/// grad g is globally (2^(1-nu) dim^((1-nu)/2), nu)-Hoelder.
MinMaxProblem make_power_problem(Index dim, double nu);

/// Central differences with step h per coordinate.
Vector finite_diff_gradient(const SmoothObjective& obj, const Vector& x, double h);
/// Step h = 1e-6 * max(1, |x|).
Vector finite_diff_gradient(const SmoothObjective& obj, const Vector& x);

struct Box {
  Vector lower;
  Vector upper;
};

/// Empirical Hoelder pair from `samples` uniform points of `region` and the
/// pairs among them. nu is the slope of the upper envelope of
/// (log distance, log gradient difference); beta makes the inequality hold
/// on every sampled pair.
HolderCertificate estimate_holder_constants(const SmoothObjective& obj, const Box& region,
                                            int samples, std::uint64_t seed);

/// Analytic problems by id: "sqrt", "quadratic_saddle:<dim>",
/// "quadratic_minmin:<dim>", "power:<dim>:<nu>". Throws ParameterError on an
/// unknown id.
MinMaxProblem lookup_problem(std::string_view id);

}  // namespace holderbt
