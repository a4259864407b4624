#include "holderbt/descent.hpp"

#include <algorithm>
#include <cmath>

#include "backtracking_engine.hpp"

namespace holderbt {

void BacktrackParams::validate() const {
  if (!(gamma > 0.0) || !std::isfinite(gamma)) throw ParameterError("gamma must be positive");
  if (!(alpha > 0.0 && alpha < 1.0)) throw ParameterError("alpha must lie in (0, 1)");
  if (!(delta > 0.0 && delta < 1.0)) throw ParameterError("delta must lie in (0, 1)");
  if (!(rho > 0.0) || !std::isfinite(rho)) throw ParameterError("rho must be positive");
  if (delta_plus && !(*delta_plus > delta && *delta_plus < 1.0))
    throw ParameterError("delta_plus must lie in (delta, 1)");
  if (k_max < 1) throw ParameterError("k_max must be positive");
}

void StopRule::validate() const {
  if (!(grad_tol >= 0.0)) throw ParameterError("grad_tol must be nonnegative");
  if (max_iters < 1) throw ParameterError("max_iters must be positive");
  if (max_oracle_calls < 1) throw ParameterError("max_oracle_calls must be positive");
}

std::string_view to_string(TerminalStatus status) {
  switch (status) {
    case TerminalStatus::kConverged: return "converged";
    case TerminalStatus::kIterBudget: return "iter_budget";
    case TerminalStatus::kOracleBudget: return "oracle_budget";
    case TerminalStatus::kKCapExceeded: return "k_cap_exceeded";
  }
  return "unknown";
}

int Trajectory::max_k() const {
  int best = 0;
  for (const auto& r : records) best = std::max(best, r.k);
  return best;
}

double holder_step(double grad_norm, const HolderCertificate& cert, double gamma) {
  cert.validate();
  const double upper = (cert.nu + 1.0) / cert.beta;
  if (!(gamma > 0.0 && gamma < upper))
    throw ParameterError("Hoelder step needs 0 < gamma < (nu+1)/beta");
  if (!(grad_norm >= 0.0)) throw ParameterError("gradient norm must be nonnegative");
  const double exponent = 1.0 / cert.nu - 1.0;
  return gamma * std::pow(upper, exponent) * std::pow(grad_norm, exponent);
}

double holder_optimal_gamma(const HolderCertificate& cert) {
  cert.validate();
  return (cert.nu + 1.0) / cert.beta * std::pow(1.0 / (cert.nu + 1.0), 1.0 / cert.nu);
}

double backtrack_step(int k, double grad_norm, const BacktrackParams& params) {
  if (!(grad_norm > 0.0)) throw ParameterError("backtrack step needs a nonzero gradient");
  if (k < 0) throw ParameterError("backtrack index must be nonnegative");
  const double norm_factor = std::min(1.0, std::exp(params.rho * k * std::log(grad_norm)));
  return std::pow(params.alpha, k) * norm_factor * params.gamma;
}

double armijo_step(int k, const BacktrackParams& params) {
  if (k < 0) throw ParameterError("backtrack index must be nonnegative");
  return params.gamma * std::pow(params.alpha, k);
}

double k_bound(const KBoundInputs& inputs) {
  const HolderCertificate& c = inputs.certificate;
  const BacktrackParams& p = inputs.params;
  c.validate();
  p.validate();
  if (!c.global) throw ParameterError("k bound needs a global Hoelder certificate");
  const double scale_term =
      std::log((1.0 - p.delta) * (c.nu + 1.0) / (std::pow(p.gamma, c.nu) * c.beta)) /
      std::log(p.alpha);
  const double exponent_term = (1.0 - c.nu) / p.rho;
  return 1.0 + std::max(scale_term, exponent_term) / c.nu;
}

namespace {

class ObjectiveModel {
 public:
  static constexpr bool kProbeUsesOracle = true;

  explicit ObjectiveModel(const SmoothObjective& obj) : obj_(obj), start_(obj.call_count()) {}

  detail::Point evaluate(const Vector& x, const detail::Point*) {
    ValueGrad vg = obj_.eval(x);
    return detail::make_point(x, Vector(), vg.value, std::move(vg.gradient));
  }
  detail::Probe probe(const detail::Point&, Vector x_trial) {
    detail::Point p = evaluate(x_trial, nullptr);
    const double value = p.value;
    return {std::move(x_trial), value, std::move(p)};
  }
  detail::Point accept(const detail::Point&, detail::Probe&& probe) { return std::move(*probe.point); }
  std::uint64_t calls() const { return obj_.call_count() - start_; }

 private:
  const SmoothObjective& obj_;
  std::uint64_t start_;
};

Trajectory to_trajectory(detail::SearchResult&& result) {
  Trajectory t;
  t.terminal_status = result.status;
  t.records.reserve(result.records.size());
  for (auto& r : result.records) {
    t.records.push_back({r.n, r.calls, std::move(r.point.x), r.point.value, r.point.grad_norm,
                         r.step, r.k});
  }
  return t;
}

Trajectory run_descent(const SmoothObjective& obj, const Vector& x0, const BacktrackParams& params,
                       const StopRule& stop, detail::StepFormula formula, Trajectory* partial) {
  ObjectiveModel model(obj);
  detail::SearchOptions opt{params, stop, detail::KUpdate::kMonotone, formula, 0};
  detail::SearchResult out;
  try {
    detail::run_backtracking(model, x0, opt, out);
  } catch (...) {
    if (partial != nullptr) *partial = to_trajectory(std::move(out));
    throw;
  }
  return to_trajectory(std::move(out));
}

// Fixed-step loop shared by the known-constant and constant-step methods.
template <class StepFn>
Trajectory run_explicit(const SmoothObjective& obj, const Vector& x0, const StopRule& stop,
                        Trajectory* partial, StepFn&& step_of) {
  stop.validate();
  const std::uint64_t start = obj.call_count();
  Trajectory t;
  try {
    Vector x = x0;
    ValueGrad cur = obj.eval(x);
    for (std::int64_t n = 0;; ++n) {
      if (!std::isfinite(cur.value)) throw NumericError("non-finite objective value", n);
      if (!cur.gradient.allFinite()) throw NumericError("non-finite gradient", n);
      const double g = cur.gradient.norm();
      t.records.push_back({n, obj.call_count() - start, x, cur.value, g, 0.0, 0});
      if (g == 0.0 || g <= stop.grad_tol) {
        t.terminal_status = TerminalStatus::kConverged;
        return t;
      }
      if (n >= stop.max_iters) {
        t.terminal_status = TerminalStatus::kIterBudget;
        return t;
      }
      if (obj.call_count() - start >= stop.max_oracle_calls) {
        t.terminal_status = TerminalStatus::kOracleBudget;
        return t;
      }
      const double step = step_of(g);
      t.records.back().step = step;
      x -= step * cur.gradient;
      cur = obj.eval(x);
    }
  } catch (...) {
    if (partial != nullptr) *partial = std::move(t);
    throw;
  }
}

}  // namespace

Trajectory holder_gd(const SmoothObjective& obj, const HolderCertificate& cert, double gamma,
                     const Vector& x0, const StopRule& stop, Trajectory* partial) {
  holder_step(0.0, cert, gamma);  // parameter checks
  return run_explicit(obj, x0, stop, partial, [&](double g) { return holder_step(g, cert, gamma); });
}

Trajectory backtrack_holder_gd(const SmoothObjective& obj, const Vector& x0,
                               const BacktrackParams& params, const StopRule& stop,
                               Trajectory* partial) {
  return run_descent(obj, x0, params, stop, detail::StepFormula::kHolder, partial);
}

Trajectory armijo_gd(const SmoothObjective& obj, const Vector& x0, const BacktrackParams& params,
                     const StopRule& stop, Trajectory* partial) {
  return run_descent(obj, x0, params, stop, detail::StepFormula::kArmijo, partial);
}

Trajectory constant_gd(const SmoothObjective& obj, const Vector& x0, double gamma,
                       const StopRule& stop, Trajectory* partial) {
  if (!(gamma > 0.0) || !std::isfinite(gamma)) throw ParameterError("gamma must be positive");
  return run_explicit(obj, x0, stop, partial, [gamma](double) { return gamma; });
}

}  // namespace holderbt
