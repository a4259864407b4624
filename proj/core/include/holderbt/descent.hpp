#pragma once

#include <cmath>
#include <cstdint>
#include <iosfwd>
#include <limits>
#include <optional>
#include <string_view>
#include <vector>

#include "holderbt/common.hpp"
#include "holderbt/oracles.hpp"

namespace holderbt {

/// Step-size search parameters shared by every backtracking driver.
struct BacktrackParams {
  double gamma = 1.0;   ///< base step
  double alpha = 0.5;   ///< geometric decrease per backtrack
  double delta = 0.25;  ///< sufficient-decrease constant
  double rho = 0.5;     ///< weight of the gradient-norm factor in the diagonal search
  std::optional<double> delta_plus;  ///< relaxed threshold for decreasing k (non-monotone drivers)
  int k_max = 64;

  void validate() const;
};

struct StopRule {
  double grad_tol = 1e-8;
  std::int64_t max_iters = 100000;
  std::uint64_t max_oracle_calls = std::numeric_limits<std::uint64_t>::max();

  void validate() const;
};

enum class TerminalStatus { kConverged, kIterBudget, kOracleBudget, kKCapExceeded };

std::string_view to_string(TerminalStatus status);

/// One outer iteration. `step` and `k` are those used to leave x_n; the
/// terminal record keeps step = 0 and the current k.
struct TrajectoryRecord {
  std::int64_t n = 0;
  std::uint64_t oracle_calls = 0;
  Vector x;
  double f_value = 0.0;
  double grad_norm = 0.0;
  double step = 0.0;
  int k = 0;
};

struct Trajectory {
  std::vector<TrajectoryRecord> records;
  TerminalStatus terminal_status = TerminalStatus::kIterBudget;

  const TrajectoryRecord& last() const { return records.back(); }
  int max_k() const;
};

/// Inputs of the worst-case bound on the backtracking index k.
struct KBoundInputs {
  HolderCertificate certificate;
  BacktrackParams params;
};

/// The sufficient-decrease test every backtracking driver accepts a step
/// with: f_trial <= f_current - delta * step * |grad|^2. A non-finite trial
/// value never passes.
inline bool sufficient_decrease(double f_trial, double f_current, double delta, double step,
                                double grad_norm) {
  return std::isfinite(f_trial) && f_trial <= f_current - delta * step * grad_norm * grad_norm;
}

/// Known-constant Hoelder step: gamma ((nu+1)/beta)^(1/nu-1) |grad|^(1/nu-1).
double holder_step(double grad_norm, const HolderCertificate& cert, double gamma);

/// Step gamma = (nu+1)/beta (1/(nu+1))^(1/nu) that optimizes the
/// known-constant rate bound.
double holder_optimal_gamma(const HolderCertificate& cert);

/// Diagonal backtracking step alpha^k min{1, |grad|^(rho k)} gamma, with the
/// power evaluated in log space. Requires grad_norm > 0.
double backtrack_step(int k, double grad_norm, const BacktrackParams& params);

/// Armijo step gamma alpha^k.
double armijo_step(int k, const BacktrackParams& params);

/// Upper bound on sup_n k_n for a globally Hoelder gradient:
/// 1 + (1/nu) max{ log((1-delta)(nu+1)/(gamma^nu beta)) / log(alpha), (1-nu)/rho }.
double k_bound(const KBoundInputs& inputs);

// Every driver takes an optional `partial`: if the run throws, it receives
// the records completed before the failure (its terminal_status is then
// meaningless) and the exception propagates unchanged.

/// Gradient descent with the known-constant Hoelder step.
Trajectory holder_gd(const SmoothObjective& obj, const HolderCertificate& cert, double gamma,
                     const Vector& x0, const StopRule& stop = {}, Trajectory* partial = nullptr);

/// Monotone diagonal backtracking: k restarts from k_{n-1} each iteration and
/// only grows.
Trajectory backtrack_holder_gd(const SmoothObjective& obj, const Vector& x0,
                               const BacktrackParams& params, const StopRule& stop = {},
                               Trajectory* partial = nullptr);

/// Same loop with the Armijo step gamma alpha^k.
Trajectory armijo_gd(const SmoothObjective& obj, const Vector& x0, const BacktrackParams& params,
                     const StopRule& stop = {}, Trajectory* partial = nullptr);

/// x_{n+1} = x_n - gamma grad f(x_n).
Trajectory constant_gd(const SmoothObjective& obj, const Vector& x0, double gamma,
                       const StopRule& stop = {}, Trajectory* partial = nullptr);

/// CSV with header `n,oracle_calls,f,grad_norm,step,k`.
void write_csv(std::ostream& out, const Trajectory& traj);

}  // namespace holderbt
