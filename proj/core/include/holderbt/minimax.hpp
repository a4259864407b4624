#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <vector>

#include "holderbt/descent.hpp"
#include "holderbt/oracles.hpp"

namespace holderbt {

struct MinMaxRecord {
  std::int64_t n = 0;
  std::uint64_t oracle_calls = 0;
  Vector x;
  Vector y;
  double loss = 0.0;  ///< L(x_n, y_n)
  double grad_x_norm = 0.0;
  double step = 0.0;
  int k = 0;
  /// Value the acceptance test compared against the decrease threshold.
  /// Equals the next record's loss for exact oracles; for the heuristic
  /// driver it is L(x_{n+1}, y_n). Zero on the terminal record.
  double accepted_value = 0.0;
};

struct MinMaxTrajectory {
  std::vector<MinMaxRecord> records;
  TerminalStatus terminal_status = TerminalStatus::kIterBudget;

  const MinMaxRecord& last() const { return records.back(); }
  int max_k() const;
};

// `partial` behaves as for the descent drivers: on failure it receives the
// records completed so far before the exception propagates.

/// Monotone diagonal backtracking on the value function, one exact inner
/// solve per trial point. Requires a min-max problem with best_response.
MinMaxTrajectory minmax_backtrack(const MinMaxProblem& problem, const Vector& x0,
                                  const BacktrackParams& params, const StopRule& stop = {},
                                  MinMaxTrajectory* partial = nullptr);

/// Non-monotone variant for min-min problems: each iteration first tries the
/// step at k_{n-1} against the stronger delta_plus threshold and, if it
/// passes, lowers k by one (never below zero) for the next iteration.
/// The index starts at `initial_k`.
MinMaxTrajectory minmin_backtrack_nonmonotone(const MinMaxProblem& problem, const Vector& x0,
                                              const BacktrackParams& params,
                                              const StopRule& stop = {}, int initial_k = 1,
                                              MinMaxTrajectory* partial = nullptr);

/// As minmin_backtrack_nonmonotone with the Armijo step gamma alpha^k.
MinMaxTrajectory minmin_armijo_nonmonotone(const MinMaxProblem& problem, const Vector& x0,
                                           const BacktrackParams& params,
                                           const StopRule& stop = {}, int initial_k = 1,
                                           MinMaxTrajectory* partial = nullptr);

/// Heuristic driver for an inexact inner solver: y_n from approx_response,
/// k reset to 0 every iteration, decrease tested with y_n frozen.
MinMaxTrajectory minmax_heuristic(const MinMaxProblem& problem, const Vector& x0,
                                  const BacktrackParams& params, const InnerAscentBudget& inner,
                                  const StopRule& stop = {},
                                  MinMaxTrajectory* partial = nullptr);

/// Constant step on x with y_n from best_response, or from approx_response
/// when `inner` is given or no exact oracle exists.
MinMaxTrajectory minmax_constant(const MinMaxProblem& problem, const Vector& x0, double gamma,
                                 const StopRule& stop = {},
                                 std::optional<InnerAscentBudget> inner = std::nullopt,
                                 MinMaxTrajectory* partial = nullptr);

/// CSV with header `n,oracle_calls,L,grad_x_norm,step,k`.
void write_csv(std::ostream& out, const MinMaxTrajectory& traj);

}  // namespace holderbt
