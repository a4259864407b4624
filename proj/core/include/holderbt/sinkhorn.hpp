#pragma once

#include <iosfwd>
#include <vector>

#include "holderbt/common.hpp"

namespace holderbt {

/// Entropic transport plan with unit marginals on both sides:
/// P 1 = 1 and P^T 1 = 1 (total mass N, not 1). In the log domain
/// P_ij = exp((u_i + v_j - C_ij) / epsilon).
struct TransportPlan {
  Matrix plan;
  Vector dual_u;
  Vector dual_v;
  double epsilon = 0.0;
  double marginal_err = 0.0;  ///< max(|P1 - 1|_inf, |P^T 1 - 1|_inf)
  int sweeps = 0;
};

struct SinkhornOptions {
  double tol = 1e-9;
  int max_sweeps = 100000;
  /// Initial potentials. If they already meet tol no sweep is run; otherwise
  /// v seeds the first sweep.
  const TransportPlan* warm_start = nullptr;
  /// When set, receives the dual objective after every full sweep.
  std::vector<double>* dual_trace = nullptr;
};

/// Checks that C is square with finite, nonnegative entries.
void validate_cost(const Matrix& cost);

/// Sinkhorn iterations until the marginal violation is <= tol. The first
/// sweep runs in the log domain; later sweeps scale a kernel built from the
/// potentials and fold the scalings back in before they can overflow.
/// Throws NonconvergenceError (carrying the violation) after max_sweeps.
TransportPlan sinkhorn_solve(const Matrix& cost, double epsilon, const SinkhornOptions& opts);
TransportPlan sinkhorn_solve(const Matrix& cost, double epsilon, double tol = 1e-9,
                             int max_sweeps = 100000);

/// <P, C> + epsilon sum P_ij log P_ij, with 0 log 0 = 0.
double entropic_cost(const Matrix& cost, const Matrix& plan, double epsilon);

/// Dual objective sum u + sum v + N epsilon - epsilon sum exp((u_i + v_j - C_ij)/epsilon);
/// equals the entropic cost at the optimum.
double sinkhorn_dual_objective(const Matrix& cost, const Vector& u, const Vector& v,
                               double epsilon);

/// Entropic cost of the optimal plan.
double sinkhorn_divergence(const Matrix& cost, double epsilon, double tol = 1e-9,
                           int max_sweeps = 100000);

/// Gradient of the divergence with respect to C, which is the optimal plan.
Matrix sinkhorn_grad_C(const TransportPlan& plan);

/// Plan entries as CSV rows (debug export).
void write_plan_csv(std::ostream& out, const TransportPlan& plan);

}  // namespace holderbt
