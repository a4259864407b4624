#include "holderbt/sinkhorn.hpp"

#include <algorithm>
#include <Eigen/Cholesky>
#include <array>
#include <charconv>
#include <cmath>
#include <limits>
#include <ostream>
#include <string>

namespace holderbt {
namespace {

// log sum_k exp(a_k), with a the column `terms`.
double log_sum_exp(const double* terms, Index n) {
  double peak = -std::numeric_limits<double>::infinity();
  for (Index k = 0; k < n; ++k) peak = std::max(peak, terms[k]);
  if (!std::isfinite(peak)) return peak;
  double sum = 0.0;
  for (Index k = 0; k < n; ++k) sum += std::exp(terms[k] - peak);
  return peak + std::log(sum);
}

Matrix plan_from_potentials(const Matrix& cost, const Vector& u, const Vector& v, double eps) {
  const Index n = cost.rows();
  Matrix plan(n, n);
  for (Index j = 0; j < n; ++j)
    for (Index i = 0; i < n; ++i) plan(i, j) = std::exp((u[i] + v[j] - cost(i, j)) / eps);
  return plan;
}

double marginal_violation(const Matrix& plan) {
  const double rows = (plan.rowwise().sum().array() - 1.0).abs().maxCoeff();
  const double cols = (plan.colwise().sum().array() - 1.0).abs().maxCoeff();
  return std::max(rows, cols);
}


struct Marginals {
  Vector rows;
  Vector cols;
  double violation = 0.0;
  double mass = 0.0;
};

Marginals marginals_of(const Matrix& plan) {
  Marginals m;
  m.rows = plan.rowwise().sum();
  m.cols = plan.colwise().sum().transpose();
  m.violation = std::max((m.rows.array() - 1.0).abs().maxCoeff(),
                         (m.cols.array() - 1.0).abs().maxCoeff());
  m.mass = m.rows.sum();
  return m;
}

// Damped Newton ascent on the dual
//   D(u, v) = sum u + sum v + N eps - eps sum_ij exp((u_i + v_j - C_ij)/eps),
// whose Hessian is -(1/eps) [diag(r) P; P^T diag(c)]. Sinkhorn sweeps balance
// each well-connected block of the kernel quickly but move mass between
// weakly coupled blocks at a rate of order exp(-gap/eps); a Newton step
// shifts whole blocks at once. Returns true once the violation is <= tol,
// false if the budget runs out or no step makes progress.
bool newton_polish(const Matrix& cost, double eps, double tol, Vector& u, Vector& v,
                   int budget, int& used, std::vector<double>* trace) {
  const Index n = cost.rows();
  Matrix plan = plan_from_potentials(cost, u, v, eps);
  Marginals m = marginals_of(plan);
  while (m.violation > tol) {
    if (used >= budget) return false;
    ++used;
    const double d0 = u.sum() + v.sum() + static_cast<double>(n) * eps - eps * m.mass;

    Vector grad(2 * n);
    grad << (1.0 - m.rows.array()).matrix(), (1.0 - m.cols.array()).matrix();
    Matrix hess = Matrix::Zero(2 * n, 2 * n);
    hess.topLeftCorner(n, n).diagonal() = m.rows / eps;
    hess.bottomRightCorner(n, n).diagonal() = m.cols / eps;
    hess.topRightCorner(n, n) = plan / eps;
    hess.bottomLeftCorner(n, n) = plan.transpose() / eps;
    // (1, -1) is always in the kernel (potentials are defined up to u + c, v - c).
    hess.diagonal().array() += 1e-10 / eps;
    const Vector dir = hess.ldlt().solve(grad);
    if (!dir.allFinite()) return false;
    const double slope = grad.dot(dir);

    bool accepted = false;
    double t = 1.0;
    for (int halving = 0; halving < 80 && !accepted; ++halving, t *= 0.5) {
      const Vector u1 = u + t * dir.head(n);
      const Vector v1 = v + t * dir.tail(n);
      Matrix plan1 = plan_from_potentials(cost, u1, v1, eps);
      if (!plan1.allFinite()) continue;
      Marginals m1 = marginals_of(plan1);
      const double d1 = u1.sum() + v1.sum() + static_cast<double>(n) * eps - eps * m1.mass;
      // Armijo ascent; near the solution the dual change drops below rounding
      // and a full step that halves the violation is taken instead.
      const bool armijo = d1 >= d0 + 1e-4 * t * slope;
      const bool quadratic = halving == 0 && m1.violation <= 0.5 * m.violation &&
                             d1 >= d0 - 1e-13 * std::abs(d0);
      if (armijo || quadratic) {
        u = u1;
        v = v1;
        plan = std::move(plan1);
        m = std::move(m1);
        accepted = true;
        if (trace != nullptr) trace->push_back(d1);
      }
    }
    if (!accepted) return false;
  }
  return true;
}
}  // namespace

void validate_cost(const Matrix& cost) {
  if (cost.rows() < 1 || cost.rows() != cost.cols())
    throw ParameterError("cost matrix must be square and nonempty");
  if (!cost.allFinite()) throw ParameterError("cost matrix has non-finite entries");
  if ((cost.array() < 0.0).any()) throw ParameterError("cost matrix has negative entries");
}

TransportPlan sinkhorn_solve(const Matrix& cost, double epsilon, const SinkhornOptions& opts) {
  validate_cost(cost);
  if (!(epsilon > 0.0) || !std::isfinite(epsilon)) throw ParameterError("epsilon must be positive");
  if (!(opts.tol > 0.0)) throw ParameterError("Sinkhorn tolerance must be positive");
  if (opts.max_sweeps < 1) throw ParameterError("max_sweeps must be positive");

  const Index n = cost.rows();
  Vector u = Vector::Zero(n);
  Vector v = Vector::Zero(n);
  bool have_u = false;
  if (opts.warm_start != nullptr && opts.warm_start->dual_v.size() == n &&
      opts.warm_start->dual_u.size() == n) {
    u = opts.warm_start->dual_u;
    v = opts.warm_start->dual_v;
    have_u = true;
  }

  TransportPlan out;
  out.epsilon = epsilon;
  auto finish = [&](int sweeps) {
    out.plan = plan_from_potentials(cost, u, v, epsilon);
    out.marginal_err = marginal_violation(out.plan);
    out.sweeps = sweeps;
    return out.marginal_err <= opts.tol;
  };

  // Sweep 0 in the log domain: u_i = -eps lse_j((v_j - C_ij)/eps), then
  // v_j = -eps lse_i((u_i - C_ij)/eps). With a warm start the row sums are
  // checked first.
  {
    const Matrix scaled_t = cost.transpose() / epsilon;
    const Vector v_scaled = v / epsilon;
    Vector terms(n);
    Vector lse(n);
    double row_err = 0.0;
    for (Index i = 0; i < n; ++i) {
      for (Index j = 0; j < n; ++j) terms[j] = v_scaled[j] - scaled_t(j, i);
      lse[i] = log_sum_exp(terms.data(), n);
      row_err = std::max(row_err, std::abs(std::exp(u[i] / epsilon + lse[i]) - 1.0));
    }
    if (have_u && row_err <= opts.tol && finish(0)) {
      out.dual_u = std::move(u);
      out.dual_v = std::move(v);
      return out;
    }
    u = -epsilon * lse;
    const Vector u_scaled = u / epsilon;
    for (Index j = 0; j < n; ++j) {
      for (Index i = 0; i < n; ++i) terms[i] = u_scaled[i] - cost(i, j) / epsilon;
      v[j] = -epsilon * log_sum_exp(terms.data(), n);
    }
    if (opts.dual_trace != nullptr)
      opts.dual_trace->push_back(sinkhorn_dual_objective(cost, u, v, epsilon));
  }

  // Remaining sweeps use scalings a, b of the kernel K_ij = exp((u_i + v_j - C_ij)/eps),
  // so the effective potentials are u + eps log a and v + eps log b. When a
  // scaling leaves [1/kAbsorb, kAbsorb] it is folded into the potentials and
  // the kernel is rebuilt, which keeps every product representable. A solve
  // still open after kNewtonAfter sweeps switches to Newton steps on the dual
  // (each counted as one sweep), falling back to sweeps if those stall.
  constexpr double kAbsorb = 1e30;
  constexpr int kNewtonAfter = 200;
  Matrix kernel = plan_from_potentials(cost, u, v, epsilon);
  Vector a = Vector::Ones(n);
  Vector b = Vector::Ones(n);
  auto absorb = [&]() {
    u.array() += epsilon * a.array().log();
    v.array() += epsilon * b.array().log();
    a.setOnes();
    b.setOnes();
  };

  int sweep = 1;
  for (; sweep < opts.max_sweeps; ++sweep) {
    if (sweep == kNewtonAfter) {
      absorb();
      int used = 0;
      const bool done = newton_polish(cost, epsilon, opts.tol, u, v,
                                      opts.max_sweeps - sweep, used, opts.dual_trace);
      sweep += used;
      if (done && finish(sweep)) {
        out.dual_u = std::move(u);
        out.dual_v = std::move(v);
        return out;
      }
      kernel = plan_from_potentials(cost, u, v, epsilon);
      if (sweep >= opts.max_sweeps) break;
    }
    // Columns are exact after the previous b update; rows are a .* (K b).
    const Vector kb = kernel * b;
    const double row_err = (a.array() * kb.array() - 1.0).abs().maxCoeff();
    if (row_err <= opts.tol) {
      absorb();
      if (finish(sweep)) {
        out.dual_u = std::move(u);
        out.dual_v = std::move(v);
        return out;
      }
      kernel = out.plan;
      continue;
    }
    a = kb.cwiseInverse();
    b = (kernel.transpose() * a).cwiseInverse();
    if (!a.allFinite() || !b.allFinite())
      throw NumericError("Sinkhorn scaling overflowed", sweep);
    const bool drifted = (a.array() > kAbsorb).any() || (a.array() < 1.0 / kAbsorb).any() ||
                         (b.array() > kAbsorb).any() || (b.array() < 1.0 / kAbsorb).any();
    if (drifted) {
      absorb();
      kernel = plan_from_potentials(cost, u, v, epsilon);
    }
    if (opts.dual_trace != nullptr) {
      const Vector ue = u.array() + epsilon * a.array().log();
      const Vector ve = v.array() + epsilon * b.array().log();
      opts.dual_trace->push_back(sinkhorn_dual_objective(cost, ue, ve, epsilon));
    }
  }

  absorb();
  const bool ok = finish(opts.max_sweeps);
  out.dual_u = std::move(u);
  out.dual_v = std::move(v);
  if (ok) return out;
  throw NonconvergenceError("Sinkhorn did not reach tolerance after " +
                                std::to_string(opts.max_sweeps) + " sweeps (marginal error " +
                                std::to_string(out.marginal_err) + ")",
                            out.marginal_err);
}

TransportPlan sinkhorn_solve(const Matrix& cost, double epsilon, double tol, int max_sweeps) {
  SinkhornOptions opts;
  opts.tol = tol;
  opts.max_sweeps = max_sweeps;
  return sinkhorn_solve(cost, epsilon, opts);
}

double entropic_cost(const Matrix& cost, const Matrix& plan, double epsilon) {
  if (cost.rows() != plan.rows() || cost.cols() != plan.cols())
    throw ParameterError("plan and cost shapes differ");
  double transport = 0.0;
  double entropy = 0.0;
  for (Index j = 0; j < cost.cols(); ++j) {
    for (Index i = 0; i < cost.rows(); ++i) {
      const double p = plan(i, j);
      transport += p * cost(i, j);
      if (p > 0.0) entropy += p * std::log(p);
    }
  }
  return transport + epsilon * entropy;
}

double sinkhorn_dual_objective(const Matrix& cost, const Vector& u, const Vector& v,
                               double epsilon) {
  const Index n = cost.rows();
  double mass = 0.0;
  for (Index j = 0; j < n; ++j)
    for (Index i = 0; i < n; ++i) mass += std::exp((u[i] + v[j] - cost(i, j)) / epsilon);
  return u.sum() + v.sum() + static_cast<double>(n) * epsilon - epsilon * mass;
}

double sinkhorn_divergence(const Matrix& cost, double epsilon, double tol, int max_sweeps) {
  const TransportPlan plan = sinkhorn_solve(cost, epsilon, tol, max_sweeps);
  return entropic_cost(cost, plan.plan, epsilon);
}

Matrix sinkhorn_grad_C(const TransportPlan& plan) { return plan.plan; }

void write_plan_csv(std::ostream& out, const TransportPlan& plan) {
  std::array<char, 32> buf{};
  for (Index i = 0; i < plan.plan.rows(); ++i) {
    for (Index j = 0; j < plan.plan.cols(); ++j) {
      const auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), plan.plan(i, j));
      if (j > 0) out << ',';
      out.write(buf.data(), ec == std::errc() ? ptr - buf.data() : 0);
    }
    out << '\n';
  }
}

}  // namespace holderbt
