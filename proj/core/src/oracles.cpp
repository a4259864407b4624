#include "holderbt/oracles.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <utility>
#include <vector>

#include "holderbt/rng.hpp"

namespace holderbt {

void HolderCertificate::validate() const {
  if (!(beta > 0.0) || !std::isfinite(beta)) throw ParameterError("Hoelder beta must be positive");
  if (!(nu > 0.0 && nu <= 1.0)) throw ParameterError("Hoelder nu must lie in (0, 1]");
}

void InnerAscentBudget::validate() const {
  if (steps < 1) throw ParameterError("inner ascent needs at least one step");
  if (!(step_size > 0.0)) throw ParameterError("inner ascent step size must be positive");
}

SmoothObjective::SmoothObjective(Index dim, Evaluator eval,
                                 std::optional<HolderCertificate> certificate)
    : dim_(dim), eval_(std::move(eval)), certificate_(std::move(certificate)) {
  if (dim_ < 1) throw ParameterError("objective dimension must be positive");
  if (!eval_) throw ParameterError("objective evaluator is empty");
  if (certificate_) certificate_->validate();
}

SmoothObjective::SmoothObjective(const SmoothObjective& other)
    : dim_(other.dim_),
      eval_(other.eval_),
      certificate_(other.certificate_),
      calls_(other.call_count()) {}

SmoothObjective& SmoothObjective::operator=(const SmoothObjective& other) {
  if (this != &other) {
    dim_ = other.dim_;
    eval_ = other.eval_;
    certificate_ = other.certificate_;
    calls_.store(other.call_count(), std::memory_order_relaxed);
  }
  return *this;
}

ValueGrad SmoothObjective::eval(const Vector& x) const {
  if (x.size() != dim_) throw ParameterError("objective evaluated at a point of the wrong size");
  calls_.fetch_add(1, std::memory_order_relaxed);
  ValueGrad out = eval_(x);
  if (out.gradient.size() != dim_) throw ParameterError("oracle returned a gradient of the wrong size");
  return out;
}

SmoothObjective value_function(const MinMaxProblem& problem) {
  if (!problem.has_best_response())
    throw ParameterError("value function needs an exact best response: " + problem.name);
  auto eval = [loss = problem.loss, grad = problem.grad_x,
               respond = problem.best_response](const Vector& x) {
    const Vector y = respond(x);
    return ValueGrad{loss(x, y), grad(x, y)};
  };
  return SmoothObjective(problem.dim_x, std::move(eval), problem.value_certificate);
}

Vector finite_diff_gradient(const SmoothObjective& obj, const Vector& x, double h) {
  if (!(h > 0.0)) throw ParameterError("finite-difference step must be positive");
  Vector grad(x.size());
  Vector probe = x;
  for (Index i = 0; i < x.size(); ++i) {
    probe[i] = x[i] + h;
    const double up = obj.value(probe);
    probe[i] = x[i] - h;
    const double down = obj.value(probe);
    probe[i] = x[i];
    grad[i] = (up - down) / (2.0 * h);
  }
  return grad;
}

Vector finite_diff_gradient(const SmoothObjective& obj, const Vector& x) {
  return finite_diff_gradient(obj, x, 1e-6 * std::max(1.0, x.norm()));
}

namespace {

struct LogPair {
  double log_dist;
  double log_diff;
};

// Slope of the upper concave hull of the points at abscissa `at`.
double upper_hull_slope(std::vector<LogPair> pts, double at) {
  std::sort(pts.begin(), pts.end(), [](const LogPair& a, const LogPair& b) {
    return a.log_dist < b.log_dist || (a.log_dist == b.log_dist && a.log_diff < b.log_diff);
  });
  std::vector<LogPair> hull;
  for (const LogPair& p : pts) {
    while (hull.size() >= 2) {
      const LogPair& a = hull[hull.size() - 2];
      const LogPair& b = hull.back();
      // pop b unless it lies strictly above segment a-p
      const double cross =
          (b.log_dist - a.log_dist) * (p.log_diff - a.log_diff) -
          (b.log_diff - a.log_diff) * (p.log_dist - a.log_dist);
      if (cross >= 0.0) hull.pop_back();
      else break;
    }
    if (!hull.empty() && hull.back().log_dist == p.log_dist) hull.pop_back();
    hull.push_back(p);
  }
  if (hull.size() < 2) return 1.0;
  for (std::size_t i = 1; i < hull.size(); ++i) {
    if (at <= hull[i].log_dist || i + 1 == hull.size()) {
      return (hull[i].log_diff - hull[i - 1].log_diff) / (hull[i].log_dist - hull[i - 1].log_dist);
    }
  }
  return 1.0;
}

}  // namespace

HolderCertificate estimate_holder_constants(const SmoothObjective& obj, const Box& region,
                                            int samples, std::uint64_t seed) {
  if (samples < 2) throw ParameterError("need at least two sample pairs");
  if (region.lower.size() != obj.dim() || region.upper.size() != obj.dim())
    throw ParameterError("region dimension does not match the objective");
  if (!((region.upper - region.lower).array() > 0.0).all())
    throw ParameterError("degenerate sampling region (zero volume)");

  CounterRng rng(seed, streams::kProbe);
  std::vector<Vector> points(samples);
  std::vector<Vector> grads(samples);
  for (int s = 0; s < samples; ++s) {
    points[s].resize(obj.dim());
    for (Index i = 0; i < obj.dim(); ++i)
      points[s][i] = rng.uniform(region.lower[i], region.upper[i]);
    grads[s] = obj.eval(points[s]).gradient;
  }

  // Every pair among the sampled points, up to kPartners neighbours each.
  // Pairs anchored at the few points nearest a singularity are what expose
  // a small exponent, so reusing points matters more than fresh pairs.
  constexpr int kPartners = 1024;
  std::vector<double> dists;
  std::vector<double> diffs;
  for (int a = 0; a < samples; ++a) {
    for (int b = a + 1; b < std::min(samples, a + 1 + kPartners); ++b) {
      const double dist = (points[a] - points[b]).norm();
      if (dist < 1e-9) continue;
      dists.push_back(dist);
      diffs.push_back((grads[a] - grads[b]).norm());
    }
  }

  // Supporting line of the upper envelope of (log dist, log diff), taken at
  // the mean log distance; zero differences carry no slope information.
  std::vector<LogPair> pts;
  double mean_log_dist = 0.0;
  for (std::size_t i = 0; i < dists.size(); ++i) {
    if (diffs[i] > 0.0) {
      pts.push_back({std::log(dists[i]), std::log(diffs[i])});
      mean_log_dist += pts.back().log_dist;
    }
  }
  HolderCertificate cert;
  cert.global = false;
  cert.nu = 1.0;
  if (pts.size() >= 2) {
    mean_log_dist /= static_cast<double>(pts.size());
    cert.nu = std::clamp(upper_hull_slope(pts, mean_log_dist), 1e-3, 1.0);
  }
  double beta = 0.0;
  for (std::size_t i = 0; i < dists.size(); ++i)
    beta = std::max(beta, diffs[i] / std::pow(dists[i], cert.nu));
  cert.beta = std::max(beta, std::numeric_limits<double>::min());
  return cert;
}

}  // namespace holderbt
