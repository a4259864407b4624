#include <charconv>
#include <cmath>
#include <string>
#include <vector>

#include "holderbt/oracles.hpp"
#include "holderbt/rng.hpp"

namespace holderbt {
namespace {

Vector gaussian_vector(Index dim, std::uint64_t seed) {
  CounterRng rng(seed, streams::kProbe);
  Vector v(dim);
  for (Index i = 0; i < dim; ++i) v[i] = 2.0 * rng.normal();
  return v;
}

}  // namespace

MinMaxProblem make_sqrt_problem() {
  MinMaxProblem p;
  p.name = "sqrt";
  p.dim_x = 1;
  p.dim_y = 1;
  p.sense = Sense::kMinMax;
  p.loss = [](const Vector& x, const Vector& y) { return x[0] * y[0] - y[0] * y[0] * y[0] / 3.0; };
  p.grad_x = [](const Vector&, const Vector& y) { return Vector(y); };
  // For x < 0 the maximizer over R+ sits on the boundary y = 0.
  p.best_response = [](const Vector& x) {
    return Vector::Constant(1, std::sqrt(std::max(x[0], 0.0)));
  };
  p.approx_response = [](const Vector& x, const Vector& y_start, const InnerAscentBudget& b) {
    b.validate();
    double y = y_start[0];
    for (int s = 0; s < b.steps; ++s) y = std::max(0.0, y + b.step_size * (x[0] - y * y));
    return Vector::Constant(1, y);
  };
  p.value_certificate = HolderCertificate{1.0, 0.5, true};
  p.sample_y = [](std::uint64_t seed) {
    CounterRng rng(seed, streams::kProbe);
    return Vector::Constant(1, rng.uniform(0.0, 5.0));
  };
  p.default_x0 = Vector::Ones(1);
  return p;
}

MinMaxProblem make_quadratic_saddle(Index dim) {
  if (dim < 1) throw ParameterError("quadratic saddle needs dim >= 1");
  MinMaxProblem p;
  p.name = "quadratic_saddle:" + std::to_string(dim);
  p.dim_x = dim;
  p.dim_y = dim;
  p.sense = Sense::kMinMax;
  p.loss = [](const Vector& x, const Vector& y) { return x.dot(y) - 0.5 * y.squaredNorm(); };
  p.grad_x = [](const Vector&, const Vector& y) { return Vector(y); };
  p.best_response = [](const Vector& x) { return Vector(x); };
  p.approx_response = [](const Vector& x, const Vector& y_start, const InnerAscentBudget& b) {
    b.validate();
    Vector y = y_start;
    for (int s = 0; s < b.steps; ++s) y += b.step_size * (x - y);
    return y;
  };
  p.value_certificate = HolderCertificate{1.0, 1.0, true};
  p.sample_y = [dim](std::uint64_t seed) { return gaussian_vector(dim, seed); };
  p.default_x0 = Vector::Ones(dim);
  return p;
}

MinMaxProblem make_quadratic_minmin(Index dim) {
  if (dim < 1) throw ParameterError("quadratic min-min needs dim >= 1");
  MinMaxProblem p;
  p.name = "quadratic_minmin:" + std::to_string(dim);
  p.dim_x = dim;
  p.dim_y = dim;
  p.sense = Sense::kMinMin;
  p.loss = [](const Vector& x, const Vector& y) {
    return 0.5 * (x - y).squaredNorm() + 0.5 * y.squaredNorm();
  };
  p.grad_x = [](const Vector& x, const Vector& y) { return Vector(x - y); };
  p.best_response = [](const Vector& x) { return Vector(0.5 * x); };
  p.approx_response = [](const Vector& x, const Vector& y_start, const InnerAscentBudget& b) {
    b.validate();
    Vector y = y_start;
    for (int s = 0; s < b.steps; ++s) y -= b.step_size * (2.0 * y - x);
    return y;
  };
  p.value_certificate = HolderCertificate{0.5, 1.0, true};
  p.sample_y = [dim](std::uint64_t seed) { return gaussian_vector(dim, seed); };
  p.default_x0 = Vector::Constant(dim, 2.0);
  return p;
}

MinMaxProblem make_power_problem(Index dim, double nu) {
  if (dim < 1) throw ParameterError("power problem needs dim >= 1");
  if (!(nu > 0.0 && nu <= 1.0)) throw ParameterError("power problem needs nu in (0, 1]");
  MinMaxProblem p;
  p.name = "power:" + std::to_string(dim) + ":" + std::to_string(nu);
  p.dim_x = dim;
  p.dim_y = 1;
  p.sense = Sense::kMinMax;
  p.loss = [nu](const Vector& x, const Vector& y) {
    return x.array().abs().pow(1.0 + nu).sum() / (1.0 + nu) - 0.5 * y[0] * y[0];
  };
  p.grad_x = [nu](const Vector& x, const Vector&) {
    Vector g(x.size());
    for (Index i = 0; i < x.size(); ++i) g[i] = std::copysign(std::pow(std::abs(x[i]), nu), x[i]);
    return g;
  };
  p.best_response = [](const Vector&) { return Vector::Zero(1).eval(); };
  p.approx_response = [](const Vector&, const Vector& y_start, const InnerAscentBudget& b) {
    b.validate();
    Vector y = y_start;
    for (int s = 0; s < b.steps; ++s) y -= b.step_size * y;
    return y;
  };
  const double beta =
      std::pow(2.0, 1.0 - nu) * std::pow(static_cast<double>(dim), (1.0 - nu) / 2.0);
  p.value_certificate = HolderCertificate{beta, nu, true};
  p.sample_y = [](std::uint64_t seed) { return gaussian_vector(1, seed); };
  p.default_x0 = Vector::Ones(dim);
  return p;
}

namespace {

std::vector<std::string_view> split_id(std::string_view id) {
  std::vector<std::string_view> parts;
  std::size_t start = 0;
  while (true) {
    const std::size_t colon = id.find(':', start);
    parts.push_back(id.substr(start, colon - start));
    if (colon == std::string_view::npos) break;
    start = colon + 1;
  }
  return parts;
}

Index parse_dim(std::string_view text, std::string_view id) {
  long long value = 0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc() || ptr != text.data() + text.size() || value < 1)
    throw ParameterError("bad dimension in problem id '" + std::string(id) + "'");
  return static_cast<Index>(value);
}

double parse_real(std::string_view text, std::string_view id) {
  try {
    std::size_t used = 0;
    const std::string s(text);
    const double v = std::stod(s, &used);
    if (used != s.size()) throw std::invalid_argument("trailing characters");
    return v;
  } catch (const std::exception&) {
    throw ParameterError("bad number in problem id '" + std::string(id) + "'");
  }
}

}  // namespace

MinMaxProblem lookup_problem(std::string_view id) {
  const auto parts = split_id(id);
  const std::string_view name = parts.front();
  if (name == "sqrt" && parts.size() == 1) return make_sqrt_problem();
  if (name == "quadratic_saddle" && parts.size() <= 2)
    return make_quadratic_saddle(parts.size() == 2 ? parse_dim(parts[1], id) : 2);
  if (name == "quadratic_minmin" && parts.size() <= 2)
    return make_quadratic_minmin(parts.size() == 2 ? parse_dim(parts[1], id) : 2);
  if (name == "power" && parts.size() == 3)
    return make_power_problem(parse_dim(parts[1], id), parse_real(parts[2], id));
  throw ParameterError("unknown problem id '" + std::string(id) + "'");
}

}  // namespace holderbt
