#include "holderbt/experiment.hpp"

#include <cmath>
#include <exception>
#include <fstream>
#include <future>
#include <numbers>
#include <sstream>
#include <thread>

#include "holderbt/rng.hpp"

namespace holderbt {
namespace {

constexpr std::string_view kGanProblem = "sinkhorn_gan";

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

// Runs the configured driver. On a driver error `result` keeps whatever the
// driver recorded before failing.
void dispatch(const ExperimentConfig& config, RunResult& result) {
  config.validate();
  ResolvedProblem resolved = resolve_problem(config);
  const MinMaxProblem& problem = resolved.problem;
  const Vector& x0 = resolved.x0;

  BacktrackParams params = config.params;
  params.gamma = config.base_gamma();

  result.config = config;
  if (resolved.gan) result.epsilon = resolved.gan->epsilon;

  const auto descent = [&](auto&& driver) {
    Trajectory partial;
    try {
      result.trajectory = driver(&partial);
    } catch (...) {
      result.trajectory = std::move(partial);
      throw;
    }
  };
  const auto minmax = [&](auto&& driver) {
    MinMaxTrajectory partial;
    try {
      result.trajectory = driver(&partial);
    } catch (...) {
      result.trajectory = std::move(partial);
      throw;
    }
  };

  switch (config.algorithm) {
    case Algorithm::kHolderKnown: {
      if (!problem.value_certificate)
        throw ParameterError("holder_known needs a problem with a known Hoelder certificate");
      const HolderCertificate& cert = *problem.value_certificate;
      const double gamma = config.gamma.value_or(holder_optimal_gamma(cert));
      const SmoothObjective g = value_function(problem);
      descent([&](Trajectory* p) { return holder_gd(g, cert, gamma, x0, config.stop, p); });
      break;
    }
    case Algorithm::kBacktrackHolder:
      if (problem.sense == Sense::kMinMax) {
        minmax([&](MinMaxTrajectory* p) {
          return minmax_backtrack(problem, x0, params, config.stop, p);
        });
      } else {
        const SmoothObjective g = value_function(problem);
        descent([&](Trajectory* p) { return backtrack_holder_gd(g, x0, params, config.stop, p); });
      }
      break;
    case Algorithm::kNonmonotoneHolder:
      minmax([&](MinMaxTrajectory* p) {
        return minmin_backtrack_nonmonotone(problem, x0, params, config.stop, 1, p);
      });
      break;
    case Algorithm::kNonmonotoneArmijo:
      minmax([&](MinMaxTrajectory* p) {
        return minmin_armijo_nonmonotone(problem, x0, params, config.stop, 1, p);
      });
      break;
    case Algorithm::kHeuristicMinmax:
      minmax([&](MinMaxTrajectory* p) {
        return minmax_heuristic(problem, x0, params, config.inner, config.stop, p);
      });
      break;
    case Algorithm::kConstant:
      minmax([&](MinMaxTrajectory* p) {
        return minmax_constant(problem, x0, config.base_gamma(), config.stop, std::nullopt, p);
      });
      break;
  }
}

}  // namespace

void GaussianMixtureSpec::validate() const {
  if (components.empty()) throw ParameterError("mixture needs at least one component");
  double total = 0.0;
  for (const GaussianComponent& c : components) {
    if (!(c.weight > 0.0) || !std::isfinite(c.weight))
      throw ParameterError("mixture weights must be positive");
    total += c.weight;
    if (!c.mean.allFinite() || !c.covariance.allFinite())
      throw ParameterError("mixture parameters must be finite");
    if (c.covariance(0, 1) != c.covariance(1, 0))
      throw ParameterError("mixture covariance must be symmetric");
    if (Eigen::LLT<Eigen::Matrix2d>(c.covariance).info() != Eigen::Success ||
        !(c.covariance.determinant() > 0.0))
      throw ParameterError("mixture covariance must be positive definite");
  }
  if (std::abs(total - 1.0) > 1e-12) throw ParameterError("mixture weights must sum to 1");
}

GaussianMixtureSpec GaussianMixtureSpec::ring(int count, double radius, double variance,
                                              std::uint64_t seed) {
  if (count < 1) throw ParameterError("ring needs at least one component");
  GaussianMixtureSpec spec;
  spec.seed = seed;
  for (int c = 0; c < count; ++c) {
    const double angle = 2.0 * std::numbers::pi * c / count;
    GaussianComponent comp;
    comp.mean = Eigen::Vector2d(radius * std::cos(angle), radius * std::sin(angle));
    comp.covariance = variance * Eigen::Matrix2d::Identity();
    comp.weight = 1.0 / count;
    spec.components.push_back(comp);
  }
  return spec;
}

Matrix sample_data(const GaussianMixtureSpec& spec, Index n) {
  if (n < 1) throw ParameterError("sample size must be positive");
  spec.validate();
  std::vector<Eigen::Matrix2d> factors;
  for (const GaussianComponent& c : spec.components)
    factors.push_back(Eigen::LLT<Eigen::Matrix2d>(c.covariance).matrixL());

  CounterRng rng(spec.seed, streams::kData);
  Matrix out(n, 2);
  for (Index i = 0; i < n; ++i) {
    const double u = rng.uniform();
    std::size_t pick = spec.components.size() - 1;
    double cumulative = 0.0;
    for (std::size_t c = 0; c < spec.components.size(); ++c) {
      cumulative += spec.components[c].weight;
      if (u < cumulative) {
        pick = c;
        break;
      }
    }
    const double z0 = rng.normal();
    const double z1 = rng.normal();
    const Eigen::Vector2d draw =
        spec.components[pick].mean + factors[pick] * Eigen::Vector2d(z0, z1);
    out.row(i) = draw.transpose();
  }
  return out;
}

Matrix sample_latents(Index n, std::uint64_t seed) {
  if (n < 1) throw ParameterError("sample size must be positive");
  CounterRng rng(seed, streams::kLatents);
  Matrix out(n, 2);
  for (Index i = 0; i < n; ++i) {
    out(i, 0) = rng.uniform();
    out(i, 1) = rng.uniform();
  }
  return out;
}

ResolvedProblem resolve_problem(const ExperimentConfig& config) {
  ResolvedProblem out;
  if (config.problem_id == kGanProblem) {
    GanObjective obj;
    obj.data = sample_data(GaussianMixtureSpec::ring(8, 2.0, 0.02, config.seed), config.sample_size);
    obj.latents = sample_latents(config.sample_size, config.seed);
    obj.sinkhorn_tol = config.sinkhorn_tol;
    obj.max_sweeps = config.max_sweeps;
    out.x0 = config.x0 ? *config.x0 : glorot_init(obj.spec, config.seed);
    if (out.x0.size() != param_count(obj.spec))
      throw ParameterError("x0 has " + std::to_string(out.x0.size()) + " entries, generator has " +
                           std::to_string(param_count(obj.spec)));
    if (config.epsilon) {
      obj.epsilon = *config.epsilon;
    } else {
      obj.epsilon = 1.0;  // placeholder so the cost can be evaluated
      obj.epsilon = 0.01 * generator_cost(obj, out.x0).mean();
      if (!(obj.epsilon > 0.0)) throw ParameterError("initial cost is zero; set epsilon explicitly");
    }
    out.problem = as_minmin_problem(obj);
    out.gan = std::move(obj);
    return out;
  }
  out.problem = lookup_problem(config.problem_id);
  out.x0 = config.x0 ? *config.x0 : out.problem.default_x0;
  if (out.x0.size() != out.problem.dim_x)
    throw ParameterError("x0 has " + std::to_string(out.x0.size()) + " entries, problem expects " +
                         std::to_string(out.problem.dim_x));
  return out;
}

TerminalStatus RunResult::status() const {
  return std::visit([](const auto& t) { return t.terminal_status; }, trajectory);
}

int RunResult::max_k() const {
  return std::visit([](const auto& t) { return t.max_k(); }, trajectory);
}

std::size_t RunResult::size() const {
  return std::visit([](const auto& t) { return t.records.size(); }, trajectory);
}

std::vector<CurvePoint> RunResult::curve() const {
  std::vector<CurvePoint> out;
  std::visit(Overloaded{
                 [&](const Trajectory& t) {
                   for (const auto& r : t.records) out.push_back({r.oracle_calls, r.f_value});
                 },
                 [&](const MinMaxTrajectory& t) {
                   for (const auto& r : t.records) out.push_back({r.oracle_calls, r.loss});
                 },
             },
             trajectory);
  return out;
}

std::string RunResult::csv() const {
  std::ostringstream out;
  std::visit([&](const auto& t) { write_csv(out, t); }, trajectory);
  return out.str();
}

RunResult run_experiment(const ExperimentConfig& config) {
  RunResult result;
  try {
    dispatch(config, result);
    return result;
  } catch (const ExperimentError&) {
    throw;
  } catch (const std::exception& e) {
    const std::string what =
        std::string(to_string(config.algorithm)) + " on " + config.problem_id + ": " + e.what();
    std::shared_ptr<const RunResult> partial;
    if (result.size() > 0) {
      result.failure = e.what();
      partial = std::make_shared<const RunResult>(std::move(result));
    }
    throw ExperimentError(config.id, what, std::move(partial));
  }
}

std::vector<RunResult> run_all(const std::vector<ExperimentConfig>& configs, unsigned max_threads,
                               bool keep_failures) {
  if (max_threads == 0) max_threads = std::max(1u, std::thread::hardware_concurrency());
  std::vector<std::optional<RunResult>> slots(configs.size());
  std::exception_ptr first_error;

  std::size_t next = 0;
  while (next < configs.size()) {
    std::vector<std::pair<std::size_t, std::future<RunResult>>> batch;
    for (; next < configs.size() && batch.size() < max_threads; ++next) {
      const ExperimentConfig& cfg = configs[next];
      if (max_threads == 1)
        batch.emplace_back(next, std::async(std::launch::deferred, run_experiment, cfg));
      else
        batch.emplace_back(next, std::async(std::launch::async, run_experiment, cfg));
    }
    for (auto& [index, fut] : batch) {
      try {
        slots[index] = fut.get();
      } catch (const ExperimentError& e) {
        if (keep_failures && e.partial() != nullptr)
          slots[index] = *e.partial();
        else if (!first_error)
          first_error = std::current_exception();
      } catch (...) {
        if (!first_error) first_error = std::current_exception();
      }
    }
  }
  if (first_error) std::rethrow_exception(first_error);

  std::vector<RunResult> out;
  out.reserve(slots.size());
  for (auto& slot : slots) out.push_back(std::move(*slot));
  return out;
}

void write_file_atomic(const std::filesystem::path& path, const std::string& content) {
  namespace fs = std::filesystem;
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  fs::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot open " + tmp.string() + " for writing");
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    out.flush();
    if (!out) throw std::runtime_error("write to " + tmp.string() + " failed");
  }
  fs::rename(tmp, path);
}

std::filesystem::path write_run_csv(const RunResult& result, const std::filesystem::path& dir) {
  const std::filesystem::path path = dir / (result.config.id + ".csv");
  write_file_atomic(path, result.csv());
  return path;
}

std::vector<ExperimentConfig> generator_comparison_configs(std::uint64_t seed, int sample_size,
                                                           std::uint64_t oracle_budget) {
  ExperimentConfig base;
  base.problem_id = std::string(kGanProblem);
  base.seed = seed;
  base.sample_size = sample_size;
  base.gamma = 1.0;
  base.params.alpha = 0.5;
  base.params.delta = 0.25;
  base.params.rho = 0.5;
  base.params.delta_plus = 0.95;
  base.stop.grad_tol = 0.0;
  base.stop.max_oracle_calls = oracle_budget;
  base.stop.max_iters = static_cast<std::int64_t>(oracle_budget) + 1;

  std::vector<ExperimentConfig> out;
  ExperimentConfig holder = base;
  holder.id = "nonmonotone_holder";
  holder.algorithm = Algorithm::kNonmonotoneHolder;
  out.push_back(holder);

  ExperimentConfig armijo = base;
  armijo.id = "nonmonotone_armijo";
  armijo.algorithm = Algorithm::kNonmonotoneArmijo;
  out.push_back(armijo);

  for (const auto& [gamma, label] :
       {std::pair{0.01, "0.01"}, std::pair{0.05, "0.05"}, std::pair{0.1, "0.1"}}) {
    ExperimentConfig c = base;
    c.id = std::string("constant_") + label;
    c.algorithm = Algorithm::kConstant;
    c.gamma = gamma;
    out.push_back(c);
  }
  return out;
}

}  // namespace holderbt
