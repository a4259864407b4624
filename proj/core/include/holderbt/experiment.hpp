#pragma once

#include <cstdint>
#include <filesystem>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include <Eigen/Dense>

#include "holderbt/config.hpp"
#include "holderbt/descent.hpp"
#include "holderbt/minimax.hpp"
#include "holderbt/netgen.hpp"

namespace holderbt {

struct GaussianComponent {
  Eigen::Vector2d mean = Eigen::Vector2d::Zero();
  Eigen::Matrix2d covariance = Eigen::Matrix2d::Identity();
  double weight = 1.0;
};

struct GaussianMixtureSpec {
  std::vector<GaussianComponent> components;
  std::uint64_t seed = 0;

  /// Weights positive and summing to 1 (within 1e-12), covariances symmetric
  /// positive definite.
  void validate() const;

  /// `count` equal-weight isotropic components with means evenly spaced on a
  /// circle of `radius`.
  static GaussianMixtureSpec ring(int count = 8, double radius = 2.0, double variance = 0.02,
                                  std::uint64_t seed = 0);
};

/// N x 2 draw: categorical component by weight, then a Gaussian draw.
Matrix sample_data(const GaussianMixtureSpec& spec, Index n);

/// N x 2 uniform sample of the unit square.
Matrix sample_latents(Index n, std::uint64_t seed);

/// Problem instance built from a config.
struct ResolvedProblem {
  MinMaxProblem problem;
  Vector x0;
  std::optional<GanObjective> gan;  ///< set for "sinkhorn_gan"
};

/// Registry lookup plus the Sinkhorn generator problem ("sinkhorn_gan"),
/// whose data, latents and initial parameters all derive from config.seed.
ResolvedProblem resolve_problem(const ExperimentConfig& config);

struct CurvePoint {
  std::uint64_t oracle_calls = 0;
  double loss = 0.0;
};

struct RunResult {
  ExperimentConfig config;
  std::variant<Trajectory, MinMaxTrajectory> trajectory;
  std::optional<double> epsilon;  ///< resolved Sinkhorn epsilon, if any
  /// Set when the driver stopped with an error; the trajectory then holds
  /// the records completed before it.
  std::optional<std::string> failure;

  TerminalStatus status() const;
  int max_k() const;
  std::size_t size() const;
  /// One point per record: (oracle_calls, objective or loss).
  std::vector<CurvePoint> curve() const;
  std::string csv() const;
};

/// Error raised by a driver, tagged with the config it ran under. Carries the
/// partial run when the driver got past its first record.
class ExperimentError : public std::runtime_error {
 public:
  ExperimentError(const std::string& config_id, const std::string& what,
                  std::shared_ptr<const RunResult> partial = nullptr)
      : std::runtime_error("run '" + config_id + "': " + what),
        config_id_(config_id),
        partial_(std::move(partial)) {}
  const std::string& config_id() const { return config_id_; }
  const RunResult* partial() const { return partial_.get(); }

 private:
  std::string config_id_;
  std::shared_ptr<const RunResult> partial_;
};

RunResult run_experiment(const ExperimentConfig& config);

/// Runs every config, concurrently when `max_threads` > 1; results keep the
/// input order. With `keep_failures`, a run that failed after recording at
/// least one point is returned with `failure` set; any other error is
/// rethrown once all runs have finished.
std::vector<RunResult> run_all(const std::vector<ExperimentConfig>& configs,
                               unsigned max_threads = 0, bool keep_failures = false);

/// Writes `content` to a sibling temporary file and renames it into place.
void write_file_atomic(const std::filesystem::path& path, const std::string& content);

/// Writes `<dir>/<id>.csv`. Returns the path written.
std::filesystem::path write_run_csv(const RunResult& result, const std::filesystem::path& dir);

/// Non-monotone Holder, non-monotone Armijo and the three constant-step
/// baselines (0.01, 0.05, 0.1) on the Sinkhorn generator problem, all with
/// the same oracle-call budget.
std::vector<ExperimentConfig> generator_comparison_configs(std::uint64_t seed, int sample_size,
                                                           std::uint64_t oracle_budget);

}  // namespace holderbt
