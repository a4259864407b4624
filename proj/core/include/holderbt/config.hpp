#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>

#include "holderbt/descent.hpp"
#include "holderbt/oracles.hpp"

namespace holderbt {

enum class Algorithm {
  kHolderKnown,
  kBacktrackHolder,
  kNonmonotoneHolder,
  kNonmonotoneArmijo,
  kHeuristicMinmax,
  kConstant,
};

std::string_view to_string(Algorithm algo);
Algorithm parse_algorithm(std::string_view name);

/// One run of one driver on one problem.
///
/// `gamma` is the base step of the backtracking drivers, the fixed step of
/// `constant`, and the known-constant step of `holder_known` (which defaults
/// to the rate-optimal value when unset). `epsilon` unset means
/// 0.01 * mean(C) at the initial parameters.
struct ExperimentConfig {
  std::string id = "run";
  std::string problem_id = "sqrt";
  Algorithm algorithm = Algorithm::kBacktrackHolder;
  std::optional<double> gamma;
  BacktrackParams params;
  StopRule stop;
  std::uint64_t seed = 0;
  int sample_size = 64;
  std::optional<double> epsilon;
  double sinkhorn_tol = 1e-9;
  int max_sweeps = 100000;
  InnerAscentBudget inner;
  std::optional<Vector> x0;

  /// Base step after defaults are applied.
  double base_gamma() const { return gamma.value_or(1.0); }
  void validate() const;
};

/// Applies one `key = value` setting. Unknown keys throw ParameterError.
void apply_setting(ExperimentConfig& config, std::string_view key, std::string_view value);

/// Parses `key = value` lines; `#` starts a comment. Settings are applied on
/// top of `base`.
ExperimentConfig parse_config(std::istream& in, ExperimentConfig base = {});
ExperimentConfig load_config(const std::filesystem::path& path, ExperimentConfig base = {});

/// Serializes every setting in the format parse_config reads.
void write_config(std::ostream& out, const ExperimentConfig& config);

}  // namespace holderbt
