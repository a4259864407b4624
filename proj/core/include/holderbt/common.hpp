#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

#include <Eigen/Core>

namespace holderbt {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;
using Index = Eigen::Index;

/// Invalid algorithm or problem parameter (violated precondition).
class ParameterError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Non-finite value or gradient produced by an oracle during a run.
class NumericError : public std::runtime_error {
 public:
  NumericError(const std::string& what, std::int64_t iteration)
      : std::runtime_error(what + " (iteration " + std::to_string(iteration) + ")"),
        iteration_(iteration) {}

  std::int64_t iteration() const { return iteration_; }

 private:
  std::int64_t iteration_;
};

/// An iterative inner solver hit its sweep budget before reaching tolerance.
class NonconvergenceError : public std::runtime_error {
 public:
  NonconvergenceError(const std::string& what, double residual)
      : std::runtime_error(what), residual_(residual) {}

  double residual() const { return residual_; }

 private:
  double residual_;
};

inline bool all_finite(const Vector& v) { return v.allFinite(); }

}  // namespace holderbt
