#pragma once

#include <cstdint>
#include <iosfwd>
#include <vector>

#include "holderbt/common.hpp"
#include "holderbt/oracles.hpp"
#include "holderbt/sinkhorn.hpp"

namespace holderbt {

/// Dense network: affine layers with ReLU between them, identity output.
struct MlpSpec {
  std::vector<int> widths;

  void validate() const;
  int input_width() const { return widths.front(); }
  int output_width() const { return widths.back(); }

  /// 2 -> 64 -> 32 -> 16 -> 2.
  static MlpSpec generator();
};

/// All weights and biases. Per layer: weight matrix (out x in, row-major),
/// then bias (out).
using FlatParams = Vector;

Index param_count(const MlpSpec& spec);

Vector mlp_forward(const MlpSpec& spec, const FlatParams& theta, const Vector& z);
/// Row-wise forward pass; `inputs` is samples x input_width.
Matrix mlp_forward_batch(const MlpSpec& spec, const FlatParams& theta, const Matrix& inputs);

/// Gradient in theta of <upstream, G(z, theta)>. ReLU'(0) is taken as 0.
FlatParams mlp_backward(const MlpSpec& spec, const FlatParams& theta, const Vector& z,
                        const Vector& upstream);
/// Sum over rows of the per-sample gradients of <upstream_r, G(z_r, theta)>.
FlatParams mlp_backward_batch(const MlpSpec& spec, const FlatParams& theta, const Matrix& inputs,
                              const Matrix& upstream);

/// Uniform(-sqrt(6/(fan_in+fan_out)), +sqrt(6/(fan_in+fan_out))) weights, zero biases.
FlatParams glorot_init(const MlpSpec& spec, std::uint64_t seed);

/// Entropic-OT generator objective between G(latents) and fixed data.
struct GanObjective {
  Matrix data;     ///< N x 2 target sample
  Matrix latents;  ///< N x 2 latent sample
  MlpSpec spec = MlpSpec::generator();
  double epsilon = 0.1;
  double sinkhorn_tol = 1e-9;
  int max_sweeps = 100000;

  void validate() const;
};

/// C_ij = |G(z_i, theta) - x_j|. Optionally returns the generated points.
Matrix generator_cost(const GanObjective& obj, const FlatParams& theta,
                      Matrix* generated = nullptr);

/// Gradient of <P, C(theta)> in theta for a fixed plan P. Pairs closer than
/// 1e-12 contribute nothing.
FlatParams gan_grad_for_plan(const GanObjective& obj, const FlatParams& theta, const Matrix& plan);

struct GanEvaluation {
  double value = 0.0;
  FlatParams gradient;
  TransportPlan plan;
};

/// Sinkhorn divergence at theta and its gradient (plan-weighted distance gradients).
GanEvaluation gan_loss_and_grad(const GanObjective& obj, const FlatParams& theta);

/// x := theta, inner variable := plan (N*N, column-major), exact inner
/// oracle := Sinkhorn; sense min-min.
MinMaxProblem as_minmin_problem(const GanObjective& obj);

void write_params_csv(std::ostream& out, const FlatParams& theta);
FlatParams read_params_csv(std::istream& in);
/// Little-endian IEEE-754 doubles, no header.
void write_params_binary(std::ostream& out, const FlatParams& theta);
FlatParams read_params_binary(std::istream& in);

}  // namespace holderbt
