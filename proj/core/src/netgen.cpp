#include "holderbt/netgen.hpp"

#include <array>
#include <bit>
#include <charconv>
#include <cmath>
#include <cstring>
#include <istream>
#include <ostream>
#include <string>

#include "holderbt/rng.hpp"

namespace holderbt {
namespace {

using RowMajor = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

struct ForwardCache {
  std::vector<Matrix> activations;     // input of each layer (samples x in)
  std::vector<Matrix> preactivations;  // samples x out
};

Matrix forward(const MlpSpec& spec, const FlatParams& theta, const Matrix& inputs,
               ForwardCache* cache) {
  spec.validate();
  if (theta.size() != param_count(spec)) throw ParameterError("parameter vector has wrong length");
  if (inputs.cols() != spec.input_width()) throw ParameterError("input width mismatch");
  Matrix a = inputs;
  Index offset = 0;
  const std::size_t layers = spec.widths.size() - 1;
  for (std::size_t l = 0; l < layers; ++l) {
    const int in = spec.widths[l];
    const int out = spec.widths[l + 1];
    Eigen::Map<const RowMajor> w(theta.data() + offset, out, in);
    offset += static_cast<Index>(in) * out;
    Eigen::Map<const Vector> b(theta.data() + offset, out);
    offset += out;
    Matrix z = a * w.transpose();
    z.rowwise() += b.transpose();
    if (cache != nullptr) {
      cache->activations.push_back(a);
      cache->preactivations.push_back(z);
    }
    a = (l + 1 < layers) ? Matrix(z.cwiseMax(0.0)) : z;
  }
  return a;
}

}  // namespace

void MlpSpec::validate() const {
  if (widths.size() < 2) throw ParameterError("network needs at least input and output widths");
  for (int w : widths)
    if (w < 1) throw ParameterError("layer widths must be positive");
}

MlpSpec MlpSpec::generator() { return MlpSpec{{2, 64, 32, 16, 2}}; }

Index param_count(const MlpSpec& spec) {
  spec.validate();
  Index total = 0;
  for (std::size_t l = 0; l + 1 < spec.widths.size(); ++l)
    total += static_cast<Index>(spec.widths[l]) * spec.widths[l + 1] + spec.widths[l + 1];
  return total;
}

Vector mlp_forward(const MlpSpec& spec, const FlatParams& theta, const Vector& z) {
  spec.validate();
  if (z.size() != spec.input_width()) throw ParameterError("input width mismatch");
  return forward(spec, theta, z.transpose(), nullptr).row(0).transpose();
}

Matrix mlp_forward_batch(const MlpSpec& spec, const FlatParams& theta, const Matrix& inputs) {
  return forward(spec, theta, inputs, nullptr);
}

FlatParams mlp_backward_batch(const MlpSpec& spec, const FlatParams& theta, const Matrix& inputs,
                              const Matrix& upstream) {
  ForwardCache cache;
  forward(spec, theta, inputs, &cache);
  if (upstream.rows() != inputs.rows() || upstream.cols() != spec.output_width())
    throw ParameterError("upstream shape mismatch");

  FlatParams grad = FlatParams::Zero(theta.size());
  const std::size_t layers = spec.widths.size() - 1;
  // Offsets of each layer's block inside theta.
  std::vector<Index> offsets(layers);
  Index offset = 0;
  for (std::size_t l = 0; l < layers; ++l) {
    offsets[l] = offset;
    offset += static_cast<Index>(spec.widths[l]) * spec.widths[l + 1] + spec.widths[l + 1];
  }

  Matrix d_out = upstream;  // d/d(layer output)
  for (std::size_t l = layers; l-- > 0;) {
    const int in = spec.widths[l];
    const int out = spec.widths[l + 1];
    Matrix d_pre = d_out;
    if (l + 1 < layers) {
      d_pre = d_pre.cwiseProduct(
          (cache.preactivations[l].array() > 0.0).cast<double>().matrix());
    }
    Eigen::Map<RowMajor> dw(grad.data() + offsets[l], out, in);
    dw = d_pre.transpose() * cache.activations[l];
    Eigen::Map<Vector> db(grad.data() + offsets[l] + static_cast<Index>(in) * out, out);
    db = d_pre.colwise().sum().transpose();
    if (l > 0) {
      Eigen::Map<const RowMajor> w(theta.data() + offsets[l], out, in);
      d_out = d_pre * w;
    }
  }
  return grad;
}

FlatParams mlp_backward(const MlpSpec& spec, const FlatParams& theta, const Vector& z,
                        const Vector& upstream) {
  spec.validate();
  if (z.size() != spec.input_width()) throw ParameterError("input width mismatch");
  if (upstream.size() != spec.output_width()) throw ParameterError("upstream width mismatch");
  return mlp_backward_batch(spec, theta, z.transpose(), upstream.transpose());
}

FlatParams glorot_init(const MlpSpec& spec, std::uint64_t seed) {
  FlatParams theta = FlatParams::Zero(param_count(spec));
  CounterRng rng(seed, streams::kInit);
  Index offset = 0;
  for (std::size_t l = 0; l + 1 < spec.widths.size(); ++l) {
    const int in = spec.widths[l];
    const int out = spec.widths[l + 1];
    const double limit = std::sqrt(6.0 / (in + out));
    for (Index i = 0; i < static_cast<Index>(in) * out; ++i)
      theta[offset + i] = rng.uniform(-limit, limit);
    offset += static_cast<Index>(in) * out + out;
  }
  return theta;
}

void GanObjective::validate() const {
  spec.validate();
  if (data.rows() < 1 || data.rows() != latents.rows())
    throw ParameterError("data and latents must have the same positive sample count");
  if (latents.cols() != spec.input_width()) throw ParameterError("latent width mismatch");
  if (data.cols() != spec.output_width()) throw ParameterError("data width mismatch");
  if (!(epsilon > 0.0)) throw ParameterError("epsilon must be positive");
}

Matrix generator_cost(const GanObjective& obj, const FlatParams& theta, Matrix* generated) {
  obj.validate();
  const Matrix g = mlp_forward_batch(obj.spec, theta, obj.latents);
  const Index n = g.rows();
  Matrix cost(n, n);
  for (Index j = 0; j < n; ++j)
    for (Index i = 0; i < n; ++i) cost(i, j) = (g.row(i) - obj.data.row(j)).norm();
  if (generated != nullptr) *generated = g;
  return cost;
}

FlatParams gan_grad_for_plan(const GanObjective& obj, const FlatParams& theta, const Matrix& plan) {
  Matrix g;
  const Matrix cost = generator_cost(obj, theta, &g);
  const Index n = g.rows();
  if (plan.rows() != n || plan.cols() != n) throw ParameterError("plan shape mismatch");
  Matrix upstream = Matrix::Zero(n, g.cols());
  for (Index i = 0; i < n; ++i) {
    for (Index j = 0; j < n; ++j) {
      const double dist = cost(i, j);
      if (dist < 1e-12) continue;
      upstream.row(i) += (plan(i, j) / dist) * (g.row(i) - obj.data.row(j));
    }
  }
  return mlp_backward_batch(obj.spec, theta, obj.latents, upstream);
}

GanEvaluation gan_loss_and_grad(const GanObjective& obj, const FlatParams& theta) {
  const Matrix cost = generator_cost(obj, theta);
  GanEvaluation out;
  out.plan = sinkhorn_solve(cost, obj.epsilon, obj.sinkhorn_tol, obj.max_sweeps);
  out.value = entropic_cost(cost, out.plan.plan, obj.epsilon);
  out.gradient = gan_grad_for_plan(obj, theta, out.plan.plan);
  return out;
}

MinMaxProblem as_minmin_problem(const GanObjective& obj) {
  obj.validate();
  const Index n = obj.data.rows();
  MinMaxProblem p;
  p.name = "sinkhorn_gan";
  p.dim_x = param_count(obj.spec);
  p.dim_y = n * n;
  p.sense = Sense::kMinMin;
  p.loss = [obj, n](const Vector& theta, const Vector& y) {
    return entropic_cost(generator_cost(obj, theta), y.reshaped(n, n), obj.epsilon);
  };
  p.grad_x = [obj, n](const Vector& theta, const Vector& y) {
    return gan_grad_for_plan(obj, theta, y.reshaped(n, n));
  };
  p.best_response = [obj](const Vector& theta) {
    const TransportPlan plan =
        sinkhorn_solve(generator_cost(obj, theta), obj.epsilon, obj.sinkhorn_tol, obj.max_sweeps);
    return Vector(plan.plan.reshaped());
  };
  p.sample_y = [n](std::uint64_t seed) {
    CounterRng rng(seed, streams::kProbe);
    Matrix cost(n, n);
    for (Index j = 0; j < n; ++j)
      for (Index i = 0; i < n; ++i) cost(i, j) = rng.uniform(0.0, 3.0);
    return Vector(sinkhorn_solve(cost, 1.0, 1e-12).plan.reshaped());
  };
  return p;
}

void write_params_csv(std::ostream& out, const FlatParams& theta) {
  std::array<char, 32> buf{};
  for (Index i = 0; i < theta.size(); ++i) {
    const auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), theta[i]);
    out.write(buf.data(), ec == std::errc() ? ptr - buf.data() : 0);
    out << '\n';
  }
}

FlatParams read_params_csv(std::istream& in) {
  std::vector<double> values;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    double v = 0.0;
    const auto [ptr, ec] = std::from_chars(line.data(), line.data() + line.size(), v);
    if (ec != std::errc() || ptr != line.data() + line.size())
      throw ParameterError("malformed parameter line: " + line);
    values.push_back(v);
  }
  return Eigen::Map<const Vector>(values.data(), static_cast<Index>(values.size()));
}

void write_params_binary(std::ostream& out, const FlatParams& theta) {
  for (Index i = 0; i < theta.size(); ++i) {
    std::uint64_t bits = std::bit_cast<std::uint64_t>(theta[i]);
    std::array<char, 8> bytes{};
    for (int b = 0; b < 8; ++b) bytes[b] = static_cast<char>((bits >> (8 * b)) & 0xFF);
    out.write(bytes.data(), bytes.size());
  }
}

FlatParams read_params_binary(std::istream& in) {
  std::vector<double> values;
  std::array<char, 8> bytes{};
  while (in.read(bytes.data(), bytes.size())) {
    std::uint64_t bits = 0;
    for (int b = 0; b < 8; ++b)
      bits |= static_cast<std::uint64_t>(static_cast<unsigned char>(bytes[b])) << (8 * b);
    values.push_back(std::bit_cast<double>(bits));
  }
  if (in.gcount() != 0) throw ParameterError("truncated binary parameter file");
  return Eigen::Map<const Vector>(values.data(), static_cast<Index>(values.size()));
}

}  // namespace holderbt
