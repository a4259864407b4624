#include <benchmark/benchmark.h>

#include "holderbt/descent.hpp"
#include "holderbt/minimax.hpp"
#include "holderbt/netgen.hpp"
#include "holderbt/oracles.hpp"
#include "holderbt/rng.hpp"
#include "holderbt/sinkhorn.hpp"

namespace {

using namespace holderbt;

Matrix random_cost(Index n, std::uint64_t seed) {
  CounterRng rng(seed, 0);
  Matrix c(n, n);
  for (Index j = 0; j < n; ++j)
    for (Index i = 0; i < n; ++i) c(i, j) = rng.uniform(0.0, 4.0);
  return c;
}

void BM_SinkhornSolve(benchmark::State& state) {
  const Matrix c = random_cost(state.range(0), 7);
  const double eps = 0.01 * c.mean();
  for (auto _ : state) benchmark::DoNotOptimize(sinkhorn_solve(c, eps).plan.data());
}
BENCHMARK(BM_SinkhornSolve)->Arg(16)->Arg(64)->Arg(128)->Unit(benchmark::kMillisecond);

void BM_SinkhornWarmStart(benchmark::State& state) {
  const Matrix c = random_cost(state.range(0), 7);
  const double eps = 0.01 * c.mean();
  const TransportPlan seed = sinkhorn_solve(c, eps);
  const Matrix moved = c + 1e-3 * random_cost(state.range(0), 8);
  SinkhornOptions opts;
  opts.warm_start = &seed;
  for (auto _ : state) benchmark::DoNotOptimize(sinkhorn_solve(moved, eps, opts).plan.data());
}
BENCHMARK(BM_SinkhornWarmStart)->Arg(64)->Unit(benchmark::kMillisecond);

void BM_MlpForwardBatch(benchmark::State& state) {
  const MlpSpec spec = MlpSpec::generator();
  const FlatParams theta = glorot_init(spec, 1);
  const Matrix z = random_cost(state.range(0), 3).leftCols(2);
  for (auto _ : state) benchmark::DoNotOptimize(mlp_forward_batch(spec, theta, z).data());
}
BENCHMARK(BM_MlpForwardBatch)->Arg(64)->Arg(256);

void BM_MlpBackwardBatch(benchmark::State& state) {
  const MlpSpec spec = MlpSpec::generator();
  const FlatParams theta = glorot_init(spec, 1);
  const Matrix z = random_cost(state.range(0), 3).leftCols(2);
  const Matrix up = random_cost(state.range(0), 4).leftCols(2);
  for (auto _ : state) benchmark::DoNotOptimize(mlp_backward_batch(spec, theta, z, up).data());
}
BENCHMARK(BM_MlpBackwardBatch)->Arg(64)->Arg(256);

void BM_BacktrackPower(benchmark::State& state) {
  const SmoothObjective g = value_function(make_power_problem(4, 0.5));
  StopRule stop;
  stop.grad_tol = 0.0;
  stop.max_iters = state.range(0);
  for (auto _ : state)
    benchmark::DoNotOptimize(backtrack_holder_gd(g, Vector::Constant(4, 5.0), {}, stop).records.size());
}
BENCHMARK(BM_BacktrackPower)->Arg(1000)->Arg(10000);

void BM_MinmaxBacktrackSaddle(benchmark::State& state) {
  const MinMaxProblem p = make_quadratic_saddle(state.range(0));
  StopRule stop;
  stop.grad_tol = 0.0;
  stop.max_iters = 1000;
  const Vector x0 = Vector::Ones(state.range(0));
  BacktrackParams prm;
  prm.gamma = 0.1;
  for (auto _ : state) benchmark::DoNotOptimize(minmax_backtrack(p, x0, prm, stop).records.size());
}
BENCHMARK(BM_MinmaxBacktrackSaddle)->Arg(8)->Arg(64);

}  // namespace
BENCHMARK_MAIN();
