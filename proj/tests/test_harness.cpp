#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "holderbt/config.hpp"
#include "holderbt/experiment.hpp"
#include "holderbt/svg_plot.hpp"
#include "support.hpp"

using namespace holderbt;
namespace fs = std::filesystem;

namespace {

ExperimentConfig sqrt_config(const std::string& id = "sqrt") {
  ExperimentConfig c;
  c.id = id;
  c.problem_id = "sqrt";
  c.algorithm = Algorithm::kBacktrackHolder;
  c.gamma = 1.0;
  c.params.alpha = 0.5;
  c.params.delta = 0.25;
  c.params.rho = 0.5;
  c.x0 = Vector::Constant(1, 1.0);
  return c;
}

std::size_t count_of(const std::string& text, const std::string& needle) {
  std::size_t n = 0;
  for (auto pos = text.find(needle); pos != std::string::npos; pos = text.find(needle, pos + 1)) ++n;
  return n;
}

fs::path scratch_dir(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / ("holderbt_test_" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

}  // namespace

TEST(Mixture, DegenerateComponentSitsOnMean) {
  GaussianMixtureSpec spec;
  GaussianComponent c;
  c.mean << 1.5, -0.5;
  c.covariance = Eigen::Matrix2d::Identity() * 1e-18;
  spec.components = {c};
  const Matrix x = sample_data(spec, 100);
  for (Index i = 0; i < x.rows(); ++i) {
    EXPECT_NEAR(x(i, 0), 1.5, 1e-6);
    EXPECT_NEAR(x(i, 1), -0.5, 1e-6);
  }
}

TEST(Mixture, ComponentFrequencies) {
  GaussianMixtureSpec spec;
  GaussianComponent a;
  a.mean << -5.0, 0.0;
  a.covariance *= 0.01;
  a.weight = 0.5;
  GaussianComponent b = a;
  b.mean << 5.0, 0.0;
  spec.components = {a, b};
  spec.seed = 11;
  const Matrix x = sample_data(spec, 10000);
  const double left = static_cast<double>((x.col(0).array() < 0.0).count()) / 10000.0;
  EXPECT_NEAR(left, 0.5, 0.02);
}

TEST(Mixture, SeedDeterminism) {
  const GaussianMixtureSpec spec = GaussianMixtureSpec::ring(8, 2.0, 0.02, 5);
  EXPECT_EQ(sample_data(spec, 50), sample_data(spec, 50));
  EXPECT_NE(sample_data(spec, 50), sample_data(GaussianMixtureSpec::ring(8, 2.0, 0.02, 6), 50));
}

TEST(Mixture, RingLayout) {
  const GaussianMixtureSpec spec = GaussianMixtureSpec::ring();
  ASSERT_EQ(spec.components.size(), 8u);
  for (const auto& c : spec.components) {
    EXPECT_NEAR(c.mean.norm(), 2.0, 1e-12);
    EXPECT_NEAR(c.weight, 0.125, 1e-15);
    EXPECT_EQ(c.covariance, Eigen::Matrix2d::Identity() * 0.02);
  }
  EXPECT_NO_THROW(spec.validate());
}

TEST(Mixture, Validation) {
  GaussianMixtureSpec spec = GaussianMixtureSpec::ring(2);
  spec.components[0].weight = 0.7;
  EXPECT_THROW(spec.validate(), ParameterError);
  spec = GaussianMixtureSpec::ring(1);
  spec.components[0].covariance << 1.0, 2.0, 2.0, 1.0;
  EXPECT_THROW(spec.validate(), ParameterError);
  EXPECT_THROW(sample_data(spec, 3), ParameterError);
  EXPECT_THROW(GaussianMixtureSpec{}.validate(), ParameterError);
}

TEST(Latents, BoundsMeanDeterminism) {
  const Matrix z = sample_latents(10000, 3);
  EXPECT_GE(z.minCoeff(), 0.0);
  EXPECT_LE(z.maxCoeff(), 1.0);
  EXPECT_NEAR(z.col(0).mean(), 0.5, 0.02);
  EXPECT_NEAR(z.col(1).mean(), 0.5, 0.02);
  EXPECT_EQ(z, sample_latents(10000, 3));
  EXPECT_NE(z, sample_latents(10000, 4));
}

TEST(Config, ParseFile) {
  std::istringstream in(
      "# comment line\n"
      "id = demo   # trailing comment\n"
      "problem = quadratic_saddle:3\n"
      "algo = nonmonotone_armijo\n"
      "gamma = 0.5\n"
      "delta_plus = 0.9\n"
      "N = 32\n"
      "epsilon = 0.25\n"
      "warm_start = false\n"
      "x0 = 1, -2.5, 3e-1\n"
      "\n");
  const ExperimentConfig c = parse_config(in);
  EXPECT_EQ(c.id, "demo");
  EXPECT_EQ(c.problem_id, "quadratic_saddle:3");
  EXPECT_EQ(c.algorithm, Algorithm::kNonmonotoneArmijo);
  EXPECT_EQ(c.base_gamma(), 0.5);
  EXPECT_EQ(*c.params.delta_plus, 0.9);
  EXPECT_EQ(c.sample_size, 32);
  EXPECT_EQ(*c.epsilon, 0.25);
  EXPECT_FALSE(c.inner.warm_start);
  ASSERT_TRUE(c.x0.has_value());
  EXPECT_EQ(*c.x0, (Vector(3) << 1.0, -2.5, 0.3).finished());
}

TEST(Config, Errors) {
  std::istringstream missing_eq("id = a\nnonsense\n");
  try {
    parse_config(missing_eq);
    FAIL();
  } catch (const ParameterError& e) {
    EXPECT_NE(std::string(e.what()).find("line 2"), std::string::npos);
  }
  std::istringstream unknown("colour = blue\n");
  EXPECT_THROW(parse_config(unknown), ParameterError);
  std::istringstream bad_number("gamma = fast\n");
  EXPECT_THROW(parse_config(bad_number), ParameterError);
  EXPECT_THROW(parse_algorithm("gradient_magic"), ParameterError);
  EXPECT_THROW(load_config("/nonexistent/config.cfg"), ParameterError);
}

TEST(Config, AlgorithmNamesRoundTrip) {
  for (Algorithm a : {Algorithm::kHolderKnown, Algorithm::kBacktrackHolder,
                      Algorithm::kNonmonotoneHolder, Algorithm::kNonmonotoneArmijo,
                      Algorithm::kHeuristicMinmax, Algorithm::kConstant})
    EXPECT_EQ(parse_algorithm(to_string(a)), a);
}

TEST(Config, WriteParseRoundTrip) {
  ExperimentConfig c = sqrt_config("round");
  c.params.delta_plus = 0.95;
  c.epsilon = 0.125;
  c.stop.max_oracle_calls = 300;
  c.x0 = (Vector(2) << 0.1, -7.25).finished();
  std::stringstream s;
  write_config(s, c);
  const ExperimentConfig back = parse_config(s);
  std::stringstream again;
  write_config(again, back);
  EXPECT_EQ(s.str(), again.str());
  EXPECT_EQ(*back.x0, *c.x0);
}

TEST(Config, Validation) {
  ExperimentConfig c = sqrt_config("a/b");
  EXPECT_THROW(c.validate(), ParameterError);
  c = sqrt_config();
  c.algorithm = Algorithm::kNonmonotoneHolder;
  EXPECT_THROW(c.validate(), ParameterError);
  c.params.delta_plus = 0.95;
  EXPECT_NO_THROW(c.validate());
}

TEST(RunExperiment, SqrtBacktrackWithinBound) {
  ExperimentConfig c = sqrt_config();
  c.x0 = Vector::Constant(1, 4.0);
  const RunResult r = run_experiment(c);
  EXPECT_EQ(r.status(), TerminalStatus::kConverged);
  BacktrackParams p = c.params;
  p.gamma = 1.0;
  EXPECT_LE(r.max_k(), std::ceil(k_bound({{1.0, 0.5, true}, p})));
  ASSERT_TRUE(std::holds_alternative<MinMaxTrajectory>(r.trajectory));
}

TEST(RunExperiment, QuadraticConstantDiverges) {
  ExperimentConfig c;
  c.id = "diverge";
  c.problem_id = "quadratic_saddle:2";
  c.algorithm = Algorithm::kConstant;
  c.gamma = 2.5;
  c.stop.grad_tol = 0.0;
  try {
    const RunResult r = run_experiment(c);
    EXPECT_EQ(r.status(), TerminalStatus::kIterBudget);
  } catch (const ExperimentError& e) {
    EXPECT_EQ(e.config_id(), "diverge");
    ASSERT_NE(e.partial(), nullptr);
    EXPECT_TRUE(e.partial()->failure.has_value());
    EXPECT_GT(e.partial()->size(), 100u);
  }
}

TEST(RunExperiment, HolderKnownUsesOptimalGamma) {
  ExperimentConfig c = sqrt_config();
  c.algorithm = Algorithm::kHolderKnown;
  c.gamma.reset();
  c.stop.max_iters = 50;
  const RunResult r = run_experiment(c);
  const auto& t = std::get<Trajectory>(r.trajectory);
  const double gamma = holder_optimal_gamma({1.0, 0.5, true});
  EXPECT_DOUBLE_EQ(t.records[0].step, holder_step(t.records[0].grad_norm, {1.0, 0.5, true}, gamma));
}

TEST(RunExperiment, ErrorsCarryConfigId) {
  ExperimentConfig c = sqrt_config("bad_problem");
  c.problem_id = "no_such_problem";
  try {
    run_experiment(c);
    FAIL();
  } catch (const ExperimentError& e) {
    EXPECT_EQ(e.config_id(), "bad_problem");
    EXPECT_EQ(e.partial(), nullptr);
  }
}

TEST(RunExperiment, MinMinAccounting) {
  ExperimentConfig c;
  c.id = "minmin";
  c.problem_id = "quadratic_minmin:4";
  c.algorithm = Algorithm::kNonmonotoneHolder;
  c.gamma = 20.0;
  c.params.delta_plus = 0.95;
  c.stop.max_iters = 60;
  c.stop.grad_tol = 0.0;
  const RunResult r = run_experiment(c);
  const auto& t = std::get<MinMaxTrajectory>(r.trajectory);
  // oracle calls = outer iterations + while-loop trials
  std::uint64_t trials = 0;
  int k_prev = 1;
  for (std::size_t i = 0; i + 1 < t.records.size(); ++i) {
    trials += static_cast<std::uint64_t>(std::max(0, t.records[i].k - k_prev));
    k_prev = t.records[i].k;
  }
  const auto outer = static_cast<std::uint64_t>(t.records.size());
  EXPECT_EQ(t.last().oracle_calls, outer + trials);
  EXPECT_GT(trials, 0u);
}

TEST(RunExperiment, SinkhornGanNonmonotoneDescends) {
  ExperimentConfig c;
  c.id = "gan";
  c.problem_id = "sinkhorn_gan";
  c.algorithm = Algorithm::kNonmonotoneHolder;
  c.sample_size = 64;
  c.gamma = 1.0;
  c.params.delta_plus = 0.95;
  c.stop.grad_tol = 0.0;
  c.stop.max_oracle_calls = 40;
  const RunResult r = run_experiment(c);
  ASSERT_TRUE(r.epsilon.has_value());
  EXPECT_GT(*r.epsilon, 0.0);
  const auto& t = std::get<MinMaxTrajectory>(r.trajectory);
  EXPECT_EQ(t.terminal_status, TerminalStatus::kOracleBudget);
  EXPECT_LE(t.last().oracle_calls, 40u);
  for (std::size_t i = 1; i < t.records.size(); ++i)
    EXPECT_LE(t.records[i].loss, t.records[i - 1].loss);
  EXPECT_TRUE(holderbt::testing::replay_minmax(t, c.params.delta, true).ok);
}

TEST(RunExperiment, GanEpsilonDefault) {
  ExperimentConfig c;
  c.problem_id = "sinkhorn_gan";
  c.sample_size = 16;
  c.seed = 3;
  const ResolvedProblem p = resolve_problem(c);
  ASSERT_TRUE(p.gan.has_value());
  GanObjective probe = *p.gan;
  const double expected = 0.01 * generator_cost(probe, p.x0).mean();
  EXPECT_DOUBLE_EQ(p.gan->epsilon, expected);
  EXPECT_EQ(p.x0, glorot_init(MlpSpec::generator(), 3));
  EXPECT_EQ(p.gan->data, sample_data(GaussianMixtureSpec::ring(8, 2.0, 0.02, 3), 16));
  EXPECT_EQ(p.gan->latents, sample_latents(16, 3));
}

TEST(Reproducibility, CsvAndSvgBytes) {
  std::vector<ExperimentConfig> configs;
  for (double gamma : {0.3, 1.0, 5.0}) {
    ExperimentConfig c = sqrt_config("g" + std::to_string(static_cast<int>(gamma * 10)));
    c.gamma = gamma;
    c.x0 = Vector::Constant(1, 3.0);
    configs.push_back(c);
  }
  const auto a = run_all(configs, 1);
  const auto b = run_all(configs, 3);
  ASSERT_EQ(a.size(), 3u);
  for (std::size_t i = 0; i < a.size(); ++i) {
    EXPECT_EQ(a[i].config.id, configs[i].id);
    EXPECT_EQ(a[i].csv(), b[i].csv());
  }
  EXPECT_EQ(compare_and_plot(a, {}), compare_and_plot(b, {}));
}

TEST(Reproducibility, GanRunCsv) {
  ExperimentConfig c;
  c.id = "gan_repeat";
  c.problem_id = "sinkhorn_gan";
  c.algorithm = Algorithm::kNonmonotoneArmijo;
  c.sample_size = 16;
  c.params.delta_plus = 0.95;
  c.stop.max_oracle_calls = 15;
  EXPECT_EQ(run_experiment(c).csv(), run_experiment(c).csv());
}

TEST(Plot, OnePolylinePerRun) {
  std::vector<ExperimentConfig> configs;
  for (int i = 0; i < 5; ++i) {
    ExperimentConfig c = sqrt_config("run" + std::to_string(i));
    c.gamma = 0.2 + i;
    configs.push_back(c);
  }
  const auto runs = run_all(configs, 1);
  const std::string svg = compare_and_plot(runs, {});
  EXPECT_EQ(count_of(svg, "<polyline"), 5u);
  for (const auto& c : configs) EXPECT_NE(svg.find(">" + c.id + "<"), std::string::npos);
  EXPECT_EQ(svg.rfind("<?xml", 0), 0u);

  const std::string single = compare_and_plot({runs[0]}, {});
  EXPECT_EQ(count_of(single, "<polyline"), 1u);
}

TEST(Plot, IdenticalConfigsGiveIdenticalPolylines) {
  const auto runs = run_all({sqrt_config("a"), sqrt_config("a")}, 1);
  const std::string svg = render_svg({{"a", {{0, 1}, {1, 0.5}}}, {"a", {{0, 1}, {1, 0.5}}}});
  const auto first = svg.find("points=\"");
  const auto second = svg.find("points=\"", first + 1);
  ASSERT_NE(second, std::string::npos);
  EXPECT_EQ(svg.substr(first, svg.find('"', first + 8) - first),
            svg.substr(second, svg.find('"', second + 8) - second));
  EXPECT_EQ(runs[0].csv(), runs[1].csv());
}

TEST(Plot, Errors) {
  EXPECT_THROW(render_svg({}), ParameterError);
  EXPECT_THROW(render_svg({{"empty", {}}}), ParameterError);
  EXPECT_THROW(render_svg({{"nan", {{0.0, std::nan("")}}}}), ParameterError);
  EXPECT_THROW(compare_and_plot({}, {}), ParameterError);
}

TEST(Plot, EscapesLabels) {
  const std::string svg = render_svg({{"a<b & c", {{0, 1}, {2, 3}}}});
  EXPECT_NE(svg.find("a&lt;b &amp; c"), std::string::npos);
}

TEST(Output, AtomicCsvWrite) {
  const fs::path dir = scratch_dir("csv");
  const RunResult r = run_experiment(sqrt_config("written"));
  const fs::path path = write_run_csv(r, dir);
  EXPECT_EQ(path, dir / "written.csv");
  std::ifstream in(path);
  std::stringstream content;
  content << in.rdbuf();
  EXPECT_EQ(content.str(), r.csv());
  EXPECT_FALSE(fs::exists(dir / "written.csv.tmp"));
  fs::remove_all(dir);
}

TEST(RunAll, KeepFailures) {
  ExperimentConfig good = sqrt_config("good");
  ExperimentConfig bad;
  bad.id = "bad";
  bad.problem_id = "quadratic_saddle:1";
  bad.algorithm = Algorithm::kConstant;
  bad.gamma = 1e200;
  bad.stop.grad_tol = 0.0;
  EXPECT_THROW(run_all({good, bad}, 1), ExperimentError);
  const auto kept = run_all({good, bad}, 1, true);
  ASSERT_EQ(kept.size(), 2u);
  EXPECT_FALSE(kept[0].failure.has_value());
  EXPECT_TRUE(kept[1].failure.has_value());
  EXPECT_GT(kept[1].size(), 0u);
}

TEST(Comparison, Configs) {
  const auto configs = generator_comparison_configs(7, 64, 300);
  ASSERT_EQ(configs.size(), 5u);
  const char* ids[] = {"nonmonotone_holder", "nonmonotone_armijo", "constant_0.01", "constant_0.05",
                       "constant_0.1"};
  const double gammas[] = {1.0, 1.0, 0.01, 0.05, 0.1};
  for (std::size_t i = 0; i < 5; ++i) {
    EXPECT_EQ(configs[i].id, ids[i]);
    EXPECT_EQ(configs[i].base_gamma(), gammas[i]);
    EXPECT_EQ(configs[i].problem_id, "sinkhorn_gan");
    EXPECT_EQ(configs[i].seed, 7u);
    EXPECT_EQ(configs[i].sample_size, 64);
    EXPECT_EQ(configs[i].stop.max_oracle_calls, 300u);
    EXPECT_NO_THROW(configs[i].validate());
  }
  EXPECT_EQ(configs[0].params.alpha, 0.5);
  EXPECT_EQ(configs[0].params.delta, 0.25);
  EXPECT_EQ(configs[0].params.rho, 0.5);
  EXPECT_EQ(*configs[0].params.delta_plus, 0.95);
}
