// holderbench: run, compare and plot Backtrack Hoelder experiments.

#include <CLI11.hpp>

#include <cstdint>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "holderbt/config.hpp"
#include "holderbt/experiment.hpp"
#include "holderbt/svg_plot.hpp"

namespace fs = std::filesystem;
using namespace holderbt;

namespace {

struct Overrides {
  std::optional<std::uint64_t> seed;
  std::string algo;
  std::string problem;
  std::vector<std::string> settings;

  void add_to(CLI::App* app) {
    app->add_option("--seed", seed, "Seed for data, latents and initialization");
    app->add_option("--algo", algo,
                    "holder_known | backtrack_holder | nonmonotone_holder | "
                    "nonmonotone_armijo | heuristic_minmax | constant");
    app->add_option("--problem", problem, "Problem id, e.g. sqrt, quadratic_saddle:8, sinkhorn_gan");
    app->add_option("--set", settings, "Extra key=value setting (repeatable)");
  }

  void apply(ExperimentConfig& c) const {
    for (const std::string& kv : settings) {
      const auto eq = kv.find('=');
      if (eq == std::string::npos) throw ParameterError("--set expects key=value, got '" + kv + "'");
      apply_setting(c, kv.substr(0, eq), kv.substr(eq + 1));
    }
    if (seed) c.seed = *seed;
    if (!algo.empty()) c.algorithm = parse_algorithm(algo);
    if (!problem.empty()) c.problem_id = problem;
  }
};

void report(const RunResult& r, const fs::path& csv) {
  const auto curve = r.curve();
  std::cout << r.config.id << ": "
            << (r.failure ? "failed (" + *r.failure + ")" : std::string(to_string(r.status())))
            << ", " << r.size() << " records, "
            << curve.back().oracle_calls << " oracle calls, final loss " << curve.back().loss
            << ", max k " << r.max_k();
  if (r.epsilon) std::cout << ", epsilon " << *r.epsilon;
  std::cout << "\n  -> " << csv.string() << '\n';
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Backtrack Hoelder gradient methods: experiment runner"};
  app.require_subcommand(1);

  // run
  CLI::App* run = app.add_subcommand("run", "Run one configuration and write <out>/<id>.csv");
  std::string run_config;
  std::string run_out = ".";
  std::string run_svg;
  Overrides run_over;
  run->add_option("--config", run_config, "Config file (key = value lines)")->check(CLI::ExistingFile);
  run->add_option("--out", run_out, "Output directory");
  run->add_option("--svg", run_svg, "Also plot the run to this SVG file");
  run_over.add_to(run);

  // compare
  CLI::App* compare = app.add_subcommand("compare", "Run several configurations and plot them together");
  std::vector<std::string> cmp_configs;
  std::string cmp_out = ".";
  unsigned cmp_threads = 0;
  Overrides cmp_over;
  compare->add_option("--config", cmp_configs, "Config files (repeatable)")
      ->required()
      ->check(CLI::ExistingFile);
  compare->add_option("--out", cmp_out, "Output directory (CSV per run plus compare.svg)");
  compare->add_option("--threads", cmp_threads, "Concurrent runs (0 = hardware threads)");
  cmp_over.add_to(compare);

  // figure
  CLI::App* figure = app.add_subcommand(
      "figure", "Sinkhorn generator comparison: non-monotone Hoelder and Armijo vs constant steps");
  std::uint64_t fig_seed = 0;
  int fig_n = 64;
  std::uint64_t fig_budget = 300;
  std::string fig_out = "figure";
  unsigned fig_threads = 0;
  figure->add_option("--seed", fig_seed, "Seed");
  figure->add_option("--N", fig_n, "Sample size")->check(CLI::PositiveNumber);
  figure->add_option("--budget", fig_budget, "Oracle-call budget per run")->check(CLI::PositiveNumber);
  figure->add_option("--out", fig_out, "Output directory");
  figure->add_option("--threads", fig_threads, "Concurrent runs (0 = hardware threads)");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*run) {
      ExperimentConfig cfg = run_config.empty() ? ExperimentConfig{} : load_config(run_config);
      run_over.apply(cfg);
      const RunResult r = run_experiment(cfg);
      report(r, write_run_csv(r, run_out));
      if (!run_svg.empty()) compare_and_plot({r}, run_svg);
    } else if (*compare) {
      std::vector<ExperimentConfig> configs;
      for (const std::string& path : cmp_configs) {
        ExperimentConfig cfg = load_config(path);
        cmp_over.apply(cfg);
        configs.push_back(std::move(cfg));
      }
      const std::vector<RunResult> results = run_all(configs, cmp_threads, true);
      for (const RunResult& r : results) report(r, write_run_csv(r, cmp_out));
      const fs::path svg = fs::path(cmp_out) / "compare.svg";
      compare_and_plot(results, svg);
      std::cout << "plot -> " << svg.string() << '\n';
    } else if (*figure) {
      const auto configs = generator_comparison_configs(fig_seed, fig_n, fig_budget);
      const std::vector<RunResult> results = run_all(configs, fig_threads, true);
      for (const RunResult& r : results) report(r, write_run_csv(r, fig_out));
      PlotOptions opts;
      opts.title = "Sinkhorn loss vs Sinkhorn oracle calls (N=" + std::to_string(fig_n) + ")";
      opts.y_label = "Sinkhorn loss";
      const fs::path svg = fs::path(fig_out) / "sinkhorn_generator.svg";
      compare_and_plot(results, svg, opts);
      std::cout << "plot -> " << svg.string() << '\n';
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
