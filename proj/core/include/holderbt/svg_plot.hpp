#pragma once

#include <filesystem>
#include <string>
#include <utility>
#include <vector>

#include "holderbt/experiment.hpp"

namespace holderbt {

struct PlotSeries {
  std::string label;
  std::vector<std::pair<double, double>> points;
};

struct PlotOptions {
  std::string title = "loss vs oracle calls";
  std::string x_label = "oracle calls";
  std::string y_label = "loss";
  int width = 720;
  int height = 480;
};

/// Static SVG 1.1 line chart, one polyline per series, legend in series
/// order. Output bytes depend only on the inputs.
std::string render_svg(const std::vector<PlotSeries>& series, const PlotOptions& options = {});

/// Plots every run's (oracle_calls, loss) curve, labelled by config id, and
/// writes the document to `out_path` (atomically) unless the path is empty.
std::string compare_and_plot(const std::vector<RunResult>& runs,
                             const std::filesystem::path& out_path,
                             const PlotOptions& options = {});

}  // namespace holderbt
