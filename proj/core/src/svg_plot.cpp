#include "holderbt/svg_plot.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <limits>
#include <sstream>

namespace holderbt {
namespace {

constexpr std::array<const char*, 8> kPalette = {"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e",
                                                 "#9467bd", "#8c564b", "#e377c2", "#17becf"};

std::string fixed(double v) {
  char buf[48];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}

std::string tick_label(double v) {
  char buf[48];
  std::snprintf(buf, sizeof buf, "%.4g", v);
  return buf;
}

std::string escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

struct Range {
  double lo = std::numeric_limits<double>::infinity();
  double hi = -std::numeric_limits<double>::infinity();

  void add(double v) {
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  void pad() {
    if (hi - lo <= 0.0) {
      const double half = std::max(std::abs(lo) * 0.05, 0.5);
      lo -= half;
      hi += half;
    }
  }
};

}  // namespace

std::string render_svg(const std::vector<PlotSeries>& series, const PlotOptions& opt) {
  if (series.empty()) throw ParameterError("nothing to plot");
  Range xr;
  Range yr;
  for (const PlotSeries& s : series) {
    if (s.points.empty()) throw ParameterError("series '" + s.label + "' is empty");
    for (const auto& [x, y] : s.points) {
      if (!std::isfinite(x) || !std::isfinite(y))
        throw ParameterError("series '" + s.label + "' has a non-finite point");
      xr.add(x);
      yr.add(y);
    }
  }
  xr.pad();
  yr.pad();

  const double left = 80.0;
  const double right = 180.0;
  const double top = 40.0;
  const double bottom = 56.0;
  const double pw = opt.width - left - right;
  const double ph = opt.height - top - bottom;
  if (!(pw > 0.0) || !(ph > 0.0)) throw ParameterError("plot area too small");
  auto sx = [&](double x) { return left + (x - xr.lo) / (xr.hi - xr.lo) * pw; };
  auto sy = [&](double y) { return top + (yr.hi - y) / (yr.hi - yr.lo) * ph; };

  std::ostringstream svg;
  svg << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
      << "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"" << opt.width
      << "\" height=\"" << opt.height << "\" viewBox=\"0 0 " << opt.width << ' ' << opt.height
      << "\">\n"
      << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n"
      << "<text x=\"" << fixed(left + pw / 2) << "\" y=\"24\" text-anchor=\"middle\" "
      << "font-family=\"sans-serif\" font-size=\"15\">" << escape(opt.title) << "</text>\n"
      << "<rect x=\"" << fixed(left) << "\" y=\"" << fixed(top) << "\" width=\"" << fixed(pw)
      << "\" height=\"" << fixed(ph) << "\" fill=\"none\" stroke=\"black\"/>\n";

  constexpr int kTicks = 5;
  svg << "<g font-family=\"sans-serif\" font-size=\"11\" stroke=\"none\" fill=\"black\">\n";
  for (int t = 0; t <= kTicks; ++t) {
    const double xv = xr.lo + (xr.hi - xr.lo) * t / kTicks;
    const double yv = yr.lo + (yr.hi - yr.lo) * t / kTicks;
    svg << "<text x=\"" << fixed(sx(xv)) << "\" y=\"" << fixed(top + ph + 16)
        << "\" text-anchor=\"middle\">" << tick_label(xv) << "</text>\n"
        << "<text x=\"" << fixed(left - 6) << "\" y=\"" << fixed(sy(yv) + 4)
        << "\" text-anchor=\"end\">" << tick_label(yv) << "</text>\n";
  }
  svg << "<text x=\"" << fixed(left + pw / 2) << "\" y=\"" << fixed(opt.height - 12.0)
      << "\" text-anchor=\"middle\" font-size=\"13\">" << escape(opt.x_label) << "</text>\n"
      << "<text x=\"16\" y=\"" << fixed(top + ph / 2) << "\" text-anchor=\"middle\" "
      << "font-size=\"13\" transform=\"rotate(-90 16 " << fixed(top + ph / 2) << ")\">"
      << escape(opt.y_label) << "</text>\n</g>\n";

  for (std::size_t i = 0; i < series.size(); ++i) {
    const char* color = kPalette[i % kPalette.size()];
    svg << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1.5\" points=\"";
    bool first = true;
    for (const auto& [x, y] : series[i].points) {
      svg << (first ? "" : " ") << fixed(sx(x)) << ',' << fixed(sy(y));
      first = false;
    }
    svg << "\"/>\n";
  }

  svg << "<g font-family=\"sans-serif\" font-size=\"12\">\n";
  for (std::size_t i = 0; i < series.size(); ++i) {
    const char* color = kPalette[i % kPalette.size()];
    const double ly = top + 14.0 + 18.0 * static_cast<double>(i);
    const double lx = left + pw + 12.0;
    svg << "<line x1=\"" << fixed(lx) << "\" y1=\"" << fixed(ly) << "\" x2=\"" << fixed(lx + 22)
        << "\" y2=\"" << fixed(ly) << "\" stroke=\"" << color << "\" stroke-width=\"2\"/>\n"
        << "<text x=\"" << fixed(lx + 28) << "\" y=\"" << fixed(ly + 4) << "\">"
        << escape(series[i].label) << "</text>\n";
  }
  svg << "</g>\n</svg>\n";
  return svg.str();
}

std::string compare_and_plot(const std::vector<RunResult>& runs,
                             const std::filesystem::path& out_path, const PlotOptions& options) {
  if (runs.empty()) throw ParameterError("compare_and_plot needs at least one run");
  std::vector<PlotSeries> series;
  for (const RunResult& run : runs) {
    PlotSeries s;
    s.label = run.config.id;
    for (const CurvePoint& p : run.curve())
      s.points.emplace_back(static_cast<double>(p.oracle_calls), p.loss);
    if (s.points.empty()) throw ParameterError("run '" + run.config.id + "' has an empty trajectory");
    series.push_back(std::move(s));
  }
  std::string doc = render_svg(series, options);
  if (!out_path.empty()) write_file_atomic(out_path, doc);
  return doc;
}

}  // namespace holderbt
