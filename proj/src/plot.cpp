// SPDX-License-Identifier: Apache-2.0

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>
#include <stdexcept>

#include "hardening/plot.hpp"

namespace hardening {

namespace {

constexpr double kWidth = 720.0;
constexpr double kHeight = 480.0;
constexpr double kMarginLeft = 80.0;
constexpr double kMarginRight = 160.0;
constexpr double kMarginTop = 48.0;
constexpr double kMarginBottom = 64.0;

const char* kPalette[] = {"#1f6fb4", "#d95f02", "#1b9e77", "#7570b3",
                          "#e7298a", "#66a61e", "#a6761d", "#666666"};

struct AxisMap {
  bool log = false;
  double lo = 0.0;
  double hi = 1.0;

  double to_unit(double v) const {
    const double a = log ? std::log10(v) : v;
    const double l = log ? std::log10(lo) : lo;
    const double h = log ? std::log10(hi) : hi;
    return h > l ? (a - l) / (h - l) : 0.5;
  }
};

std::string num(double value) {
  char buffer[48];
  std::snprintf(buffer, sizeof(buffer), "%.6g", value);
  return buffer;
}

std::vector<double> make_ticks(const AxisMap& axis) {
  std::vector<double> ticks;
  if (axis.log) {
    const int lo_dec = static_cast<int>(std::floor(std::log10(axis.lo) + 1e-9));
    const int hi_dec = static_cast<int>(std::ceil(std::log10(axis.hi) - 1e-9));
    for (int d = lo_dec; d <= hi_dec; ++d) ticks.push_back(std::pow(10.0, d));
  } else {
    const int n = 5;
    for (int i = 0; i <= n; ++i) {
      ticks.push_back(axis.lo + (axis.hi - axis.lo) * i / n);
    }
  }
  return ticks;
}

}  // namespace

std::string render_svg(const PlotSpec& spec) {
  double x_min = std::numeric_limits<double>::infinity();
  double x_max = -x_min;
  double y_min = x_min;
  double y_max = -x_min;
  for (const auto& series : spec.series) {
    for (const auto& [x, y] : series.points) {
      if ((spec.log_x && x <= 0.0) || (spec.log_y && y <= 0.0)) continue;
      x_min = std::min(x_min, x);
      x_max = std::max(x_max, x);
      y_min = std::min(y_min, y);
      y_max = std::max(y_max, y);
    }
  }
  if (!(x_min <= x_max) || !(y_min <= y_max)) {
    throw std::invalid_argument("render_svg: no plottable points");
  }
  auto pad = [](bool log, double& lo, double& hi) {
    if (log) {
      lo /= 1.3;
      hi *= 1.3;
    } else {
      const double span = hi > lo ? hi - lo : std::max(std::abs(hi), 1.0);
      lo -= 0.06 * span;
      hi += 0.06 * span;
    }
  };
  pad(spec.log_x, x_min, x_max);
  pad(spec.log_y, y_min, y_max);
  const AxisMap x_axis{spec.log_x, x_min, x_max};
  const AxisMap y_axis{spec.log_y, y_min, y_max};

  const double plot_w = kWidth - kMarginLeft - kMarginRight;
  const double plot_h = kHeight - kMarginTop - kMarginBottom;
  auto px = [&](double x) { return kMarginLeft + plot_w * x_axis.to_unit(x); };
  auto py = [&](double y) {
    return kMarginTop + plot_h * (1.0 - y_axis.to_unit(y));
  };

  std::ostringstream svg;
  svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kWidth
      << "\" height=\"" << kHeight << "\" viewBox=\"0 0 " << kWidth << ' '
      << kHeight << "\">\n"
      << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n"
      << "<text x=\"" << kWidth / 2 << "\" y=\"24\" text-anchor=\"middle\" "
         "font-family=\"sans-serif\" font-size=\"16\">"
      << spec.title << "</text>\n";

  // frame
  svg << "<rect x=\"" << kMarginLeft << "\" y=\"" << kMarginTop << "\" width=\""
      << plot_w << "\" height=\"" << plot_h
      << "\" fill=\"none\" stroke=\"#333333\"/>\n";

  for (const double tick : make_ticks(x_axis)) {
    if (tick < x_min || tick > x_max) continue;
    const double x = px(tick);
    svg << "<line x1=\"" << x << "\" y1=\"" << kMarginTop << "\" x2=\"" << x
        << "\" y2=\"" << kMarginTop + plot_h
        << "\" stroke=\"#dddddd\" stroke-width=\"1\"/>\n"
        << "<text x=\"" << x << "\" y=\"" << kMarginTop + plot_h + 18
        << "\" text-anchor=\"middle\" font-family=\"sans-serif\" "
           "font-size=\"11\">"
        << num(tick) << "</text>\n";
  }
  for (const double tick : make_ticks(y_axis)) {
    if (tick < y_min || tick > y_max) continue;
    const double y = py(tick);
    svg << "<line x1=\"" << kMarginLeft << "\" y1=\"" << y << "\" x2=\""
        << kMarginLeft + plot_w << "\" y2=\"" << y
        << "\" stroke=\"#dddddd\" stroke-width=\"1\"/>\n"
        << "<text x=\"" << kMarginLeft - 6 << "\" y=\"" << y + 4
        << "\" text-anchor=\"end\" font-family=\"sans-serif\" "
           "font-size=\"11\">"
        << num(tick) << "</text>\n";
  }

  svg << "<text x=\"" << kMarginLeft + plot_w / 2 << "\" y=\""
      << kHeight - 16
      << "\" text-anchor=\"middle\" font-family=\"sans-serif\" "
         "font-size=\"13\">"
      << spec.x_label << "</text>\n"
      << "<text x=\"20\" y=\"" << kMarginTop + plot_h / 2
      << "\" text-anchor=\"middle\" font-family=\"sans-serif\" "
         "font-size=\"13\" transform=\"rotate(-90 20 "
      << kMarginTop + plot_h / 2 << ")\">" << spec.y_label << "</text>\n";

  std::size_t color_index = 0;
  double legend_y = kMarginTop + 10;
  for (const auto& series : spec.series) {
    const char* color = kPalette[color_index % (sizeof(kPalette) / sizeof(kPalette[0]))];
    ++color_index;
    svg << "<polyline fill=\"none\" stroke=\"" << color
        << "\" stroke-width=\"1.8\"";
    if (series.dashed) svg << " stroke-dasharray=\"6 4\"";
    svg << " points=\"";
    for (const auto& [x, y] : series.points) {
      if ((spec.log_x && x <= 0.0) || (spec.log_y && y <= 0.0)) continue;
      svg << num(px(x)) << ',' << num(py(y)) << ' ';
    }
    svg << "\"/>\n";
    for (const auto& [x, y] : series.points) {
      if ((spec.log_x && x <= 0.0) || (spec.log_y && y <= 0.0)) continue;
      if (!series.dashed) {
        svg << "<circle cx=\"" << num(px(x)) << "\" cy=\"" << num(py(y))
            << "\" r=\"2.5\" fill=\"" << color << "\"/>\n";
      }
    }
    // legend entry
    const double lx = kWidth - kMarginRight + 12;
    svg << "<line x1=\"" << lx << "\" y1=\"" << legend_y << "\" x2=\""
        << lx + 24 << "\" y2=\"" << legend_y << "\" stroke=\"" << color
        << "\" stroke-width=\"1.8\"";
    if (series.dashed) svg << " stroke-dasharray=\"6 4\"";
    svg << "/>\n"
        << "<text x=\"" << lx + 30 << "\" y=\"" << legend_y + 4
        << "\" font-family=\"sans-serif\" font-size=\"11\">" << series.label
        << "</text>\n";
    legend_y += 18;
  }

  svg << "</svg>\n";
  return svg.str();
}

void write_svg(const std::filesystem::path& path, const PlotSpec& spec) {
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    throw std::runtime_error("cannot open output file '" + path.string() + "'");
  }
  out << render_svg(spec);
}

}  // namespace hardening
