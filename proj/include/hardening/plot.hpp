// SPDX-License-Identifier: Apache-2.0
//
// hardening: minimal SVG line plots for the experiment tables. Plots are
// derived artifacts; the CSV stays the contract.

#ifndef HARDENING_PLOT_HPP
#define HARDENING_PLOT_HPP

#include <filesystem>
#include <string>
#include <utility>
#include <vector>

namespace hardening {

struct PlotSeries {
  std::string label;
  std::vector<std::pair<double, double>> points;
  bool dashed = false;
};

struct PlotSpec {
  std::string title;
  std::string x_label;
  std::string y_label;
  bool log_x = false;
  bool log_y = false;
  std::vector<PlotSeries> series;
};

/// Renders the plot as a standalone SVG document.
std::string render_svg(const PlotSpec& spec);

void write_svg(const std::filesystem::path& path, const PlotSpec& spec);

}  // namespace hardening

#endif  // HARDENING_PLOT_HPP
