#pragma once

#include <string>
#include <vector>

#include "structprobe/stats.hpp"

namespace structprobe::io {

struct Series {
  std::string label;
  std::vector<double> y; // y[i] plotted at x = i + 1
};

/// Line chart on a [0,1] y-axis. Output is a self-contained SVG document and
/// depends only on the arguments.
std::string line_chart_svg(const std::string& title, const std::string& x_label, const std::string& y_label,
                           const std::vector<Series>& series);

/// Bar rendering of a histogram's bins.
std::string histogram_svg(const std::string& title, const std::string& x_label, const Histogram& h);

} // namespace structprobe::io
