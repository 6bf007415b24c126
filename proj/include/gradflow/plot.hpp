#pragma once

#include <string>
#include <vector>

namespace gradflow {

struct Series {
  std::string label;
  std::vector<double> x;
  std::vector<double> y;
};

/// Standalone SVG line chart (viewBox 800x500) with a dashed horizontal
/// reference line at reference_y.
std::string line_chart_svg(const std::vector<Series>& series, double reference_y,
                           const std::string& reference_label, const std::string& title,
                           const std::string& x_label, const std::string& y_label);

}  // namespace gradflow
