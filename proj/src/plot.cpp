#include "gradflow/plot.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <sstream>

namespace gradflow {

namespace {

constexpr double kWidth = 800.0;
constexpr double kHeight = 500.0;
constexpr double kLeft = 70.0;
constexpr double kRight = 30.0;
constexpr double kTop = 40.0;
constexpr double kBottom = 60.0;
constexpr std::array<const char*, 4> kColours{"#1f77b4", "#d62728", "#2ca02c", "#9467bd"};

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}

std::string escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '&': out += "&amp;"; break;
      default: out += c;
    }
  }
  return out;
}

}  // namespace

std::string line_chart_svg(const std::vector<Series>& series, double reference_y,
                           const std::string& reference_label, const std::string& title,
                           const std::string& x_label, const std::string& y_label) {
  double x_max = 1.0;
  double y_max = reference_y;
  for (const auto& s : series) {
    for (double x : s.x) x_max = std::max(x_max, x);
    for (double y : s.y)
      if (std::isfinite(y)) y_max = std::max(y_max, y);
  }
  y_max = y_max > 0.0 ? 1.1 * y_max : 1.0;
  const double plot_w = kWidth - kLeft - kRight;
  const double plot_h = kHeight - kTop - kBottom;
  auto px = [&](double x) { return kLeft + plot_w * x / x_max; };
  auto py = [&](double y) { return kTop + plot_h * (1.0 - std::clamp(y, 0.0, y_max) / y_max); };

  std::ostringstream svg;
  svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" viewBox=\"0 0 800 500\" font-family=\"sans-serif\">\n";
  svg << "<rect width=\"800\" height=\"500\" fill=\"white\"/>\n";
  svg << "<text x=\"400\" y=\"24\" text-anchor=\"middle\" font-size=\"16\">" << escape(title) << "</text>\n";
  svg << "<line x1=\"" << num(kLeft) << "\" y1=\"" << num(kTop + plot_h) << "\" x2=\"" << num(kLeft + plot_w)
      << "\" y2=\"" << num(kTop + plot_h) << "\" stroke=\"black\"/>\n";
  svg << "<line x1=\"" << num(kLeft) << "\" y1=\"" << num(kTop) << "\" x2=\"" << num(kLeft) << "\" y2=\""
      << num(kTop + plot_h) << "\" stroke=\"black\"/>\n";
  for (int k = 0; k <= 4; ++k) {
    const double y = y_max * k / 4.0;
    const double x = x_max * k / 4.0;
    svg << "<text x=\"" << num(kLeft - 8) << "\" y=\"" << num(py(y) + 4)
        << "\" text-anchor=\"end\" font-size=\"11\">" << num(y) << "</text>\n";
    svg << "<text x=\"" << num(px(x)) << "\" y=\"" << num(kTop + plot_h + 18)
        << "\" text-anchor=\"middle\" font-size=\"11\">" << num(x) << "</text>\n";
  }
  svg << "<text x=\"400\" y=\"" << num(kHeight - 15) << "\" text-anchor=\"middle\" font-size=\"13\">"
      << escape(x_label) << "</text>\n";
  svg << "<text x=\"18\" y=\"250\" text-anchor=\"middle\" font-size=\"13\" transform=\"rotate(-90 18 250)\">"
      << escape(y_label) << "</text>\n";
  svg << "<line x1=\"" << num(kLeft) << "\" y1=\"" << num(py(reference_y)) << "\" x2=\"" << num(kLeft + plot_w)
      << "\" y2=\"" << num(py(reference_y)) << "\" stroke=\"gray\" stroke-dasharray=\"6 4\"/>\n";
  svg << "<text x=\"" << num(kLeft + plot_w - 4) << "\" y=\"" << num(py(reference_y) - 6)
      << "\" text-anchor=\"end\" font-size=\"11\" fill=\"gray\">" << escape(reference_label) << "</text>\n";

  for (std::size_t s = 0; s < series.size(); ++s) {
    const char* colour = kColours[s % kColours.size()];
    svg << "<polyline fill=\"none\" stroke=\"" << colour << "\" stroke-width=\"2\" points=\"";
    for (std::size_t i = 0; i < series[s].x.size() && i < series[s].y.size(); ++i) {
      if (!std::isfinite(series[s].y[i])) continue;
      svg << (i ? " " : "") << num(px(series[s].x[i])) << "," << num(py(series[s].y[i]));
    }
    svg << "\"/>\n";
    const double ly = kTop + 16.0 + 18.0 * static_cast<double>(s);
    svg << "<line x1=\"" << num(kLeft + 16) << "\" y1=\"" << num(ly) << "\" x2=\"" << num(kLeft + 40)
        << "\" y2=\"" << num(ly) << "\" stroke=\"" << colour << "\" stroke-width=\"2\"/>\n";
    svg << "<text x=\"" << num(kLeft + 46) << "\" y=\"" << num(ly + 4) << "\" font-size=\"12\">"
        << escape(series[s].label) << "</text>\n";
  }
  svg << "</svg>\n";
  return svg.str();
}

}  // namespace gradflow
