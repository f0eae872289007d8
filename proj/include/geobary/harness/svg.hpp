#pragma once

// Minimal log-log scatter plots with an optional fitted line.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "geobary/error.hpp"
#include "geobary/regression.hpp"

namespace geobary {

struct LogLogPlot {
  std::string title;
  std::string x_label = "n";
  std::string y_label = "value";
  std::vector<double> x, y;
  /// Line log y = intercept + slope log x, natural logs.
  std::optional<LinearFit> fit;
};

namespace detail {

inline std::string svg_num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}

inline std::string svg_escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '&': out += "&amp;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

}  // namespace detail

inline void write_loglog_svg(std::ostream& os, const LogLogPlot& plot) {
  require(plot.x.size() == plot.y.size(), Errc::invalid_inputs, "x and y sizes differ");
  std::vector<double> lx, ly;
  for (std::size_t i = 0; i < plot.x.size(); ++i)
    if (plot.x[i] > 0 && plot.y[i] > 0 && std::isfinite(plot.y[i])) {
      lx.push_back(std::log10(plot.x[i]));
      ly.push_back(std::log10(plot.y[i]));
    }
  require(!lx.empty(), Errc::degenerate_input, "no positive points to plot");

  constexpr double W = 640, H = 480, L = 70, R = 20, T = 40, B = 60;
  auto [xmin_it, xmax_it] = std::minmax_element(lx.begin(), lx.end());
  auto [ymin_it, ymax_it] = std::minmax_element(ly.begin(), ly.end());
  double x0 = std::floor(*xmin_it), x1 = std::ceil(*xmax_it);
  double y0 = std::floor(*ymin_it), y1 = std::ceil(*ymax_it);
  if (x1 <= x0) x1 = x0 + 1;
  if (y1 <= y0) y1 = y0 + 1;
  auto px = [&](double v) { return L + (v - x0) / (x1 - x0) * (W - L - R); };
  auto py = [&](double v) { return H - B - (v - y0) / (y1 - y0) * (H - T - B); };

  using detail::svg_num;
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W << "\" height=\"" << H << "\" viewBox=\"0 0 "
     << W << ' ' << H << "\">\n";
  os << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  os << "<text x=\"" << svg_num(W / 2) << "\" y=\"24\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"16\">"
     << detail::svg_escape(plot.title) << "</text>\n";
  os << "<g stroke=\"#ccc\" stroke-width=\"1\">\n";
  for (double d = x0; d <= x1 + 1e-9; d += 1)
    os << "<line x1=\"" << svg_num(px(d)) << "\" y1=\"" << svg_num(py(y0)) << "\" x2=\"" << svg_num(px(d))
       << "\" y2=\"" << svg_num(py(y1)) << "\"/>\n";
  for (double d = y0; d <= y1 + 1e-9; d += 1)
    os << "<line x1=\"" << svg_num(px(x0)) << "\" y1=\"" << svg_num(py(d)) << "\" x2=\"" << svg_num(px(x1))
       << "\" y2=\"" << svg_num(py(d)) << "\"/>\n";
  os << "</g>\n<g font-family=\"sans-serif\" font-size=\"12\">\n";
  for (double d = x0; d <= x1 + 1e-9; d += 1)
    os << "<text x=\"" << svg_num(px(d)) << "\" y=\"" << svg_num(H - B + 18) << "\" text-anchor=\"middle\">1e"
       << static_cast<int>(d) << "</text>\n";
  for (double d = y0; d <= y1 + 1e-9; d += 1)
    os << "<text x=\"" << svg_num(L - 8) << "\" y=\"" << svg_num(py(d) + 4) << "\" text-anchor=\"end\">1e"
       << static_cast<int>(d) << "</text>\n";
  os << "<text x=\"" << svg_num((L + W - R) / 2) << "\" y=\"" << svg_num(H - 16) << "\" text-anchor=\"middle\">"
     << detail::svg_escape(plot.x_label) << "</text>\n";
  os << "<text x=\"18\" y=\"" << svg_num((T + H - B) / 2) << "\" text-anchor=\"middle\" transform=\"rotate(-90 18 "
     << svg_num((T + H - B) / 2) << ")\">" << detail::svg_escape(plot.y_label) << "</text>\n</g>\n";

  if (plot.fit) {
    // Fit is in natural logs; convert to log10 on both axes.
    const double a = plot.fit->intercept / std::log(10.0), b = plot.fit->slope;
    os << "<line x1=\"" << svg_num(px(x0)) << "\" y1=\"" << svg_num(py(a + b * x0)) << "\" x2=\"" << svg_num(px(x1))
       << "\" y2=\"" << svg_num(py(a + b * x1)) << "\" stroke=\"#c0392b\" stroke-width=\"2\"/>\n";
    char buf[96];
    if (std::isfinite(plot.fit->r_squared))
      std::snprintf(buf, sizeof buf, "slope = %.3f, r^2 = %.3f", plot.fit->slope, plot.fit->r_squared);
    else
      std::snprintf(buf, sizeof buf, "slope = %.3f", plot.fit->slope);
    os << "<text x=\"" << svg_num(W - R - 8) << "\" y=\"" << svg_num(T + 16)
       << "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"13\" fill=\"#c0392b\">" << buf << "</text>\n";
  }
  for (std::size_t i = 0; i < lx.size(); ++i)
    os << "<circle cx=\"" << svg_num(px(lx[i])) << "\" cy=\"" << svg_num(py(ly[i])) << "\" r=\"4\" fill=\"#2c3e50\"/>\n";
  os << "</svg>\n";
}

}  // namespace geobary
