#pragma once

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace hermite_nc {

/// One labelled curve of an SVG line chart.
struct SvgSeries {
  std::string label;
  std::vector<double> x;
  std::vector<double> y;
};

/// Static line chart, optionally log-scaled per axis. Nonpositive values
/// on a log axis are dropped from the drawing (not an error: decay curves
/// may hit exact zero). Output is deterministic for fixed input.
inline void write_svg_chart(const std::string& path, const std::string& title,
                            const std::vector<SvgSeries>& series,
                            bool log_x = true, bool log_y = true) {
  constexpr int kW = 640, kH = 420, kMargin = 56;
  static const char* kColors[] = {"#1f77b4", "#d62728", "#2ca02c",
                                  "#9467bd", "#ff7f0e", "#8c564b"};
  double x_lo = 1e300, x_hi = -1e300, y_lo = 1e300, y_hi = -1e300;
  auto tx = [&](double v) { return log_x ? std::log10(v) : v; };
  auto ty = [&](double v) { return log_y ? std::log10(v) : v; };
  for (const auto& s : series)
    for (std::size_t i = 0; i < s.x.size(); ++i) {
      if ((log_x && s.x[i] <= 0.0) || (log_y && s.y[i] <= 0.0)) continue;
      x_lo = std::min(x_lo, tx(s.x[i]));
      x_hi = std::max(x_hi, tx(s.x[i]));
      y_lo = std::min(y_lo, ty(s.y[i]));
      y_hi = std::max(y_hi, ty(s.y[i]));
    }
  if (x_lo > x_hi) { x_lo = 0.0; x_hi = 1.0; }
  if (y_lo > y_hi) { y_lo = 0.0; y_hi = 1.0; }
  if (x_hi - x_lo < 1e-12) { x_lo -= 0.5; x_hi += 0.5; }
  if (y_hi - y_lo < 1e-12) { y_lo -= 0.5; y_hi += 0.5; }
  auto px = [&](double v) {
    return kMargin + (kW - 2 * kMargin) * (tx(v) - x_lo) / (x_hi - x_lo);
  };
  auto py = [&](double v) {
    return kH - kMargin - (kH - 2 * kMargin) * (ty(v) - y_lo) / (y_hi - y_lo);
  };
  std::ofstream out(path);
  if (!out) throw std::runtime_error("write_svg_chart: cannot open " + path);
  char buf[256];
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kW
      << "\" height=\"" << kH << "\">\n";
  out << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  std::snprintf(buf, sizeof buf,
                "<text x=\"%d\" y=\"24\" font-family=\"monospace\" "
                "font-size=\"14\">%s</text>\n",
                kMargin, title.c_str());
  out << buf;
  std::snprintf(buf, sizeof buf,
                "<rect x=\"%d\" y=\"%d\" width=\"%d\" height=\"%d\" "
                "fill=\"none\" stroke=\"#888\"/>\n",
                kMargin, kMargin, kW - 2 * kMargin, kH - 2 * kMargin);
  out << buf;
  for (std::size_t si = 0; si < series.size(); ++si) {
    const auto& s = series[si];
    const char* color = kColors[si % 6];
    out << "<polyline fill=\"none\" stroke=\"" << color
        << "\" stroke-width=\"1.5\" points=\"";
    for (std::size_t i = 0; i < s.x.size(); ++i) {
      if ((log_x && s.x[i] <= 0.0) || (log_y && s.y[i] <= 0.0)) continue;
      std::snprintf(buf, sizeof buf, "%.2f,%.2f ", px(s.x[i]), py(s.y[i]));
      out << buf;
    }
    out << "\"/>\n";
    std::snprintf(buf, sizeof buf,
                  "<text x=\"%d\" y=\"%d\" font-family=\"monospace\" "
                  "font-size=\"12\" fill=\"%s\">%s</text>\n",
                  kW - kMargin - 160, kMargin + 18 + 16 * static_cast<int>(si),
                  color, s.label.c_str());
    out << buf;
  }
  out << "</svg>\n";
}

}  // namespace hermite_nc
