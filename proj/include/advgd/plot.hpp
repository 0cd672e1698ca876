#pragma once

#include <charconv>
#include <cmath>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "advgd/io.hpp"

// Minimal self-contained SVG line chart for the error-vs-bound figures.
// Pure text generation from the parsed CSV, so identical input bytes give
// identical output bytes.

namespace advgd::plot {

struct Series {
  std::string name;
  std::string color;
  // One segment per replication block in the CSV (k restarts at 0); cells
  // that are missing or NaN break the segment.
  std::vector<std::vector<std::pair<double, double>>> segments;
};

namespace detail {

inline std::string fixed(double value, int precision) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof(buf), value, std::chars_format::fixed, precision);
  if (res.ec != std::errc{}) throw std::runtime_error("plot: number formatting failed");
  return std::string(buf, res.ptr);
}

inline std::string label(double value) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof(buf), value, std::chars_format::general, 6);
  if (res.ec != std::errc{}) throw std::runtime_error("plot: number formatting failed");
  return std::string(buf, res.ptr);
}

}  // namespace detail

/// Extracts the plottable series from a run CSV. The k column is required;
/// each named series column is optional and skipped when absent or entirely
/// empty/NaN.
inline std::vector<Series> extract_series(const io::CsvTable& table) {
  const int k_col = table.column("k");
  if (k_col < 0) throw std::runtime_error("plot: CSV has no 'k' column");
  if (table.rows.empty()) throw std::runtime_error("plot: CSV has no data rows");

  static const std::pair<const char*, const char*> kSpecs[] = {
      {"avg_error", "#1f77b4"},
      {"regular_avg_error", "#2ca02c"},
      {"bound_paper", "#d62728"},
      {"bound_geometric", "#ff7f0e"},
  };
  std::vector<Series> series;
  for (const auto& [name, color] : kSpecs) {
    const int col = table.column(name);
    if (col < 0) continue;
    Series s;
    s.name = name;
    s.color = color;
    double prev_k = -1.0;
    std::vector<std::pair<double, double>> segment;
    for (const auto& row : table.rows) {
      const double k = row[static_cast<std::size_t>(k_col)];
      if (k <= prev_k && !segment.empty()) {  // next replication block
        s.segments.push_back(std::move(segment));
        segment.clear();
      }
      prev_k = k;
      const double v = row[static_cast<std::size_t>(col)];
      if (std::isfinite(v)) {
        segment.emplace_back(k, v);
      } else if (!segment.empty()) {
        s.segments.push_back(std::move(segment));
        segment.clear();
      }
    }
    if (!segment.empty()) s.segments.push_back(std::move(segment));
    if (!s.segments.empty()) series.push_back(std::move(s));
  }
  if (series.empty()) throw std::runtime_error("plot: no plottable series in CSV");
  return series;
}

/// Renders the chart: one polyline per series segment, light grid, axis tick
/// labels, and a legend across the top.
inline std::string render_svg(const std::vector<Series>& series, std::string_view title) {
  constexpr double width = 960, height = 600;
  constexpr double ml = 70, mr = 24, mt = 48, mb = 56;  // margins
  const double plot_w = width - ml - mr;
  const double plot_h = height - mt - mb;

  double x_max = 0.0, y_max = 0.0;
  for (const auto& s : series)
    for (const auto& segment : s.segments)
      for (const auto& [k, v] : segment) {
        x_max = std::max(x_max, k);
        y_max = std::max(y_max, v);
      }
  if (x_max <= 0.0) x_max = 1.0;
  if (y_max <= 0.0) y_max = 1.0;
  y_max *= 1.05;  // headroom so the top curve is not glued to the frame

  const auto sx = [&](double k) { return ml + k / x_max * plot_w; };
  const auto sy = [&](double v) { return mt + plot_h - v / y_max * plot_h; };

  std::string svg;
  svg += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + detail::fixed(width, 0) +
         "\" height=\"" + detail::fixed(height, 0) + "\" viewBox=\"0 0 " +
         detail::fixed(width, 0) + " " + detail::fixed(height, 0) + "\">\n";
  svg += "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  svg += "<text x=\"" + detail::fixed(ml, 1) + "\" y=\"22\" font-family=\"sans-serif\" "
         "font-size=\"15\" fill=\"#333\">" + std::string(title) + "</text>\n";

  // grid + ticks, 5 divisions per axis
  constexpr int divisions = 5;
  for (int t = 0; t <= divisions; ++t) {
    const double fx = x_max * t / divisions;
    const double fy = y_max * t / divisions;
    const double px = sx(fx);
    const double py = sy(fy);
    svg += "<line x1=\"" + detail::fixed(px, 2) + "\" y1=\"" + detail::fixed(mt, 2) + "\" x2=\"" +
           detail::fixed(px, 2) + "\" y2=\"" + detail::fixed(mt + plot_h, 2) +
           "\" stroke=\"#e0e0e0\" stroke-width=\"1\"/>\n";
    svg += "<line x1=\"" + detail::fixed(ml, 2) + "\" y1=\"" + detail::fixed(py, 2) + "\" x2=\"" +
           detail::fixed(ml + plot_w, 2) + "\" y2=\"" + detail::fixed(py, 2) +
           "\" stroke=\"#e0e0e0\" stroke-width=\"1\"/>\n";
    svg += "<text x=\"" + detail::fixed(px, 2) + "\" y=\"" + detail::fixed(mt + plot_h + 20, 2) +
           "\" font-family=\"sans-serif\" font-size=\"12\" fill=\"#555\" "
           "text-anchor=\"middle\">" + detail::label(fx) + "</text>\n";
    svg += "<text x=\"" + detail::fixed(ml - 8, 2) + "\" y=\"" + detail::fixed(py + 4, 2) +
           "\" font-family=\"sans-serif\" font-size=\"12\" fill=\"#555\" "
           "text-anchor=\"end\">" + detail::label(fy) + "</text>\n";
  }

  // axes frame
  svg += "<rect x=\"" + detail::fixed(ml, 2) + "\" y=\"" + detail::fixed(mt, 2) + "\" width=\"" +
         detail::fixed(plot_w, 2) + "\" height=\"" + detail::fixed(plot_h, 2) +
         "\" fill=\"none\" stroke=\"#333\" stroke-width=\"1\"/>\n";
  svg += "<text x=\"" + detail::fixed(ml + plot_w / 2, 2) + "\" y=\"" +
         detail::fixed(height - 14, 2) +
         "\" font-family=\"sans-serif\" font-size=\"13\" fill=\"#333\" "
         "text-anchor=\"middle\">k</text>\n";
  svg += "<text x=\"18\" y=\"" + detail::fixed(mt + plot_h / 2, 2) +
         "\" font-family=\"sans-serif\" font-size=\"13\" fill=\"#333\" text-anchor=\"middle\" "
         "transform=\"rotate(-90 18 " + detail::fixed(mt + plot_h / 2, 2) +
         ")\">error</text>\n";

  for (const auto& s : series)
    for (const auto& segment : s.segments) {
      svg += "<polyline fill=\"none\" stroke=\"" + s.color + "\" stroke-width=\"1.6\" points=\"";
      bool first = true;
      for (const auto& [k, v] : segment) {
        if (!first) svg += " ";
        first = false;
        svg += detail::fixed(sx(k), 2) + "," + detail::fixed(sy(v), 2);
      }
      svg += "\"/>\n";
    }

  // legend across the top-right
  double lx = width - mr - 190.0 * static_cast<double>(series.size());
  for (const auto& s : series) {
    svg += "<line x1=\"" + detail::fixed(lx, 2) + "\" y1=\"18\" x2=\"" +
           detail::fixed(lx + 26, 2) + "\" y2=\"18\" stroke=\"" + s.color +
           "\" stroke-width=\"2.5\"/>\n";
    svg += "<text x=\"" + detail::fixed(lx + 32, 2) + "\" y=\"22\" font-family=\"sans-serif\" "
           "font-size=\"12\" fill=\"#333\">" + s.name + "</text>\n";
    lx += 190.0;
  }

  svg += "</svg>\n";
  return svg;
}

inline std::string render_from_csv(std::string_view csv_content, std::string_view title) {
  return render_svg(extract_series(io::parse_csv(csv_content)), title);
}

}  // namespace advgd::plot
