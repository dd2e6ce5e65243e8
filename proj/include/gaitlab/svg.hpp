#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "gaitlab/core.hpp"
#include "gaitlab/io.hpp"

namespace gaitlab {

namespace detail {

/// Fixed viridis-like colormap, 9 anchor colors with linear interpolation.
inline std::string colormap(double t) {
  static constexpr std::array<std::array<int, 3>, 9> anchors{{{68, 1, 84},
                                                              {72, 40, 120},
                                                              {62, 74, 137},
                                                              {49, 104, 142},
                                                              {38, 130, 142},
                                                              {31, 158, 137},
                                                              {53, 183, 121},
                                                              {109, 205, 89},
                                                              {180, 222, 44}}};
  t = std::clamp(t, 0.0, 1.0);
  const double pos = t * 8.0;
  const int lo = std::min(7, static_cast<int>(pos));
  const double f = pos - lo;
  std::array<int, 3> rgb;
  for (int c = 0; c < 3; ++c)
    rgb[static_cast<std::size_t>(c)] = static_cast<int>(std::lround(
        (1.0 - f) * anchors[static_cast<std::size_t>(lo)][static_cast<std::size_t>(c)] +
        f * anchors[static_cast<std::size_t>(lo + 1)][static_cast<std::size_t>(c)]));
  char buf[8];
  std::snprintf(buf, sizeof(buf), "#%02x%02x%02x", rgb[0], rgb[1], rgb[2]);
  return buf;
}

}  // namespace detail

/// Gait contact diagram: one row of filled (stance) and open (swing) blocks
/// per leg, phase running left to right over one cycle.
inline std::string svg_gait_diagram(const std::vector<std::string>& row_labels,
                                    const std::vector<std::vector<int>>& contacts) {
  const int n_rows = static_cast<int>(contacts.size());
  const int n_cols = n_rows > 0 ? static_cast<int>(contacts.front().size()) : 0;
  const double cell_w = 600.0 / std::max(1, n_cols), row_h = 24.0, label_w = 60.0;
  const double width = label_w + 610.0, height = row_h * n_rows + 40.0;

  std::ostringstream svg;
  svg << "<svg xmlns='http://www.w3.org/2000/svg' width='" << width << "' height='" << height
      << "'>\n";
  for (int r = 0; r < n_rows; ++r) {
    const double y = 10.0 + r * row_h;
    svg << "<text x='4' y='" << y + 15.0 << "' font-size='12' font-family='sans-serif'>"
        << row_labels[static_cast<std::size_t>(r)] << "</text>\n";
    for (int c = 0; c < n_cols; ++c) {
      const bool stance = contacts[static_cast<std::size_t>(r)][static_cast<std::size_t>(c)] != 0;
      svg << "<rect x='" << format_number(label_w + c * cell_w) << "' y='" << y << "' width='"
          << format_number(cell_w + 0.5) << "' height='" << row_h - 4.0 << "' fill='"
          << (stance ? "#222222" : "#ffffff") << "' stroke='#999999' stroke-width='0.25'/>\n";
    }
  }
  svg << "<text x='" << label_w << "' y='" << height - 8.0
      << "' font-size='11' font-family='sans-serif'>phase 0 to 2*pi (stance filled, swing "
         "open)</text>\n";
  svg << "</svg>\n";
  return svg.str();
}

/// Heatmap of a row-major grid with numeric color-bar ticks and an optional
/// overlaid diagonal gait path (the phi_b = phi_c + phi_0 line, Euclidean
/// unwrapping, legend in the title text).
inline std::string svg_heatmap(const std::string& title, const std::vector<double>& x_coords,
                               const std::vector<double>& y_coords,
                               const std::vector<double>& values,
                               std::optional<double> path_phi0 = {},
                               bool white_zero = false) {
  const int nx = static_cast<int>(x_coords.size());
  const int ny = static_cast<int>(y_coords.size());
  double vmin = 0.0, vmax = 1e-300;
  for (double v : values) {
    vmin = std::min(vmin, v);
    vmax = std::max(vmax, v);
  }
  const double plot_w = 420.0, plot_h = 420.0, margin = 50.0;
  const double cw = plot_w / nx, ch = plot_h / ny;

  std::ostringstream svg;
  svg << "<svg xmlns='http://www.w3.org/2000/svg' width='" << plot_w + margin + 120.0
      << "' height='" << plot_h + 2 * margin << "'>\n";
  svg << "<text x='" << margin << "' y='24' font-size='13' font-family='sans-serif'>" << title
      << "</text>\n";
  for (int i = 0; i < nx; ++i) {
    for (int j = 0; j < ny; ++j) {
      const double v = values[static_cast<std::size_t>(i * ny + j)];
      const std::string fill = (white_zero && v == 0.0)
                                   ? "#ffffff"
                                   : detail::colormap((v - vmin) / (vmax - vmin + 1e-300));
      // y axis points up
      svg << "<rect x='" << format_number(margin + i * cw) << "' y='"
          << format_number(margin + plot_h - (j + 1) * ch) << "' width='" << format_number(cw + 0.5)
          << "' height='" << format_number(ch + 0.5) << "' fill='" << fill << "'/>\n";
    }
  }
  if (path_phi0) {
    // Diagonal (1,1) path segments over the unwrapped square.
    const double psi = wrap_2pi(*path_phi0);
    auto px = [&](double u) { return margin + u / kTwoPi * plot_w; };
    auto py = [&](double v) { return margin + plot_h - v / kTwoPi * plot_h; };
    svg << "<line x1='" << px(0) << "' y1='" << py(psi) << "' x2='" << px(kTwoPi - psi) << "' y2='"
        << py(kTwoPi) << "' stroke='#ff00ff' stroke-width='2'/>\n";
    if (psi > 0.0)
      svg << "<line x1='" << px(kTwoPi - psi) << "' y1='" << py(0) << "' x2='" << px(kTwoPi)
          << "' y2='" << py(psi) << "' stroke='#ff00ff' stroke-width='2'/>\n";
  }
  // Color bar with explicit numeric ticks.
  const double bar_x = margin + plot_w + 20.0, bar_w = 18.0;
  for (int k = 0; k < 64; ++k) {
    svg << "<rect x='" << bar_x << "' y='" << format_number(margin + plot_h * (63 - k) / 64.0)
        << "' width='" << bar_w << "' height='" << format_number(plot_h / 64.0 + 0.5) << "' fill='"
        << detail::colormap(k / 63.0) << "'/>\n";
  }
  for (int k = 0; k <= 4; ++k) {
    const double v = vmin + (vmax - vmin) * k / 4.0;
    svg << "<text x='" << bar_x + bar_w + 4.0 << "' y='"
        << format_number(margin + plot_h * (4 - k) / 4.0 + 4.0)
        << "' font-size='11' font-family='sans-serif'>" << format_number(v) << "</text>\n";
  }
  svg << "</svg>\n";
  return svg.str();
}

}  // namespace gaitlab
