#pragma once

#include <algorithm>
#include <cmath>

#include "lumen/core/types.hpp"
#include "lumen/io/png.hpp"

namespace lumen {

enum class Colormap { Jet, Gray };

struct HeatmapStyle {
  Colormap colormap = Colormap::Jet;
  bool auto_range = true;  // min-max over the valid pixels
  double range_min = 0.0;
  double range_max = 1.0;
};

namespace detail {

// 5-anchor jet approximation: dark blue, cyan, yellow, orange, red.
inline Rgb8 jet_color(double t) {
  static constexpr double pos[5] = {0.0, 0.25, 0.5, 0.75, 1.0};
  static constexpr int rgb[5][3] = {
      {0, 0, 128}, {0, 255, 255}, {255, 255, 0}, {255, 165, 0}, {255, 0, 0}};
  t = std::clamp(t, 0.0, 1.0);
  int seg = 0;
  while (seg < 3 && t > pos[seg + 1]) ++seg;
  double f = (t - pos[seg]) / (pos[seg + 1] - pos[seg]);
  auto mix = [&](int c) {
    return static_cast<std::uint8_t>(std::lround(rgb[seg][c] + f * (rgb[seg + 1][c] - rgb[seg][c])));
  };
  return {mix(0), mix(1), mix(2)};
}

}  // namespace detail

/// Min-max map the valid values through the colormap; invalid pixels are
/// black. A constant map under auto range renders at the colormap midpoint.
inline Image2D<Rgb8> render_heatmap(const Image2D<float>& map, const Mask& valid,
                                    const HeatmapStyle& style = {}) {
  if (valid.width() != map.width() || valid.height() != map.height())
    throw std::invalid_argument("render_heatmap: mask size mismatch");

  double lo = style.range_min, hi = style.range_max;
  if (style.auto_range) {
    bool any = false;
    for (int y = 0; y < map.height(); ++y)
      for (int x = 0; x < map.width(); ++x)
        if (valid.at(x, y)) {
          double v = map.at(x, y);
          lo = any ? std::min(lo, v) : v;
          hi = any ? std::max(hi, v) : v;
          any = true;
        }
    if (!any) lo = hi = 0.0;
  }

  Image2D<Rgb8> out(map.width(), map.height(), Rgb8{0, 0, 0});
  for (int y = 0; y < map.height(); ++y)
    for (int x = 0; x < map.width(); ++x) {
      if (!valid.at(x, y)) continue;
      double t = hi > lo ? (map.at(x, y) - lo) / (hi - lo) : 0.5;
      if (style.colormap == Colormap::Jet) {
        out.at(x, y) = detail::jet_color(t);
      } else {
        auto g = static_cast<std::uint8_t>(std::lround(std::clamp(t, 0.0, 1.0) * 255.0));
        out.at(x, y) = {g, g, g};
      }
    }
  return out;
}

}  // namespace lumen
