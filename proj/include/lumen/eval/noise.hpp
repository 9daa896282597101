#pragma once

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "lumen/core/rng.hpp"
#include "lumen/core/types.hpp"

namespace lumen {

/// Smooth per-pixel noise amplitude in [0,1]: coarse random grid upsampled
/// bilinearly, so nearby pixels get correlated noise strength. This makes
/// classifier uncertainty spatially structured rather than iid speckle.
inline Image2D<float> noise_amplitude_field(int width, int height, std::uint64_t seed,
                                            int grid = 9) {
  if (width < 1 || height < 1) throw std::invalid_argument("noise field: empty image");
  if (grid < 2) throw std::invalid_argument("noise field: grid must be >= 2");
  Rng rng(seed);
  std::vector<double> coarse(static_cast<std::size_t>(grid) * grid);
  for (auto& c : coarse) c = rng.uniform();

  Image2D<float> out(width, height, 0.f);
  for (int y = 0; y < height; ++y) {
    double gy = (height > 1) ? static_cast<double>(y) / (height - 1) * (grid - 1) : 0.0;
    int y0 = std::min(grid - 2, static_cast<int>(gy));
    double fy = gy - y0;
    for (int x = 0; x < width; ++x) {
      double gx = (width > 1) ? static_cast<double>(x) / (width - 1) * (grid - 1) : 0.0;
      int x0 = std::min(grid - 2, static_cast<int>(gx));
      double fx = gx - x0;
      double v00 = coarse[static_cast<std::size_t>(y0) * grid + x0];
      double v10 = coarse[static_cast<std::size_t>(y0) * grid + x0 + 1];
      double v01 = coarse[static_cast<std::size_t>(y0 + 1) * grid + x0];
      double v11 = coarse[static_cast<std::size_t>(y0 + 1) * grid + x0 + 1];
      double v = (1 - fy) * ((1 - fx) * v00 + fx * v10) + fy * ((1 - fx) * v01 + fx * v11);
      out.at(x, y) = static_cast<float>(v);
    }
  }
  return out;
}

/// Scale applied to sigma*field to get the local contrast loss. Toward the
/// upper end of the usual sweep (sigma 0.2-0.3) the strongest field regions
/// lose all stripe contrast, enough to actually disturb patch matching there,
/// while weak-field regions stay near-clean at every sigma.
inline constexpr double kContrastLossGain = 5.0;

/// Perturb a clean pattern stack with a defocus/speckle-style model: the local
/// severity field m = min(1, 3*sigma*field(x,y)) pulls stripe contrast toward
/// the undecidable level 0.5 and scales an additive per-pixel gaussian,
///   p' = clamp(0.5 + (1 - m)*(p - 0.5) + sigma*field*N(0,1), 0, 1).
/// Severity is smooth (patch-scale blobs), so corruption strong enough to
/// perturb the matcher arrives in contiguous regions rather than iid speckle,
/// and 1-2|p'-0.5| reads the same severity back out. Field and gaussian draws
/// are both derived from `seed`, so equal inputs give equal outputs.
inline PatternStack inject_noise(const PatternStack& clean, double sigma, std::uint64_t seed,
                                 int grid = 9) {
  if (sigma < 0.0) throw std::invalid_argument("inject_noise: sigma must be >= 0");
  Image2D<float> field = noise_amplitude_field(clean.width(), clean.height(), seed, grid);
  Rng rng(seed ^ 0xa5a5a5a5a5a5a5a5ull);
  PatternStack out(clean.width(), clean.height(), clean.layers());
  for (int n = 0; n < clean.layers(); ++n)
    for (int y = 0; y < clean.height(); ++y)
      for (int x = 0; x < clean.width(); ++x) {
        double a = sigma * field.at(x, y);
        double m = std::min(1.0, kContrastLossGain * a);
        double v = 0.5 + (1.0 - m) * (clean.at(x, y, n) - 0.5) + a * rng.normal();
        out.at(x, y, n) = static_cast<float>(std::clamp(v, 0.0, 1.0));
      }
  return out;
}

}  // namespace lumen
