#pragma once

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "lumen/core/accum.hpp"
#include "lumen/core/types.hpp"

namespace lumen {

enum class DerivativeMode { Squared, Absolute };

struct LossConfig {
  double lambda1 = 1.0 / 80.0;          // gain on the derivative term
  double bce_clamp_eps = 1e-7;          // keeps the logs finite
  DerivativeMode derivative_mode = DerivativeMode::Squared;

  void validate() const {
    if (!(bce_clamp_eps > 0.0 && bce_clamp_eps < 0.5))
      throw std::invalid_argument("LossConfig: bce_clamp_eps must be in (0, 0.5)");
    if (lambda1 < 0.0) throw std::invalid_argument("LossConfig: lambda1 must be >= 0");
  }
};

/// Mean binary cross entropy over all elements (pixels x layers).
/// Predictions are clamped to [eps, 1-eps] before taking logs.
inline double bce_loss(const PatternStack& target, const PatternStack& pred,
                       double eps = 1e-7) {
  if (!target.same_shape(pred))
    throw std::invalid_argument("bce_loss: stack shapes differ");
  Accumulator acc;
  const float* p = target.layer_data(0);
  const float* q = pred.layer_data(0);
  const std::size_t n = target.size();
  for (std::size_t i = 0; i < n; ++i) {
    double ph = std::clamp(static_cast<double>(q[i]), eps, 1.0 - eps);
    double pv = p[i];
    acc.add(pv * std::log(ph) + (1.0 - pv) * std::log(1.0 - ph));
  }
  return -acc.value() / static_cast<double>(n);
}

/// Horizontal Prewitt-mask derivative: out(x,y) = in(x+1,y) - in(x-1,y),
/// with replicated edge columns (flat borders differentiate to zero).
inline Image2D<float> prewitt_dx(const Image2D<float>& in) {
  Image2D<float> out(in.width(), in.height(), 0.f);
  const int w = in.width();
  for (int y = 0; y < in.height(); ++y) {
    const float* src = in.row(y);
    float* dst = out.row(y);
    for (int x = 0; x < w; ++x) {
      int xl = std::max(0, x - 1);
      int xr = std::min(w - 1, x + 1);
      dst[x] = src[xr] - src[xl];
    }
  }
  return out;
}

/// Mean per-element distance between the horizontal derivatives of the two
/// stacks: squared difference by default, absolute value as the printed form.
inline double derivative_l2(const PatternStack& target, const PatternStack& pred,
                            DerivativeMode mode = DerivativeMode::Squared) {
  if (!target.same_shape(pred))
    throw std::invalid_argument("derivative_l2: stack shapes differ");
  Accumulator acc;
  for (int n = 0; n < target.layers(); ++n) {
    Image2D<float> d = prewitt_dx(target.layer(n));
    Image2D<float> dh = prewitt_dx(pred.layer(n));
    for (int y = 0; y < d.height(); ++y) {
      const float* a = d.row(y);
      const float* b = dh.row(y);
      for (int x = 0; x < d.width(); ++x) {
        double diff = static_cast<double>(a[x]) - b[x];
        acc.add(mode == DerivativeMode::Squared ? diff * diff : std::abs(diff));
      }
    }
  }
  return acc.value() / static_cast<double>(target.size());
}

/// Combined structured-light loss: bce + lambda1 * derivative term.
inline double sl_loss(const PatternStack& target, const PatternStack& pred,
                      const LossConfig& cfg = {}) {
  cfg.validate();
  return bce_loss(target, pred, cfg.bce_clamp_eps) +
         cfg.lambda1 * derivative_l2(target, pred, cfg.derivative_mode);
}

/// Mean squared disparity difference over jointly valid pixels.
inline double disparity_l2(const DisparityMap& gt, const DisparityMap& pred) {
  if (gt.width() != pred.width() || gt.height() != pred.height())
    throw std::invalid_argument("disparity_l2: map dimensions differ");
  Accumulator acc;
  std::size_t n = 0;
  for (int y = 0; y < gt.height(); ++y) {
    for (int x = 0; x < gt.width(); ++x) {
      if (!gt.valid.at(x, y) || !pred.valid.at(x, y)) continue;
      double diff = static_cast<double>(gt.value.at(x, y)) - pred.value.at(x, y);
      acc.add(diff * diff);
      ++n;
    }
  }
  if (n == 0) throw std::invalid_argument("disparity_l2: no jointly valid pixels");
  return acc.value() / static_cast<double>(n);
}

}  // namespace lumen
