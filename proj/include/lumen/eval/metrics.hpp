#pragma once

#include <algorithm>
#include <cmath>
#include <numeric>
#include <optional>
#include <stdexcept>
#include <vector>

#include "lumen/core/accum.hpp"
#include "lumen/core/types.hpp"

namespace lumen {

namespace detail {

inline std::vector<double> joint_abs_errors(const DisparityMap& pred, const DisparityMap& gt,
                                            const Mask* mask) {
  if (pred.width() != gt.width() || pred.height() != gt.height())
    throw std::invalid_argument("metrics: disparity map dimensions differ");
  if (mask && (mask->width() != gt.width() || mask->height() != gt.height()))
    throw std::invalid_argument("metrics: mask dimensions differ");
  std::vector<double> errs;
  errs.reserve(gt.value.size());
  for (int y = 0; y < gt.height(); ++y)
    for (int x = 0; x < gt.width(); ++x) {
      if (!pred.valid.at(x, y) || !gt.valid.at(x, y)) continue;
      if (mask && !mask->at(x, y)) continue;
      errs.push_back(std::abs(static_cast<double>(pred.value.at(x, y)) - gt.value.at(x, y)));
    }
  return errs;
}

/// Percentile with linear interpolation between order statistics
/// (position q*(n-1) into the sorted sample).
inline double percentile_linear(std::vector<double> v, double q) {
  if (v.empty()) throw std::invalid_argument("percentile: empty sample");
  std::sort(v.begin(), v.end());
  double pos = q * static_cast<double>(v.size() - 1);
  std::size_t lo = static_cast<std::size_t>(pos);
  std::size_t hi = std::min(lo + 1, v.size() - 1);
  double frac = pos - static_cast<double>(lo);
  return v[lo] + frac * (v[hi] - v[lo]);
}

}  // namespace detail

/// Mean absolute disparity error over jointly valid (and optionally masked) pixels.
inline double mae(const DisparityMap& pred, const DisparityMap& gt, const Mask* mask = nullptr) {
  auto errs = detail::joint_abs_errors(pred, gt, mask);
  if (errs.empty()) throw std::invalid_argument("mae: no jointly valid pixels");
  Accumulator acc;
  for (double e : errs) acc.add(e);
  return acc.value() / static_cast<double>(errs.size());
}

/// Interquartile range (Q3 - Q1) of the absolute errors,
/// linear-interpolation percentile convention.
inline double iqr_abs_error(const DisparityMap& pred, const DisparityMap& gt,
                            const Mask* mask = nullptr) {
  auto errs = detail::joint_abs_errors(pred, gt, mask);
  if (errs.empty()) throw std::invalid_argument("iqr_abs_error: no jointly valid pixels");
  return detail::percentile_linear(errs, 0.75) - detail::percentile_linear(errs, 0.25);
}

/// MAE restricted to a segmentation mask (object + podium region).
inline double seg_mae(const DisparityMap& pred, const DisparityMap& gt, const Mask& seg_mask) {
  return mae(pred, gt, &seg_mask);
}

struct DepthMap {
  Image2D<float> depth_mm;
  Mask valid;
};

/// depth_mm = 1000 * focal_px * baseline_m / disparity; d <= 0 becomes invalid.
inline DepthMap disparity_to_depth(const DisparityMap& d, double focal_px, double baseline_m) {
  if (focal_px <= 0.0 || baseline_m <= 0.0)
    throw std::invalid_argument("disparity_to_depth: focal and baseline must be positive");
  DepthMap out{Image2D<float>(d.width(), d.height(), 0.f), Mask(d.width(), d.height(), 0)};
  for (int y = 0; y < d.height(); ++y)
    for (int x = 0; x < d.width(); ++x) {
      if (!d.valid.at(x, y)) continue;
      double disp = d.value.at(x, y);
      if (disp <= 0.0) continue;
      out.depth_mm.at(x, y) = static_cast<float>(1000.0 * focal_px * baseline_m / disp);
      out.valid.at(x, y) = 1;
    }
  return out;
}

/// Classifier confidence read off the sigmoid outputs: a pattern value at 0.5
/// is maximally uncertain, 0 or 1 fully confident. Per pixel, the mean over
/// layers of 1 - 2*|p - 0.5|, giving an uncertainty in [0,1].
struct ConfidenceMap {
  Image2D<float> uncertainty;
};

inline ConfidenceMap uncertainty_map(const PatternStack& pred) {
  ConfidenceMap out{Image2D<float>(pred.width(), pred.height(), 0.f)};
  const double inv_t = 1.0 / pred.layers();
  for (int y = 0; y < pred.height(); ++y)
    for (int x = 0; x < pred.width(); ++x) {
      double acc = 0.0;
      for (int n = 0; n < pred.layers(); ++n)
        acc += 1.0 - 2.0 * std::abs(static_cast<double>(pred.at(x, y, n)) - 0.5);
      out.uncertainty.at(x, y) = static_cast<float>(acc * inv_t);
    }
  return out;
}

// ---------------------------------------------------------------------------
// Uncertainty-error correlation analysis

struct CorrelationReport {
  int bins = 64;
  std::vector<std::uint64_t> histogram;  // bins x bins, row = uncertainty bin, col = error bin
  std::size_t samples = 0;
  double slope = 0.0;
  double intercept = 0.0;
  std::optional<double> pearson;   // absent when either input has zero variance
  std::optional<double> spearman;

  std::uint64_t count_at(int unc_bin, int err_bin) const {
    return histogram[static_cast<std::size_t>(unc_bin) * bins + err_bin];
  }
};

namespace detail {

inline std::optional<double> pearson_r(const std::vector<double>& xs,
                                       const std::vector<double>& ys) {
  const std::size_t n = xs.size();
  double mx = std::accumulate(xs.begin(), xs.end(), 0.0) / n;
  double my = std::accumulate(ys.begin(), ys.end(), 0.0) / n;
  double sxx = 0, syy = 0, sxy = 0;
  for (std::size_t i = 0; i < n; ++i) {
    double dx = xs[i] - mx, dy = ys[i] - my;
    sxx += dx * dx;
    syy += dy * dy;
    sxy += dx * dy;
  }
  if (sxx <= 0.0 || syy <= 0.0) return std::nullopt;
  return sxy / std::sqrt(sxx * syy);
}

/// Ranks with ties replaced by their average rank.
inline std::vector<double> average_ranks(const std::vector<double>& v) {
  const std::size_t n = v.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return v[a] < v[b]; });
  std::vector<double> ranks(n, 0.0);
  std::size_t i = 0;
  while (i < n) {
    std::size_t j = i;
    while (j + 1 < n && v[order[j + 1]] == v[order[i]]) ++j;
    double avg = 0.5 * (static_cast<double>(i) + static_cast<double>(j)) + 1.0;
    for (std::size_t k = i; k <= j; ++k) ranks[order[k]] = avg;
    i = j + 1;
  }
  return ranks;
}

inline std::optional<double> spearman_rho(const std::vector<double>& xs,
                                          const std::vector<double>& ys) {
  return pearson_r(average_ranks(xs), average_ranks(ys));
}

}  // namespace detail

/// Joint histogram plus line fit and rank statistics for (uncertainty, error)
/// pairs over the masked pixels. Both coordinates are normalized to [0,1] by
/// their maximum over the valid set before binning and fitting; any log
/// scaling of the counts is a display concern, not applied here.
inline CorrelationReport correlation_report(const ConfidenceMap& unc, const Image2D<float>& err,
                                            const Mask& mask, int bins = 64) {
  if (unc.uncertainty.width() != err.width() || unc.uncertainty.height() != err.height() ||
      mask.width() != err.width() || mask.height() != err.height())
    throw std::invalid_argument("correlation_report: input dimensions differ");
  if (bins < 1) throw std::invalid_argument("correlation_report: bins must be >= 1");

  std::vector<double> us, es;
  for (int y = 0; y < err.height(); ++y)
    for (int x = 0; x < err.width(); ++x) {
      if (!mask.at(x, y)) continue;
      us.push_back(unc.uncertainty.at(x, y));
      es.push_back(err.at(x, y));
    }
  if (us.empty()) throw std::invalid_argument("correlation_report: no valid samples");

  double umax = *std::max_element(us.begin(), us.end());
  double emax = *std::max_element(es.begin(), es.end());
  if (umax > 0)
    for (auto& u : us) u /= umax;
  if (emax > 0)
    for (auto& e : es) e /= emax;

  CorrelationReport rep;
  rep.bins = bins;
  rep.histogram.assign(static_cast<std::size_t>(bins) * bins, 0);
  rep.samples = us.size();
  for (std::size_t i = 0; i < us.size(); ++i) {
    int ub = std::min(bins - 1, static_cast<int>(us[i] * bins));
    int eb = std::min(bins - 1, static_cast<int>(es[i] * bins));
    ++rep.histogram[static_cast<std::size_t>(ub) * bins + eb];
  }

  // least-squares fit err = slope * unc + intercept on the pairs themselves
  const double n = static_cast<double>(us.size());
  double mu = std::accumulate(us.begin(), us.end(), 0.0) / n;
  double me = std::accumulate(es.begin(), es.end(), 0.0) / n;
  double suu = 0, sue = 0;
  for (std::size_t i = 0; i < us.size(); ++i) {
    suu += (us[i] - mu) * (us[i] - mu);
    sue += (us[i] - mu) * (es[i] - me);
  }
  rep.slope = suu > 0 ? sue / suu : 0.0;
  rep.intercept = me - rep.slope * mu;
  rep.pearson = detail::pearson_r(us, es);
  rep.spearman = detail::spearman_rho(us, es);
  return rep;
}

}  // namespace lumen
