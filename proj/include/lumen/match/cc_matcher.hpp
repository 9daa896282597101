#pragma once

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

#include "lumen/core/parallel.hpp"
#include "lumen/core/types.hpp"

namespace lumen {

struct MatchConfig {
  int patch_side = 17;
  double max_disp_fraction = 0.25;
  int shift_step = 1;
  bool emit_scores = false;
  bool normalized = false;   // divide by sqrt(sum l^2 * sum r^2) over the overlap
  bool subpixel = false;     // parabolic refinement around the integer argmax

  void validate() const {
    if (patch_side < 3 || patch_side % 2 == 0)
      throw std::invalid_argument("MatchConfig: patch_side must be odd and >= 3");
    if (!(max_disp_fraction > 0.0 && max_disp_fraction <= 0.5))
      throw std::invalid_argument("MatchConfig: max_disp_fraction must be in (0, 0.5]");
    if (shift_step < 1) throw std::invalid_argument("MatchConfig: shift_step must be >= 1");
  }
};

inline int max_shift(const MatchConfig& cfg, int width) {
  return static_cast<int>(cfg.max_disp_fraction * width);
}

/// The raw patch correlation: sum over the patch centered at (x,y) and over
/// all layers of P_l(xx,yy) * P_r(xx-s,yy). Out-of-image contributions are
/// skipped on either side.
inline double cc_score(const PatternStack& left, const PatternStack& right, int x, int y, int s,
                       int patch_side = 17) {
  if (!left.same_shape(right)) throw std::invalid_argument("cc_score: stack shapes differ");
  const int half = patch_side / 2;
  double sum = 0.0;
  for (int yy = y - half; yy <= y + half; ++yy) {
    if (yy < 0 || yy >= left.height()) continue;
    for (int xx = x - half; xx <= x + half; ++xx) {
      if (xx < 0 || xx >= left.width()) continue;
      int xr = xx - s;
      if (xr < 0 || xr >= left.width()) continue;
      for (int l = 0; l < left.layers(); ++l)
        sum += static_cast<double>(left.at(xx, yy, l)) * right.at(xr, yy, l);
    }
  }
  return sum;
}

namespace detail {

/// Summed-area table; box() takes inclusive pixel bounds and clamps.
class Sat {
 public:
  Sat(int w, int h) : w_(w), h_(h), a_(static_cast<std::size_t>(w + 1) * (h + 1), 0.0) {}

  void build(const std::vector<double>& plane) {
    for (int y = 0; y < h_; ++y) {
      double row = 0.0;
      const double* src = plane.data() + static_cast<std::size_t>(y) * w_;
      double* cur = a_.data() + static_cast<std::size_t>(y + 1) * (w_ + 1);
      const double* prev = a_.data() + static_cast<std::size_t>(y) * (w_ + 1);
      for (int x = 0; x < w_; ++x) {
        row += src[x];
        cur[x + 1] = prev[x + 1] + row;
      }
    }
  }

  double box(int x0, int x1, int y0, int y1) const {
    x0 = std::max(x0, 0);
    y0 = std::max(y0, 0);
    x1 = std::min(x1, w_ - 1);
    y1 = std::min(y1, h_ - 1);
    if (x0 > x1 || y0 > y1) return 0.0;
    const auto at = [&](int x, int y) {
      return a_[static_cast<std::size_t>(y) * (w_ + 1) + x];
    };
    return at(x1 + 1, y1 + 1) - at(x0, y1 + 1) - at(x1 + 1, y0) + at(x0, y0);
  }

 private:
  int w_, h_;
  std::vector<double> a_;
};

inline std::vector<double> layer_sq_sum(const PatternStack& s) {
  std::vector<double> plane(static_cast<std::size_t>(s.width()) * s.height(), 0.0);
  for (int l = 0; l < s.layers(); ++l) {
    const float* src = s.layer_data(l);
    for (std::size_t i = 0; i < plane.size(); ++i)
      plane[i] += static_cast<double>(src[i]) * src[i];
  }
  return plane;
}

}  // namespace detail

/// Dense disparity by argmax of cc over shifts {0, step, ..., u}, ties to the
/// smallest shift. Patch sums are evaluated through per-shift product planes
/// and summed-area tables, which reproduces cc_score exactly (skipped
/// out-of-bounds terms contribute zero either way).
inline DisparityMap compute_disparity(const PatternStack& left, const PatternStack& right,
                                      const MatchConfig& cfg) {
  cfg.validate();
  if (left.layers() != right.layers())
    throw std::invalid_argument("compute_disparity: pattern counts differ");
  if (!left.same_shape(right))
    throw std::invalid_argument("compute_disparity: stack shapes differ");

  const int w = left.width(), h = left.height(), t = left.layers();
  const int u = max_shift(cfg, w);
  const int half = cfg.patch_side / 2;
  const std::size_t plane_n = static_cast<std::size_t>(w) * h;

  DisparityMap out(w, h);
  if (cfg.emit_scores) out.scores.emplace(w, h, u + 1, 0.f);

  std::vector<double> best(plane_n, -1.0), neigh_prev(plane_n, 0.0), neigh_next(plane_n, 0.0);
  std::vector<int> best_s(plane_n, 0);
  std::vector<double> score_prev(plane_n, 0.0), score_cur(plane_n, 0.0);

  detail::Sat l2_sat(w, h), r2_sat(w, h), q_sat(w, h);
  if (cfg.normalized) {
    l2_sat.build(detail::layer_sq_sum(left));
    r2_sat.build(detail::layer_sq_sum(right));
  }

  std::vector<double> q(plane_n);
  for (int s = 0; s <= u; s += cfg.shift_step) {
    // product plane for this shift (right columns x-s, zero outside)
    parallel_rows(h, [&](int y) {
      double* qrow = q.data() + static_cast<std::size_t>(y) * w;
      std::fill(qrow, qrow + std::min(s, w), 0.0);
      for (int x = s; x < w; ++x) {
        double acc = 0.0;
        for (int l = 0; l < t; ++l)
          acc += static_cast<double>(left.at(x, y, l)) * right.at(x - s, y, l);
        qrow[x] = acc;
      }
    });
    q_sat.build(q);

    parallel_rows(h, [&](int y) {
      for (int x = 0; x < w; ++x) {
        std::size_t i = static_cast<std::size_t>(y) * w + x;
        double score = q_sat.box(x - half, x + half, y - half, y + half);
        if (cfg.normalized) {
          double l2 = l2_sat.box(x - half, x + half, y - half, y + half);
          double r2 = r2_sat.box(x - half - s, x + half - s, y - half, y + half);
          double denom = std::sqrt(l2 * r2);
          score = denom > 0 ? score / denom : 0.0;
        }
        score_cur[i] = score;
        if (cfg.emit_scores) out.scores->at(x, y, s) = static_cast<float>(score);
        if (score > best[i]) {
          best[i] = score;
          best_s[i] = s;
          neigh_prev[i] = s > 0 ? score_prev[i] : score;
          neigh_next[i] = score;
        } else if (s == best_s[i] + cfg.shift_step) {
          neigh_next[i] = score;
        }
      }
    });
    score_cur.swap(score_prev);
  }

  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x) {
      std::size_t i = static_cast<std::size_t>(y) * w + x;
      double d = best_s[i];
      if (cfg.subpixel && best_s[i] > 0 && best_s[i] + cfg.shift_step <= u) {
        double a = neigh_prev[i], b = best[i], c = neigh_next[i];
        double denom = 2 * b - a - c;
        if (denom > 1e-12) d += 0.5 * (c - a) / denom * cfg.shift_step;
      }
      out.value.at(x, y) = static_cast<float>(d);
      out.valid.at(x, y) = 1;  // with shift 0 in the set, every patch overlaps
    }
  return out;
}

}  // namespace lumen
