#include <catch2/catch_amalgamated.hpp>
#include <cmath>

#include "lumen/core/rng.hpp"
#include "lumen/loss/kernels.hpp"

using namespace lumen;

namespace {

PatternStack row_stack(std::initializer_list<float> values) {
  PatternStack s(static_cast<int>(values.size()), 1, 1, 0.f);
  int x = 0;
  for (float v : values) s.at(x++, 0, 0) = v;
  return s;
}

// independent reimplementation of the derivative reduction for oracle checks
double derivative_reference(const PatternStack& p, const PatternStack& q, bool squared) {
  double acc = 0.0;
  const int w = p.width(), h = p.height();
  // derivative images are float, so round the difference to float here too
  auto dx = [&](const PatternStack& s, int x, int y, int n) {
    int xl = x > 0 ? x - 1 : 0;
    int xr = x + 1 < w ? x + 1 : w - 1;
    return static_cast<double>(s.at(xr, y, n) - s.at(xl, y, n));
  };
  for (int n = 0; n < p.layers(); ++n)
    for (int y = 0; y < h; ++y)
      for (int x = 0; x < w; ++x) {
        double diff = dx(p, x, y, n) - dx(q, x, y, n);
        acc += squared ? diff * diff : std::abs(diff);
      }
  return acc / static_cast<double>(p.size());
}

}  // namespace

TEST_CASE("bce matches the analytic single-element cases", "[losses]") {
  PatternStack p(1, 1, 1, 1.f), q(1, 1, 1, 0.5f);
  CHECK(bce_loss(p, q) == Catch::Approx(std::log(2.0)).epsilon(1e-12));

  q.at(0, 0, 0) = 0.9f;
  CHECK(bce_loss(p, q) == Catch::Approx(-std::log(0.9f)).epsilon(1e-6));
}

TEST_CASE("bce on a perfect binary prediction sits at the clamp floor", "[losses]") {
  PatternStack p(8, 4, 2, 0.f);
  Rng rng(5);
  for (int n = 0; n < 2; ++n)
    for (int y = 0; y < 4; ++y)
      for (int x = 0; x < 8; ++x) p.at(x, y, n) = rng.uniform() < 0.5 ? 0.f : 1.f;
  double v = bce_loss(p, p);
  CHECK(v >= 0.0);
  CHECK(v <= 1.1e-7);  // -log(1 - 1e-7)
}

TEST_CASE("bce is minimized at the target", "[losses]") {
  Rng rng(17);
  PatternStack p(6, 3, 2, 0.f);
  for (int n = 0; n < 2; ++n)
    for (int y = 0; y < 3; ++y)
      for (int x = 0; x < 6; ++x) p.at(x, y, n) = rng.uniform() < 0.5 ? 0.f : 1.f;
  double at_target = bce_loss(p, p);
  for (int trial = 0; trial < 20; ++trial) {
    PatternStack q = p;
    for (int k = 0; k < 5; ++k) {
      int x = static_cast<int>(rng.uniform_index(6));
      int y = static_cast<int>(rng.uniform_index(3));
      int n = static_cast<int>(rng.uniform_index(2));
      q.at(x, y, n) = static_cast<float>(std::clamp(q.at(x, y, n) + rng.uniform(-0.4, 0.4),
                                                    0.0, 1.0));
    }
    CHECK(bce_loss(p, q) >= at_target - 1e-12);
  }
}

TEST_CASE("bce rejects mismatched shapes", "[losses]") {
  PatternStack a(4, 4, 2, 0.f), b(4, 4, 3, 0.f);
  CHECK_THROWS_AS(bce_loss(a, b), std::invalid_argument);
}

TEST_CASE("prewitt derivative matches the stencil", "[losses]") {
  Image2D<float> constant(5, 3, 0.7f);
  Image2D<float> d = prewitt_dx(constant);
  for (int y = 0; y < 3; ++y)
    for (int x = 0; x < 5; ++x) CHECK(d.at(x, y) == 0.f);

  Image2D<float> row(3, 1, 0.f);
  row.at(0, 0) = 1.f;
  row.at(1, 0) = 2.f;
  row.at(2, 0) = 4.f;
  d = prewitt_dx(row);
  CHECK(d.at(1, 0) == 3.f);  // 4 - 1
  CHECK(d.at(0, 0) == 1.f);  // replicated left edge: 2 - 1
  CHECK(d.at(2, 0) == 2.f);  // replicated right edge: 4 - 2

  // vertical step edge: derivative nonzero only beside the edge
  Image2D<float> step(6, 2, 0.f);
  for (int y = 0; y < 2; ++y)
    for (int x = 3; x < 6; ++x) step.at(x, y) = 1.f;
  d = prewitt_dx(step);
  for (int y = 0; y < 2; ++y)
    for (int x = 0; x < 6; ++x) {
      if (x == 2 || x == 3)
        CHECK(d.at(x, y) == 1.f);
      else
        CHECK(d.at(x, y) == 0.f);
    }
}

TEST_CASE("derivative loss reduces squared and absolute differences", "[losses]") {
  PatternStack p = row_stack({0.f, 2.f, 4.f});
  PatternStack q = row_stack({0.f, 0.f, 0.f});
  // prewitt rows: [2,4,2] vs [0,0,0]
  CHECK(derivative_l2(p, q, DerivativeMode::Squared) == Catch::Approx(8.0).epsilon(1e-12));
  CHECK(derivative_l2(p, q, DerivativeMode::Absolute) ==
        Catch::Approx(8.0 / 3.0).epsilon(1e-12));
  CHECK(derivative_l2(p, p) == 0.0);
}

TEST_CASE("derivative loss agrees with an independent enumeration", "[losses]") {
  Rng rng(23);
  PatternStack p(9, 5, 3, 0.f), q(9, 5, 3, 0.f);
  for (int n = 0; n < 3; ++n)
    for (int y = 0; y < 5; ++y)
      for (int x = 0; x < 9; ++x) {
        p.at(x, y, n) = static_cast<float>(rng.uniform());
        q.at(x, y, n) = static_cast<float>(rng.uniform());
      }
  CHECK(derivative_l2(p, q, DerivativeMode::Squared) ==
        Catch::Approx(derivative_reference(p, q, true)).epsilon(1e-12));
  CHECK(derivative_l2(p, q, DerivativeMode::Absolute) ==
        Catch::Approx(derivative_reference(p, q, false)).epsilon(1e-12));
}

TEST_CASE("derivative loss ignores a shared constant offset", "[losses]") {
  Rng rng(29);
  PatternStack p(7, 4, 2, 0.f), q(7, 4, 2, 0.f);
  for (int n = 0; n < 2; ++n)
    for (int y = 0; y < 4; ++y)
      for (int x = 0; x < 7; ++x) {
        p.at(x, y, n) = static_cast<float>(rng.uniform());
        q.at(x, y, n) = static_cast<float>(rng.uniform());
      }
  double base = derivative_l2(p, q);
  PatternStack p2 = p, q2 = q;
  for (int n = 0; n < 2; ++n)
    for (int y = 0; y < 4; ++y)
      for (int x = 0; x < 7; ++x) {
        p2.at(x, y, n) += 0.25f;
        q2.at(x, y, n) += 0.25f;
      }
  CHECK(derivative_l2(p2, q2) == Catch::Approx(base).margin(1e-6));
}

TEST_CASE("sl loss composes bce and the weighted derivative term", "[losses]") {
  PatternStack p = row_stack({1.f, 0.f, 1.f});
  PatternStack q = row_stack({0.9f, 0.1f, 0.9f});
  // bce = -ln 0.9; prewitt [-1,0,1] vs [-0.8,0,0.8] -> squared mean 0.08/3
  double bce = -std::log(0.9);
  double deriv = (0.04 + 0.0 + 0.04) / 3.0;
  LossConfig cfg;
  CHECK(sl_loss(p, q, cfg) == Catch::Approx(bce + deriv / 80.0).epsilon(1e-6));

  cfg.lambda1 = 0.0;
  CHECK(sl_loss(p, q, cfg) == Catch::Approx(bce_loss(p, q, cfg.bce_clamp_eps)).epsilon(1e-12));

  CHECK(sl_loss(p, p) <= 1.1e-7);  // perfect binary prediction: clamp floor only
}

TEST_CASE("loss config validation", "[losses]") {
  LossConfig cfg;
  cfg.bce_clamp_eps = 0.0;
  CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
  cfg = {};
  cfg.bce_clamp_eps = 0.6;
  CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
  cfg = {};
  cfg.lambda1 = -1.0;
  CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
}

TEST_CASE("disparity loss averages squared error over jointly valid pixels", "[losses]") {
  DisparityMap gt(4, 2), pred(4, 2);
  for (int y = 0; y < 2; ++y)
    for (int x = 0; x < 4; ++x) {
      gt.value.at(x, y) = static_cast<float>(x + y);
      gt.valid.at(x, y) = 1;
      pred.value.at(x, y) = static_cast<float>(x + y);
      pred.valid.at(x, y) = 1;
    }
  CHECK(disparity_l2(gt, pred) == 0.0);

  for (int y = 0; y < 2; ++y)
    for (int x = 0; x < 4; ++x) pred.value.at(x, y) += 3.f;
  CHECK(disparity_l2(gt, pred) == Catch::Approx(9.0).epsilon(1e-12));

  // mask half the pixels, offset 2 on the remainder
  for (int y = 0; y < 2; ++y)
    for (int x = 0; x < 4; ++x) {
      pred.value.at(x, y) = gt.value.at(x, y) + 2.f;
      pred.valid.at(x, y) = (x < 2) ? 1 : 0;
    }
  CHECK(disparity_l2(gt, pred) == Catch::Approx(4.0).epsilon(1e-12));
}

TEST_CASE("disparity loss error paths", "[losses]") {
  DisparityMap a(4, 2), b(5, 2);
  CHECK_THROWS_AS(disparity_l2(a, b), std::invalid_argument);

  DisparityMap gt(2, 2), pred(2, 2);  // all pixels invalid
  CHECK_THROWS_AS(disparity_l2(gt, pred), std::invalid_argument);
}
