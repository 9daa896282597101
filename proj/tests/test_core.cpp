#include <catch2/catch_amalgamated.hpp>
#include <atomic>
#include <cmath>
#include <vector>

#include "lumen/core/accum.hpp"
#include "lumen/core/parallel.hpp"
#include "lumen/core/rng.hpp"
#include "lumen/core/vec.hpp"

using namespace lumen;

TEST_CASE("rng streams are reproducible and bounded", "[core]") {
  Rng a(1234), b(1234), c(1235);
  bool all_equal = true, any_diff = false;
  for (int i = 0; i < 1000; ++i) {
    double va = a.uniform(), vb = b.uniform(), vc = c.uniform();
    all_equal = all_equal && va == vb;
    any_diff = any_diff || va != vc;
    CHECK(va >= 0.0);
    CHECK(va < 1.0);
  }
  CHECK(all_equal);
  CHECK(any_diff);

  Rng r(9);
  for (int i = 0; i < 200; ++i) {
    double v = r.uniform(-3.0, 5.0);
    CHECK(v >= -3.0);
    CHECK(v < 5.0);
    CHECK(r.uniform_index(17) < 17);
  }
}

TEST_CASE("box-muller normals have sane moments", "[core]") {
  Rng r(2024);
  const int n = 20000;
  double sum = 0.0, sq = 0.0;
  for (int i = 0; i < n; ++i) {
    double v = r.normal();
    sum += v;
    sq += v * v;
  }
  double mean = sum / n;
  double var = sq / n - mean * mean;
  CHECK(std::abs(mean) < 0.05);
  CHECK(var == Catch::Approx(1.0).margin(0.05));
}

TEST_CASE("unit vectors have unit norm", "[core]") {
  Rng r(5);
  for (int i = 0; i < 100; ++i) {
    Vec3 v = r.unit_vector();
    CHECK(std::sqrt(dot(v, v)) == Catch::Approx(1.0).margin(1e-12));
  }
}

TEST_CASE("compensated summation survives adversarial magnitudes", "[core]") {
  Accumulator acc;
  acc.add(1.0);
  acc.add(1e100);
  acc.add(1.0);
  acc.add(-1e100);
  CHECK(acc.value() == 2.0);  // naive double summation returns 0
}

TEST_CASE("parallel_rows visits every row exactly once", "[core]") {
  const int rows = 97;
  std::vector<std::atomic<int>> counts(rows);
  for (auto& c : counts) c = 0;
  parallel_rows(rows, [&](int y) { counts[y].fetch_add(1); });
  for (int y = 0; y < rows; ++y) CHECK(counts[y].load() == 1);
}

TEST_CASE("look_at produces an orthonormal frame aimed at the target", "[core]") {
  Pose pose = look_at({0.1, -0.2, 0.3}, {0, 0, 0});
  Vec3 r = pose.right(), u = pose.up(), f = pose.forward();
  CHECK(dot(r, u) == Catch::Approx(0.0).margin(1e-12));
  CHECK(dot(r, f) == Catch::Approx(0.0).margin(1e-12));
  CHECK(dot(u, f) == Catch::Approx(0.0).margin(1e-12));
  CHECK(dot(r, r) == Catch::Approx(1.0).margin(1e-12));

  Vec3 to_target = normalized(Vec3{0, 0, 0} - pose.origin);
  CHECK(dot(f, to_target) == Catch::Approx(1.0).margin(1e-12));

  // to_world and to_local invert each other
  Vec3 p{0.02, -0.07, 0.4};
  Vec3 back = pose.to_local(pose.to_world(p));
  CHECK(back.x == Catch::Approx(p.x).margin(1e-12));
  CHECK(back.y == Catch::Approx(p.y).margin(1e-12));
  CHECK(back.z == Catch::Approx(p.z).margin(1e-12));
}

TEST_CASE("rotation_y rotates about the vertical axis", "[core]") {
  Mat3 r = rotation_y(std::acos(0.0));  // 90 degrees
  Vec3 v = r * Vec3{0, 0, 1};
  CHECK(v.x == Catch::Approx(1.0).margin(1e-12));
  CHECK(v.y == Catch::Approx(0.0).margin(1e-12));
  CHECK(v.z == Catch::Approx(0.0).margin(1e-12));
}
