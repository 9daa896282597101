#include <catch2/catch_amalgamated.hpp>
#include <cmath>

#include "lumen/scene/scene.hpp"
#include "lumen/scene/simulate.hpp"

using namespace lumen;

namespace {

Primitive sphere_at(Vec3 pos, double diameter, double albedo = 0.85) {
  Primitive p;
  p.kind = PrimitiveKind::Sphere;
  p.position = pos;
  p.size = {diameter, 0, 0};
  p.albedo = albedo;
  return p;
}

Primitive infinite_frontal_plane(double z, double albedo = 0.6) {
  Primitive p;
  p.kind = PrimitiveKind::Plane;
  p.position = {0, 0, z};
  p.normal = {0, 0, 1};
  p.size = {0, 0, 0};  // nonpositive extent = unbounded
  p.albedo = albedo;
  return p;
}

SceneConfig single_sphere_scene(std::uint64_t seed) {
  SceneConfig scene;
  scene.primitives = {sphere_at({0, 0, 0}, 0.04)};
  scene.primitives[0].on_podium = true;
  scene.view_distance_range = {0.06, 0.10};
  scene.rng_seed = seed;
  return scene;
}

}  // namespace

TEST_CASE("viewpoint sampling is seeded and respects the distance range", "[scene]") {
  SceneConfig scene = single_sphere_scene(7);
  std::vector<Pose> a = sample_viewpoints(scene);
  std::vector<Pose> b = sample_viewpoints(scene);
  REQUIRE(a.size() == static_cast<std::size_t>(scene.views_per_object));
  REQUIRE(b.size() == a.size());

  World world = build_scene(scene);
  Vec3 centroid = world.object_centroid();
  for (std::size_t i = 0; i < a.size(); ++i) {
    CHECK(a[i].origin.x == b[i].origin.x);
    CHECK(a[i].origin.y == b[i].origin.y);
    CHECK(a[i].origin.z == b[i].origin.z);
    double dist = norm(a[i].origin - centroid);
    CHECK(dist >= scene.view_distance_range.low - 1e-12);
    CHECK(dist <= scene.view_distance_range.high + 1e-12);
    CHECK(world.min_distance(a[i].origin) >= kMinPoseClearance);
  }
}

TEST_CASE("viewpoint sampling requires a primitive", "[scene]") {
  SceneConfig scene;
  scene.primitives.clear();
  CHECK_THROWS_WITH(sample_viewpoints(scene), "no object to view");
}

TEST_CASE("on_podium rests an object on the podium top", "[scene]") {
  SceneConfig scene = single_sphere_scene(1);
  World world = build_scene(scene);
  // prims[0] is the auto-inserted podium, prims[1] the sphere
  REQUIRE(world.prims.size() == 2);
  REQUIRE(world.prims[0].kind == PrimitiveKind::Podium);
  double podium_top = -0.5 + scene.podium_side_m;
  CHECK(world.prims[1].pose.origin.y == Catch::Approx(podium_top + 0.02).margin(1e-12));
}

TEST_CASE("frontal plane renders constant disparity f*b/Z", "[scene]") {
  SceneConfig scene;
  scene.primitives = {infinite_frontal_plane(0.05)};
  CameraModel camera;
  ProjectorRig rig;
  PatternSpec patterns;
  Pose pose = look_at({0, 0, 0}, {0, 0, 0.05});

  RenderResult r = render_view(scene, camera, rig, patterns, pose);
  const double want = camera.focal_px * camera.baseline_m / 0.05;  // 25.6

  int valid_count = 0;
  for (int y = 0; y < 256; ++y)
    for (int x = 0; x < 256; ++x) {
      CHECK(r.frame.gt_disparity.at(x, y) == Catch::Approx(want).margin(1e-4));
      if (r.frame.valid.at(x, y)) ++valid_count;
      CHECK(r.frame.seg.at(x, y) == 0);  // planes are background
    }
  // left columns where x + 0.5 - 25.6 < 0 fall outside the right image
  CHECK(valid_count == 230 * 256);
}

TEST_CASE("rendering is deterministic", "[scene]") {
  SceneConfig scene = single_sphere_scene(3);
  Pose pose = sample_viewpoints(scene)[0];
  RenderResult a = render_view(scene, {}, {}, {}, pose);
  RenderResult b = render_view(scene, {}, {}, {}, pose);
  CHECK(a.frame.image_left == b.frame.image_left);
  CHECK(a.frame.image_right == b.frame.image_right);
  CHECK(a.frame.gt_disparity == b.frame.gt_disparity);
  CHECK(a.patterns_left == b.patterns_left);
  CHECK(a.patterns_right == b.patterns_right);
}

TEST_CASE("lit pattern bits equal stripe at the reprojected projector column", "[scene]") {
  SceneConfig scene = single_sphere_scene(7);
  CameraModel camera;
  ProjectorRig rig;
  PatternSpec patterns;
  Pose pose = sample_viewpoints(scene, camera, rig)[0];
  RenderResult r = render_view(scene, camera, rig, patterns, pose);

  // independent reprojection: reconstruct the hit point from the ground-truth
  // disparity, push it through our own projector model, evaluate stripe
  Pose proj{pose.rotation * rotation_y(deg_to_rad(rig.rotation_y_deg)),
            pose.to_world(rig.translation_m)};

  long checked = 0, agreed = 0;
  for (int y = 0; y < 256; ++y)
    for (int x = 0; x < 256; ++x) {
      if (!r.frame.valid.at(x, y) || r.frame.shadow.at(x, y)) continue;
      double d = r.frame.gt_disparity.at(x, y);
      if (d <= 0) continue;
      double depth = camera.focal_px * camera.baseline_m / d;
      Vec3 dir{(x + 0.5 - camera.principal_x) / camera.focal_px,
               (camera.principal_y - (y + 0.5)) / camera.focal_px, 1.0};
      Vec3 hit = pose.to_world(dir * depth);
      Vec3 local = proj.to_local(hit);
      if (local.z <= 0) continue;
      double u = rig.projector_columns / 2.0 + rig.projector_focal_px * local.x / local.z;
      int col = static_cast<int>(std::floor(u));
      if (col < 0 || col >= patterns.code_width) continue;
      bool ok = true;
      for (int n = 1; n <= patterns.t; ++n)
        ok = ok && r.patterns_left.at(x, y, n - 1) == static_cast<float>(stripe(patterns, n, col));
      ++checked;
      if (ok) ++agreed;
    }
  REQUIRE(checked > 5000);
  CHECK(static_cast<double>(agreed) / checked >= 0.995);
}

TEST_CASE("stereo occlusion band hugs the left silhouette of the foreground", "[scene]") {
  SceneConfig scene;
  scene.primitives = {sphere_at({0, 0, 0}, 0.06)};
  CameraModel camera;
  Pose pose = look_at({0, 0, -0.12}, {0, 0, 0});
  RenderResult r = render_view(scene, camera, {}, {}, pose);

  World world = build_scene(scene);
  Vec3 right_eye = pose.to_world({camera.baseline_m, 0, 0});

  int band_pixels = 0;
  for (int y = 100; y < 156; ++y) {  // rows crossing the sphere
    int first_seg = -1, last_seg = -1;
    for (int x = 0; x < 256; ++x)
      if (r.frame.seg.at(x, y)) {
        if (first_seg < 0) first_seg = x;
        last_seg = x;
      }
    REQUIRE(first_seg > 0);
    REQUIRE(last_seg >= first_seg);
    for (int x = 0; x < 256; ++x) {
      if (r.frame.valid.at(x, y) || r.frame.seg.at(x, y)) continue;
      // gt_disparity is stored as float, so xr here can land ~1e-5 off the
      // renderer's double-precision border test; skip the ambiguous strip
      double xr = x + 0.5 - r.frame.gt_disparity.at(x, y);
      if (xr < 1e-3 || xr >= 256 - 1e-3) continue;  // border-invalid, not occlusion
      ++band_pixels;
      CHECK(x < first_seg);       // band sits left of the sphere...
      CHECK(x > first_seg - 40);  // ...immediately beside its silhouette

      // independent oracle: the segment from the right eye to the background
      // point really is blocked by the sphere
      double d = r.frame.gt_disparity.at(x, y);
      double depth = camera.focal_px * camera.baseline_m / d;
      Vec3 dir{(x + 0.5 - camera.principal_x) / camera.focal_px,
               (camera.principal_y - (y + 0.5)) / camera.focal_px, 1.0};
      Vec3 hit = pose.to_world(dir * depth);
      Vec3 seg = hit - right_eye;
      double seg_len = norm(seg);
      auto block = world.trace({right_eye, seg * (1.0 / seg_len)});
      REQUIRE(block.has_value());
      CHECK(block->kind == PrimitiveKind::Sphere);
      CHECK(block->t < seg_len * (1.0 - 1e-6));
    }
  }
  CHECK(band_pixels > 100);
}

TEST_CASE("codes agree along epipolar lines at integer disparity", "[scene]") {
  const int want_disp = 16;
  CameraModel camera;
  const double z = camera.focal_px * camera.baseline_m / want_disp;  // 0.08
  SceneConfig scene;
  scene.primitives = {infinite_frontal_plane(z)};
  PatternSpec patterns;
  Pose pose = look_at({0, 0, 0}, {0, 0, z});
  RenderResult r = render_view(scene, camera, {}, patterns, pose);

  CodeMap left = decode(patterns, binarize(r.patterns_left));
  CodeMap right = decode(patterns, binarize(r.patterns_right));

  long checked = 0, equal = 0;
  for (int y = 0; y < 256; ++y)
    for (int x = want_disp; x < 256; ++x) {
      if (!r.frame.valid.at(x, y)) continue;
      if (r.frame.shadow.at(x, y)) continue;
      ++checked;
      if (left.code.at(x, y) == right.code.at(x - want_disp, y)) ++equal;
    }
  REQUIRE(checked > 10000);
  CHECK(static_cast<double>(equal) / checked >= 0.995);
}

TEST_CASE("gt_disparity_from_depth applies d = f*b/Z", "[scene]") {
  CameraModel camera;
  Image2D<float> depth(2, 1, 0.f);
  depth.at(0, 0) = 0.05f;
  depth.at(1, 0) = 0.f;  // nonpositive depth is invalid
  DisparityMap d = gt_disparity_from_depth(depth, camera);
  REQUIRE(d.valid.at(0, 0) == 1);
  CHECK(d.value.at(0, 0) == Catch::Approx(25.6).margin(1e-4));
  CHECK(d.valid.at(1, 0) == 0);
}

TEST_CASE("disparity-depth roundtrip is tight", "[scene]") {
  CameraModel camera;
  for (double z : {0.03, 0.05, 0.08, 0.42}) {
    double d = camera.focal_px * camera.baseline_m / z;
    double back = camera.focal_px * camera.baseline_m / d;
    CHECK(back == Catch::Approx(z).epsilon(1e-9));
  }
}

TEST_CASE("render_view rejects an eye outside the room or inside a solid", "[scene]") {
  SceneConfig scene = single_sphere_scene(1);
  Pose outside = look_at({0.7, 0, 0}, {0, 0, 0});
  CHECK_THROWS_WITH(render_view(scene, {}, {}, {}, outside),
                    "degenerate pose: camera inside geometry");

  World world = build_scene(scene);
  Vec3 center = world.prims[1].pose.origin;  // eye buried in the sphere
  Pose buried = look_at(center, {0, 0, 0.4});
  CHECK_THROWS_WITH(render_view(scene, {}, {}, {}, buried),
                    "degenerate pose: camera inside geometry");
}

TEST_CASE("scene validation rejects bad ranges and stray primitives", "[scene]") {
  SceneConfig scene = single_sphere_scene(1);
  scene.view_distance_range = {0.10, 0.10};
  CHECK_THROWS_AS(scene.validate(), std::invalid_argument);

  scene = single_sphere_scene(1);
  scene.primitives[0].position = {0.7, 0, 0};
  CHECK_THROWS_AS(scene.validate(), std::invalid_argument);
}
