#pragma once

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "lumen/core/parallel.hpp"
#include "lumen/patterns/codec.hpp"
#include "lumen/scene/scene.hpp"

namespace lumen {

struct RenderResult {
  StereoFrame frame;
  PatternStack patterns_left;
  PatternStack patterns_right;
};

namespace detail {

struct Projector {
  Pose pose;
  double focal;
  int columns;

  /// Projector column hit by world point X, or -1 when X is outside the
  /// frustum. v is bounded like u (square projector image, centered axis).
  int column_of(const Vec3& x) const {
    Vec3 l = pose.to_local(x);
    if (l.z < 1e-12) return -1;
    double half = columns / 2.0;
    double u = half + focal * l.x / l.z;
    double v = half - focal * l.y / l.z;
    if (u < 0 || u >= columns || v < 0 || v >= columns) return -1;
    return static_cast<int>(u);
  }
};

inline bool reaches(const World& world, const Vec3& from, const Vec3& to) {
  Vec3 delta = to - from;
  double dist = norm(delta);
  if (dist < 1e-12) return true;
  auto hit = world.trace(Ray{from, delta * (1.0 / dist)});
  return !hit || hit->t > dist * (1.0 - 1e-6);
}

}  // namespace detail

/// Ray-cast one stereo view: grayscale images (Lambert, camera-colocated
/// light), the projected pattern stacks for both eyes, ground-truth disparity
/// from left depth, and validity / segmentation / projector-shadow masks.
inline RenderResult render_view(const SceneConfig& scene, const CameraModel& camera,
                                const ProjectorRig& rig, const PatternSpec& patterns,
                                const Pose& pose) {
  camera.validate();
  patterns.validate();
  rig.validate(patterns.t);
  if (rig.projector_columns != patterns.code_width)
    throw std::invalid_argument("render_view: rig.projector_columns != patterns.code_width");
  World world = build_scene(scene);

  const int w = camera.width, h = camera.height;
  Pose right_pose{pose.rotation, pose.origin + pose.right() * camera.baseline_m};
  for (const Vec3& eye : {pose.origin, right_pose.origin})
    if (!world.inside_room(eye) || world.inside_solid(eye))
      throw std::runtime_error("degenerate pose: camera inside geometry");

  detail::Projector projector{
      Pose{pose.rotation * rotation_y(deg_to_rad(rig.rotation_y_deg)),
           pose.to_world(rig.translation_m)},
      rig.projector_focal_px, rig.projector_columns};

  RenderResult out{StereoFrame(w, h), PatternStack(w, h, patterns.t, 0.f),
                   PatternStack(w, h, patterns.t, 0.f)};

  // lit test: inside frustum, front-facing, and unshadowed from the projector
  auto lit_column = [&](const Vec3& x, const Vec3& n_toward_eye) -> int {
    int col = projector.column_of(x);
    if (col < 0) return -1;
    if (dot(n_toward_eye, projector.pose.origin - x) <= 0) return -1;
    if (!detail::reaches(world, projector.pose.origin, x)) return -1;
    return col;
  };

  auto render_eye = [&](const Pose& eye_pose, Image2D<float>& image, PatternStack& stack,
                        bool left_pass) {
    parallel_rows(h, [&](int y) {
      for (int x = 0; x < w; ++x) {
        Vec3 dir_cam{(x + 0.5 - camera.principal_x) / camera.focal_px,
                     (camera.principal_y - (y + 0.5)) / camera.focal_px, 1.0};
        Ray ray{eye_pose.origin, normalized(eye_pose.rotation * dir_cam)};
        auto hit = world.trace(ray);
        if (!hit) continue;
        Vec3 n = hit->normal;
        if (dot(n, ray.dir) > 0) n = n * -1.0;
        image.at(x, y) =
            static_cast<float>(std::clamp(hit->albedo * dot(n, ray.dir * -1.0), 0.0, 1.0));
        int col = lit_column(hit->point, n);
        if (col >= 0)
          for (int layer = 1; layer <= patterns.t; ++layer)
            stack.at(x, y, layer - 1) = static_cast<float>(stripe(patterns, layer, col));
        if (!left_pass) continue;

        double z = dot(hit->point - eye_pose.origin, eye_pose.forward());
        double d = camera.focal_px * camera.baseline_m / z;
        out.frame.gt_disparity.at(x, y) = static_cast<float>(d);
        if (hit->kind != PrimitiveKind::Plane && hit->prim >= 0) out.frame.seg.at(x, y) = 1;
        if (col < 0) out.frame.shadow.at(x, y) = 1;
        double xr = x + 0.5 - d;
        if (xr >= 0.0 && xr < w && detail::reaches(world, right_pose.origin, hit->point))
          out.frame.valid.at(x, y) = 1;
      }
    });
  };

  render_eye(pose, out.frame.image_left, out.patterns_left, true);
  render_eye(right_pose, out.frame.image_right, out.patterns_right, false);
  return out;
}

/// disparity = focal_px * baseline_m / depth; nonpositive depth -> invalid.
inline DisparityMap gt_disparity_from_depth(const Image2D<float>& depth_m,
                                            const CameraModel& camera,
                                            const Mask* valid = nullptr) {
  camera.validate();
  if (valid && (valid->width() != depth_m.width() || valid->height() != depth_m.height()))
    throw std::invalid_argument("gt_disparity_from_depth: mask size mismatch");
  DisparityMap out(depth_m.width(), depth_m.height());
  for (int y = 0; y < depth_m.height(); ++y)
    for (int x = 0; x < depth_m.width(); ++x) {
      if (valid && !valid->at(x, y)) continue;
      double z = depth_m.at(x, y);
      if (z <= 0) continue;
      out.value.at(x, y) = static_cast<float>(camera.focal_px * camera.baseline_m / z);
      out.valid.at(x, y) = 1;
    }
  return out;
}

}  // namespace lumen
