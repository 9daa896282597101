#pragma once

#include <cmath>
#include <limits>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "lumen/core/rng.hpp"
#include "lumen/core/types.hpp"
#include "lumen/core/vec.hpp"

namespace lumen {

inline double deg_to_rad(double deg) { return deg * 3.14159265358979323846 / 180.0; }

struct CameraModel {
  double focal_px = 256.0;
  double principal_x = 128.0;
  double principal_y = 128.0;
  int width = 256;
  int height = 256;
  double baseline_m = 0.005;

  void validate() const {
    if (focal_px <= 0) throw std::invalid_argument("CameraModel: focal_px must be > 0");
    if (baseline_m <= 0) throw std::invalid_argument("CameraModel: baseline_m must be > 0");
    if (width < 32 || height < 32)
      throw std::invalid_argument("CameraModel: width and height must be >= 32");
  }
};

struct ProjectorRig {
  double rotation_y_deg = 1.5;
  Vec3 translation_m{0.02, 0.0, 0.02};
  int projector_columns = 256;
  double projector_focal_px = 256.0;

  void validate(int pattern_count) const {
    int w = projector_columns;
    if (w < 2 || (w & (w - 1)) != 0)
      throw std::invalid_argument("ProjectorRig: projector_columns must be a power of two");
    if (pattern_count >= 1 && w < (1 << pattern_count))
      throw std::invalid_argument("ProjectorRig: projector_columns must be >= 2^t");
    if (projector_focal_px <= 0)
      throw std::invalid_argument("ProjectorRig: projector_focal_px must be > 0");
  }
};

enum class PrimitiveKind { Plane, Sphere, Box, Podium };

inline const char* to_string(PrimitiveKind k) {
  switch (k) {
    case PrimitiveKind::Plane: return "plane";
    case PrimitiveKind::Sphere: return "sphere";
    case PrimitiveKind::Box: return "box";
    default: return "podium";
  }
}

inline PrimitiveKind primitive_kind_from_string(const std::string& s) {
  if (s == "plane") return PrimitiveKind::Plane;
  if (s == "sphere") return PrimitiveKind::Sphere;
  if (s == "box") return PrimitiveKind::Box;
  if (s == "podium") return PrimitiveKind::Podium;
  throw std::invalid_argument("unknown primitive kind: " + s);
}

/// Size semantics per kind: sphere -> size.x is the diameter; box/podium ->
/// full extents (box components <= 0 are drawn from object_scale_range);
/// plane -> rectangle extents in its local xy, size.x <= 0 meaning infinite.
/// Planes are oriented by `normal` (yaw_deg applies to boxes only).
struct Primitive {
  PrimitiveKind kind = PrimitiveKind::Sphere;
  Vec3 position{0, 0, 0};
  double yaw_deg = 0.0;
  Vec3 normal{0, 0, 1};
  Vec3 size{0, 0, 0};
  double albedo = 0.8;
  bool on_podium = false;
};

struct Range {
  double low = 0.0;
  double high = 0.0;
};

struct SceneConfig {
  double room_side_m = 1.0;
  double podium_side_m = 0.10;
  std::vector<Primitive> primitives;
  Range object_scale_range{0.03, 0.10};
  Range view_distance_range{0.03, 0.10};
  int views_per_object = 10;
  std::uint64_t rng_seed = 0;

  void validate() const {
    if (room_side_m <= 0) throw std::invalid_argument("SceneConfig: room_side_m must be > 0");
    if (podium_side_m < 0) throw std::invalid_argument("SceneConfig: podium_side_m must be >= 0");
    if (!(object_scale_range.low < object_scale_range.high))
      throw std::invalid_argument("SceneConfig: object_scale_range must satisfy low < high");
    if (!(view_distance_range.low < view_distance_range.high))
      throw std::invalid_argument("SceneConfig: view_distance_range must satisfy low < high");
    if (views_per_object < 1)
      throw std::invalid_argument("SceneConfig: views_per_object must be >= 1");
    double half = room_side_m / 2;
    for (const auto& p : primitives)
      if (std::abs(p.position.x) > half || std::abs(p.position.y) > half ||
          std::abs(p.position.z) > half)
        throw std::invalid_argument("SceneConfig: primitive lies outside the room");
  }
};

// ---------------------------------------------------------------------------
// Resolved render geometry

struct ResolvedPrimitive {
  PrimitiveKind kind;
  Pose pose;     // rotation = yaw about y
  Vec3 size;     // resolved; sphere keeps diameter in x
  double albedo;
};

struct Hit {
  double t = 0.0;
  Vec3 point{};
  Vec3 normal{};  // geometric, not yet flipped toward the viewer
  int prim = -1;  // -1 = room shell
  PrimitiveKind kind = PrimitiveKind::Plane;
  double albedo = 0.5;
};

namespace detail {

constexpr double kRayEps = 1e-9;

inline bool sphere_hit(const Ray& ray, const Vec3& center, double radius, double& t_out) {
  Vec3 oc = ray.origin - center;
  double b = dot(oc, ray.dir);
  double c = dot(oc, oc) - radius * radius;
  double disc = b * b - c;
  if (disc < 0) return false;
  double sq = std::sqrt(disc);
  double t = -b - sq;
  if (t <= kRayEps) t = -b + sq;
  if (t <= kRayEps) return false;
  t_out = t;
  return true;
}

/// Oriented-box slab test in the box's local frame. Reports the entry face, or
/// the exit face when the ray starts inside.
inline bool box_hit(const Ray& ray, const Pose& pose, const Vec3& half, double& t_out,
                    Vec3& normal_out) {
  Vec3 o = pose.to_local(ray.origin);
  Vec3 d = pose.rotation.tmul(ray.dir);
  double tmin = -std::numeric_limits<double>::infinity();
  double tmax = std::numeric_limits<double>::infinity();
  int axis_min = -1, axis_max = -1;
  const double oo[3] = {o.x, o.y, o.z};
  const double dd[3] = {d.x, d.y, d.z};
  const double hh[3] = {half.x, half.y, half.z};
  for (int a = 0; a < 3; ++a) {
    if (std::abs(dd[a]) < 1e-14) {
      if (std::abs(oo[a]) > hh[a]) return false;
      continue;
    }
    double t1 = (-hh[a] - oo[a]) / dd[a];
    double t2 = (hh[a] - oo[a]) / dd[a];
    if (t1 > t2) std::swap(t1, t2);
    if (t1 > tmin) { tmin = t1; axis_min = a; }
    if (t2 < tmax) { tmax = t2; axis_max = a; }
    if (tmin > tmax) return false;
  }
  double t;
  int axis;
  if (tmin > kRayEps) {
    t = tmin;
    axis = axis_min;
  } else if (tmax > kRayEps) {
    t = tmax;
    axis = axis_max;
  } else {
    return false;
  }
  if (axis < 0) return false;
  Vec3 n_local{0, 0, 0};
  double sign = (axis == 0 ? (o.x + t * d.x) : axis == 1 ? (o.y + t * d.y) : (o.z + t * d.z)) >= 0
                    ? 1.0
                    : -1.0;
  if (axis == 0) n_local.x = sign;
  if (axis == 1) n_local.y = sign;
  if (axis == 2) n_local.z = sign;
  t_out = t;
  normal_out = pose.rotation * n_local;
  return true;
}

inline bool plane_hit(const Ray& ray, const Pose& pose, const Vec3& size, double& t_out,
                      Vec3& normal_out) {
  Vec3 n = pose.forward();
  double denom = dot(ray.dir, n);
  if (std::abs(denom) < 1e-14) return false;
  double t = dot(pose.origin - ray.origin, n) / denom;
  if (t <= kRayEps) return false;
  if (size.x > 0) {
    Vec3 local = pose.to_local(ray.origin + ray.dir * t);
    double hy = (size.y > 0 ? size.y : size.x) / 2;
    if (std::abs(local.x) > size.x / 2 || std::abs(local.y) > hy) return false;
  }
  t_out = t;
  normal_out = n;
  return true;
}

}  // namespace detail

class World {
 public:
  double room_half = 0.5;
  std::vector<ResolvedPrimitive> prims;

  std::optional<Hit> trace(const Ray& ray) const {
    std::optional<Hit> best;
    // Room shell: visible from inside only, so the exit face is the hit.
    if (inside_room(ray.origin)) {
      double t_exit = std::numeric_limits<double>::infinity();
      int exit_axis = -1;
      const double oo[3] = {ray.origin.x, ray.origin.y, ray.origin.z};
      const double dd[3] = {ray.dir.x, ray.dir.y, ray.dir.z};
      for (int a = 0; a < 3; ++a) {
        if (std::abs(dd[a]) < 1e-14) continue;
        double t = ((dd[a] > 0 ? room_half : -room_half) - oo[a]) / dd[a];
        if (t < t_exit) {
          t_exit = t;
          exit_axis = a;
        }
      }
      if (exit_axis >= 0 && t_exit > detail::kRayEps) {
        Hit h;
        h.t = t_exit;
        h.point = ray.origin + ray.dir * t_exit;
        Vec3 n{0, 0, 0};  // inward
        double s = dd[exit_axis] > 0 ? -1.0 : 1.0;
        if (exit_axis == 0) n.x = s;
        if (exit_axis == 1) n.y = s;
        if (exit_axis == 2) n.z = s;
        h.normal = n;
        h.prim = -1;
        h.kind = PrimitiveKind::Plane;
        h.albedo = 0.5;
        best = h;
      }
    }
    for (int i = 0; i < static_cast<int>(prims.size()); ++i) {
      const auto& p = prims[i];
      double t;
      Vec3 n;
      bool ok = false;
      switch (p.kind) {
        case PrimitiveKind::Sphere:
          ok = detail::sphere_hit(ray, p.pose.origin, p.size.x / 2, t);
          if (ok) n = (ray.origin + ray.dir * t - p.pose.origin) * (2.0 / p.size.x);
          break;
        case PrimitiveKind::Box:
        case PrimitiveKind::Podium:
          ok = detail::box_hit(ray, p.pose, p.size * 0.5, t, n);
          break;
        case PrimitiveKind::Plane:
          ok = detail::plane_hit(ray, p.pose, p.size, t, n);
          break;
      }
      if (!ok) continue;
      if (!best || t < best->t) {
        Hit h;
        h.t = t;
        h.point = ray.origin + ray.dir * t;
        h.normal = n;
        h.prim = i;
        h.kind = p.kind;
        h.albedo = p.albedo;
        best = h;
      }
    }
    return best;
  }

  bool inside_room(const Vec3& p) const {
    return std::abs(p.x) < room_half && std::abs(p.y) < room_half && std::abs(p.z) < room_half;
  }

  bool inside_solid(const Vec3& p) const {
    for (const auto& prim : prims) {
      if (prim.kind == PrimitiveKind::Sphere) {
        if (norm(p - prim.pose.origin) < prim.size.x / 2) return true;
      } else if (prim.kind == PrimitiveKind::Box || prim.kind == PrimitiveKind::Podium) {
        Vec3 l = prim.pose.to_local(p);
        if (std::abs(l.x) < prim.size.x / 2 && std::abs(l.y) < prim.size.y / 2 &&
            std::abs(l.z) < prim.size.z / 2)
          return true;
      }
    }
    return false;
  }

  /// Euclidean distance from p to the nearest surface (walls included).
  double min_distance(const Vec3& p) const {
    double d = room_half - std::max({std::abs(p.x), std::abs(p.y), std::abs(p.z)});
    for (const auto& prim : prims) {
      double pd = std::numeric_limits<double>::infinity();
      if (prim.kind == PrimitiveKind::Sphere) {
        pd = norm(p - prim.pose.origin) - prim.size.x / 2;
      } else if (prim.kind == PrimitiveKind::Box || prim.kind == PrimitiveKind::Podium) {
        Vec3 l = prim.pose.to_local(p);
        Vec3 h = prim.size * 0.5;
        double qx = std::abs(l.x) - h.x, qy = std::abs(l.y) - h.y, qz = std::abs(l.z) - h.z;
        double ox = std::max(qx, 0.0), oy = std::max(qy, 0.0), oz = std::max(qz, 0.0);
        pd = std::sqrt(ox * ox + oy * oy + oz * oz) + std::min(std::max({qx, qy, qz}), 0.0);
      } else {  // plane rectangle
        Vec3 l = prim.pose.to_local(p);
        if (prim.size.x > 0) {
          double hy = (prim.size.y > 0 ? prim.size.y : prim.size.x) / 2;
          double ox = std::max(std::abs(l.x) - prim.size.x / 2, 0.0);
          double oy = std::max(std::abs(l.y) - hy, 0.0);
          pd = std::sqrt(ox * ox + oy * oy + l.z * l.z);
        } else {
          pd = std::abs(l.z);
        }
      }
      d = std::min(d, pd);
    }
    return d;
  }

  /// Centroid of the foreground objects (podium excluded when other solids exist).
  Vec3 object_centroid() const {
    Vec3 sum{0, 0, 0};
    int n = 0;
    for (const auto& p : prims)
      if (p.kind == PrimitiveKind::Sphere || p.kind == PrimitiveKind::Box) {
        sum = sum + p.pose.origin;
        ++n;
      }
    if (n == 0)
      for (const auto& p : prims)
        if (p.kind != PrimitiveKind::Plane) {
          sum = sum + p.pose.origin;
          ++n;
        }
    if (n == 0)
      for (const auto& p : prims) {
        sum = sum + p.pose.origin;
        ++n;
      }
    if (n == 0) throw std::runtime_error("no object to view");
    return sum * (1.0 / n);
  }
};

/// Resolve sizes and placement into render geometry. Deterministic in
/// scene.rng_seed; a central podium is added when none is declared.
inline World build_scene(const SceneConfig& scene) {
  scene.validate();
  World w;
  w.room_half = scene.room_side_m / 2;
  Rng rng(scene.rng_seed ^ 0x5ce9e5u);

  double podium_top = -w.room_half;
  std::vector<Primitive> prims = scene.primitives;
  bool has_podium = false;
  for (const auto& p : prims)
    if (p.kind == PrimitiveKind::Podium) has_podium = true;
  if (!has_podium && scene.podium_side_m > 0) {
    Primitive pod;
    pod.kind = PrimitiveKind::Podium;
    pod.size = Vec3{scene.podium_side_m, scene.podium_side_m, scene.podium_side_m};
    pod.albedo = 0.7;
    prims.insert(prims.begin(), pod);
  }

  for (const auto& p : prims) {
    ResolvedPrimitive r;
    r.kind = p.kind;
    r.albedo = p.albedo;
    r.size = p.size;
    auto draw = [&] { return rng.uniform(scene.object_scale_range.low, scene.object_scale_range.high); };
    switch (p.kind) {
      case PrimitiveKind::Sphere:
        if (r.size.x <= 0) r.size.x = draw();
        r.size.y = r.size.z = r.size.x;
        break;
      case PrimitiveKind::Box:
        if (r.size.x <= 0) r.size.x = draw();
        if (r.size.y <= 0) r.size.y = draw();
        if (r.size.z <= 0) r.size.z = draw();
        break;
      case PrimitiveKind::Podium: {
        double side = r.size.x > 0 ? r.size.x : scene.podium_side_m;
        r.size = Vec3{side, side, side};
        break;
      }
      case PrimitiveKind::Plane:
        break;  // size.x <= 0 stays infinite
    }
    if (p.kind == PrimitiveKind::Plane) {
      if (norm(p.normal) < 1e-12)
        throw std::invalid_argument("build_scene: plane normal must be nonzero");
      r.pose.rotation = look_at(Vec3{0, 0, 0}, normalized(p.normal)).rotation;
    } else {
      r.pose.rotation = rotation_y(deg_to_rad(p.yaw_deg));
    }
    r.pose.origin = p.position;
    if (p.kind == PrimitiveKind::Podium) {
      r.pose.origin.y = -w.room_half + r.size.y / 2;
      podium_top = -w.room_half + r.size.y;
    }
    w.prims.push_back(r);
  }
  // second pass: rest declared objects on the podium top
  for (std::size_t i = 0; i < prims.size(); ++i) {
    if (!prims[i].on_podium) continue;
    auto& r = w.prims[i];
    double half_h = r.kind == PrimitiveKind::Sphere ? r.size.x / 2 : r.size.y / 2;
    r.pose.origin.y = podium_top + half_h;
  }
  return w;
}

constexpr double kMinPoseClearance = 0.025;  // keeps every visible depth above f*b/(0.25*w)

/// Deterministic viewpoint sampling: poses look at the object centroid from a
/// distance drawn from view_distance_range, rejecting placements that violate
/// the clearance needed to keep disparities inside the matcher's search range.
inline std::vector<Pose> sample_viewpoints(const SceneConfig& scene,
                                           const CameraModel& camera = {},
                                           const ProjectorRig& rig = {}) {
  if (scene.primitives.empty()) throw std::runtime_error("no object to view");
  scene.validate();
  camera.validate();
  World world = build_scene(scene);
  Vec3 centroid = world.object_centroid();
  Rng rng(scene.rng_seed ^ 0x71e9f0u);

  std::vector<Pose> poses;
  const int max_attempts = 200000;
  int attempts = 0;
  while (static_cast<int>(poses.size()) < scene.views_per_object) {
    if (++attempts > max_attempts)
      throw std::runtime_error("no valid viewpoint found for scene (clearance unsatisfiable)");
    Vec3 dir = rng.unit_vector();
    double dist = rng.uniform(scene.view_distance_range.low, scene.view_distance_range.high);
    Vec3 eye = centroid + dir * dist;
    if (!world.inside_room(eye)) continue;
    Pose pose = look_at(eye, centroid);
    Vec3 right_eye = eye + pose.right() * camera.baseline_m;
    Vec3 proj = pose.to_world(rig.translation_m);
    if (world.inside_solid(eye) || world.inside_solid(right_eye) || world.inside_solid(proj))
      continue;
    if (world.min_distance(eye) < kMinPoseClearance) continue;
    if (world.min_distance(right_eye) < kMinPoseClearance) continue;
    if (world.min_distance(proj) < kMinPoseClearance / 5) continue;
    poses.push_back(pose);
  }
  return poses;
}

struct StereoFrame {
  Image2D<float> image_left;
  Image2D<float> image_right;
  Image2D<float> gt_disparity;
  Mask valid;   // hit geometry and visible in both views
  Mask seg;     // podium + object coverage in the left view
  Mask shadow;  // visible but unlit by the projector (left view)

  StereoFrame(int w, int h)
      : image_left(w, h, 0.f),
        image_right(w, h, 0.f),
        gt_disparity(w, h, 0.f),
        valid(w, h, 0),
        seg(w, h, 0),
        shadow(w, h, 0) {}

  int width() const { return image_left.width(); }
  int height() const { return image_left.height(); }
};

}  // namespace lumen
