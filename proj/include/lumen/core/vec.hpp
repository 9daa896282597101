#pragma once

#include <array>
#include <cmath>

namespace lumen {

struct Vec3 {
  double x = 0, y = 0, z = 0;

  Vec3 operator+(const Vec3& r) const { return {x + r.x, y + r.y, z + r.z}; }
  Vec3 operator-(const Vec3& r) const { return {x - r.x, y - r.y, z - r.z}; }
  Vec3 operator*(double s) const { return {x * s, y * s, z * s}; }
  Vec3 operator/(double s) const { return {x / s, y / s, z / s}; }
  Vec3 operator-() const { return {-x, -y, -z}; }
  Vec3& operator+=(const Vec3& r) { x += r.x; y += r.y; z += r.z; return *this; }
};

inline double dot(const Vec3& a, const Vec3& b) { return a.x * b.x + a.y * b.y + a.z * b.z; }
inline Vec3 cross(const Vec3& a, const Vec3& b) {
  return {a.y * b.z - a.z * b.y, a.z * b.x - a.x * b.z, a.x * b.y - a.y * b.x};
}
inline double norm(const Vec3& v) { return std::sqrt(dot(v, v)); }
inline Vec3 normalized(const Vec3& v) {
  double n = norm(v);
  return n > 0 ? v / n : Vec3{};
}

/// Column-major 3x3 rotation; columns are the rotated basis vectors.
struct Mat3 {
  std::array<Vec3, 3> col{Vec3{1, 0, 0}, Vec3{0, 1, 0}, Vec3{0, 0, 1}};

  Vec3 operator*(const Vec3& v) const {
    return col[0] * v.x + col[1] * v.y + col[2] * v.z;
  }
  Mat3 operator*(const Mat3& r) const {
    return Mat3{{(*this) * r.col[0], (*this) * r.col[1], (*this) * r.col[2]}};
  }
  /// Transpose-multiply; for rotations this is the inverse transform.
  Vec3 tmul(const Vec3& v) const {
    return {dot(col[0], v), dot(col[1], v), dot(col[2], v)};
  }
};

inline Mat3 rotation_y(double radians) {
  double c = std::cos(radians), s = std::sin(radians);
  // columns: images of x, y, z under the rotation
  return Mat3{{Vec3{c, 0, -s}, Vec3{0, 1, 0}, Vec3{s, 0, c}}};
}

/// Rigid camera pose. Rotation columns are the camera axes expressed in
/// world coordinates: x = image right, y = up, z = viewing direction.
struct Pose {
  Mat3 rotation;
  Vec3 origin;

  Vec3 to_world(const Vec3& cam) const { return rotation * cam + origin; }
  Vec3 to_local(const Vec3& world) const { return rotation.tmul(world - origin); }
  Vec3 right() const { return rotation.col[0]; }
  Vec3 up() const { return rotation.col[1]; }
  Vec3 forward() const { return rotation.col[2]; }
};

/// Pose at `eye` looking toward `target` with `world_up` resolving roll.
/// Degenerate when the view direction is parallel to world_up.
inline Pose look_at(const Vec3& eye, const Vec3& target, const Vec3& world_up = {0, 1, 0}) {
  Vec3 f = normalized(target - eye);
  Vec3 r = cross(world_up, f);
  double rn = norm(r);
  if (rn < 1e-9) {
    // fall back to an arbitrary horizontal right axis
    r = cross(Vec3{0, 0, 1}, f);
    rn = norm(r);
  }
  r = r / rn;
  Vec3 u = cross(f, r);
  return Pose{Mat3{{r, u, f}}, eye};
}

struct Ray {
  Vec3 origin;
  Vec3 dir;  // unit length
};

}  // namespace lumen
