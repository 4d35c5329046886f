#pragma once

#include <cmath>

namespace firenav {

struct Vec3 {
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;

  Vec3 operator+(const Vec3& o) const { return {x + o.x, y + o.y, z + o.z}; }
  Vec3 operator-(const Vec3& o) const { return {x - o.x, y - o.y, z - o.z}; }
  Vec3 operator*(double s) const { return {x * s, y * s, z * s}; }
  Vec3 operator/(double s) const { return {x / s, y / s, z / s}; }
  Vec3& operator+=(const Vec3& o) {
    x += o.x;
    y += o.y;
    z += o.z;
    return *this;
  }

  double dot(const Vec3& o) const { return x * o.x + y * o.y + z * o.z; }
  Vec3 cross(const Vec3& o) const {
    return {y * o.z - z * o.y, z * o.x - x * o.z, x * o.y - y * o.x};
  }
  double norm() const { return std::sqrt(x * x + y * y + z * z); }
  double norm_xy() const { return std::sqrt(x * x + y * y); }
  Vec3 normalized() const {
    const double n = norm();
    return n > 0.0 ? Vec3{x / n, y / n, z / n} : Vec3{};
  }
};

inline Vec3 operator*(double s, const Vec3& v) { return v * s; }

/// Wraps an angle to (-pi, pi]. Values already in range pass through
/// unchanged (no fmod rounding).
inline double wrap_angle(double a) {
  constexpr double kPi = 3.14159265358979323846;
  if (a > -kPi && a <= kPi) return a;
  a = std::fmod(a + kPi, 2.0 * kPi);
  if (a <= 0.0) a += 2.0 * kPi;
  return a - kPi;
}

/// Map-frame pose with yaw only; roll and pitch are assumed compensated
/// upstream and are carried separately where a sensor needs them.
struct Pose {
  Vec3 position;
  double yaw = 0.0;
};

/// Rotates a body-frame vector into the map frame by the pose yaw.
inline Vec3 body_to_map(const Pose& pose, const Vec3& v) {
  const double c = std::cos(pose.yaw), s = std::sin(pose.yaw);
  return {pose.position.x + v.x * c - v.y * s,
          pose.position.y + v.x * s + v.y * c, pose.position.z + v.z};
}

/// Expresses a map-frame point in the body frame of the pose.
inline Vec3 map_to_body(const Pose& pose, const Vec3& p) {
  const double c = std::cos(pose.yaw), s = std::sin(pose.yaw);
  const Vec3 d = p - pose.position;
  return {d.x * c + d.y * s, -d.x * s + d.y * c, d.z};
}

/// Unit direction for a yaw/pitch aim (pitch positive = up).
inline Vec3 direction_from_yaw_pitch(double yaw, double pitch) {
  const double cp = std::cos(pitch);
  return {cp * std::cos(yaw), cp * std::sin(yaw), std::sin(pitch)};
}

struct Aabb {
  Vec3 min;
  Vec3 max;

  bool contains(const Vec3& p) const {
    return p.x >= min.x && p.x <= max.x && p.y >= min.y && p.y <= max.y &&
           p.z >= min.z && p.z <= max.z;
  }
};

}  // namespace firenav
