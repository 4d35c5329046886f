#include "firenav/track/trackers.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace firenav::track {

namespace {
constexpr double kPi = 3.14159265358979323846;

double clamp_mag(double v, double lim) {
  return v > lim ? lim : (v < -lim ? -lim : v);
}
}  // namespace

UgvCommand pure_pursuit(std::span<const Vec3> path, const Pose& pose,
                        const PurePursuitConfig& cfg) {
  if (path.empty()) throw std::invalid_argument("path must be non-empty");
  if (cfg.look_ahead <= 0.0)
    throw std::invalid_argument("look_ahead must be > 0");

  const Vec3 goal = path.back();
  const double goal_dist =
      Vec3{goal.x - pose.position.x, goal.y - pose.position.y, 0.0}.norm();
  if (goal_dist <= cfg.goal_tolerance) return {0.0, 0.0};

  // Closest point on the polyline, by arc parameter.
  double best_d = std::numeric_limits<double>::infinity();
  double closest_arc = 0.0;
  double arc = 0.0;
  for (std::size_t i = 0; i + 1 < path.size() || i == 0; ++i) {
    const Vec3 a = path[i];
    const Vec3 b = path.size() > 1 ? path[i + 1] : a;
    const Vec3 ab = b - a;
    const double len = ab.norm();
    double t = 0.0;
    if (len > 1e-12) {
      t = std::clamp(((pose.position - a).dot(ab)) / (len * len), 0.0, 1.0);
    }
    const Vec3 q = a + ab * t;
    const double d =
        Vec3{q.x - pose.position.x, q.y - pose.position.y, 0.0}.norm();
    if (d < best_d) {
      best_d = d;
      closest_arc = arc + len * t;
    }
    arc += len;
    if (path.size() <= 1) break;
  }

  // Target waypoint one look-ahead past the closest point.
  const double target_arc = closest_arc + cfg.look_ahead;
  Vec3 target = path.back();
  arc = 0.0;
  for (std::size_t i = 0; i + 1 < path.size(); ++i) {
    const Vec3 a = path[i];
    const Vec3 b = path[i + 1];
    const double len = (b - a).norm();
    if (arc + len >= target_arc && len > 1e-12) {
      target = a + (b - a) * ((target_arc - arc) / len);
      break;
    }
    arc += len;
  }

  const Vec3 local = map_to_body(pose, target);
  const double heading_change = std::atan2(local.y, local.x);
  UgvCommand cmd;
  cmd.omega = clamp_mag(cfg.angular_gain * heading_change, cfg.max_yaw_rate);
  // Speed backs off with heading error (stops to turn in place beyond
  // pi/2) and with proximity to the goal.
  const double turn_scale =
      std::max(0.0, 1.0 - std::abs(heading_change) / (kPi / 2.0));
  const double goal_scale = std::min(1.0, goal_dist / cfg.slow_radius);
  cmd.v = cfg.nominal_speed * turn_scale * goal_scale;
  return cmd;
}

UavCommand saturated_proportional(const Vec3& target, const Pose& pose,
                                  double desired_yaw,
                                  const SaturatedProportionalConfig& cfg) {
  const Vec3 error = map_to_body(pose, target);
  UavCommand cmd;
  cmd.velocity.x = clamp_mag(cfg.gain * error.x, cfg.max_speed_xy);
  cmd.velocity.y = clamp_mag(cfg.gain * error.y, cfg.max_speed_xy);
  cmd.velocity.z = clamp_mag(cfg.gain * error.z, cfg.max_speed_z);
  const double yaw_err = wrap_angle(desired_yaw - pose.yaw);
  cmd.yaw_rate = clamp_mag(cfg.yaw_gain * yaw_err, cfg.max_yaw_rate);
  return cmd;
}

}  // namespace firenav::track
