#pragma once

#include <span>

#include "firenav/core/geometry.hpp"

namespace firenav::track {

struct PurePursuitConfig {
  double look_ahead = 1.0;    // L, meters along the path
  double angular_gain = 1.5;  // k_w
  double nominal_speed = 0.5;
  double max_yaw_rate = 1.0;
  double goal_tolerance = 0.25;
  double slow_radius = 1.0;  // linear speed taper near the goal
};

struct UgvCommand {
  double v = 0.0;
  double omega = 0.0;
};

/// Pure pursuit for the ground platform: steers toward the path point one
/// look-ahead arc distance past the closest point; the commanded heading
/// change is atan2 of the target in the robot frame.
UgvCommand pure_pursuit(std::span<const Vec3> path, const Pose& pose,
                        const PurePursuitConfig& cfg);

struct SaturatedProportionalConfig {
  double gain = 0.8;          // k_p, 1/s
  double max_speed_xy = 1.5;  // per-axis saturation
  double max_speed_z = 1.0;
  double yaw_gain = 1.2;
  double max_yaw_rate = 0.8;
  double goal_tolerance = 0.3;
};

struct UavCommand {
  Vec3 velocity;  // body frame
  double yaw_rate = 0.0;
};

/// Saturated proportional controller for the aerial platforms: per-axis
/// clamp(k_p * error) in the body frame, yielding a trapezoidal velocity
/// profile toward the waypoint. desired_yaw is tracked with its own clamp.
UavCommand saturated_proportional(const Vec3& target, const Pose& pose,
                                  double desired_yaw,
                                  const SaturatedProportionalConfig& cfg);

}  // namespace firenav::track
