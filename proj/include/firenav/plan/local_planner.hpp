#pragma once

#include <span>

#include "firenav/plan/planner.hpp"

namespace firenav::plan {

struct LocalPlannerConfig {
  Vec3 window{10.0, 10.0, 4.0};  // meters, centered on the robot
  double resolution = 0.2;
  PlannerConfig planner;
  double distance_clamp = 5.0;  // clearance clamp inside the window
};

/// Re-plans inside a window around the robot against a grid built from the
/// latest cloud (map frame). The local goal is the farthest global-path
/// point inside the window, projected to free space when occluded.
///
/// Throws std::runtime_error("local goal blocked") when no free local goal
/// exists.
Path plan_local(std::span<const Vec3> cloud_map, const Path& global_path,
                const Pose& robot, const LocalPlannerConfig& cfg);

}  // namespace firenav::plan
