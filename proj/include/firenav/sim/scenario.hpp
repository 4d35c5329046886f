#pragma once

#include <optional>
#include <string>
#include <vector>

#include "firenav/fire/estimator.hpp"
#include "firenav/fire/extinguish.hpp"
#include "firenav/mcl/mcl.hpp"
#include "firenav/plan/local_planner.hpp"
#include "firenav/plan/planner.hpp"
#include "firenav/sim/types.hpp"
#include "firenav/sim/world.hpp"
#include "firenav/track/trackers.hpp"

namespace firenav::sim {

/// Everything one robot brings to a run: platform, sensors, mission, and
/// the per-module configurations.
struct RobotSpec {
  std::string id;
  RobotKind kind = RobotKind::Ugv;
  Pose initial_pose;
  double tank_capacity = 3.0;
  bool carries_blanket = false;
  SensorRig rig;
  std::string mission_file;  // empty = no mission (sensors only)
  double start_time = 0.0;

  mcl::MclConfig mcl;
  plan::PlannerConfig planner;
  plan::LocalPlannerConfig local;
  track::PurePursuitConfig pure_pursuit;
  track::SaturatedProportionalConfig proportional;
  fire::ExtinguishConfig extinguish;
  fire::RangeConfig range;
  fire::ConfirmConfig confirm;
  double detect_threshold = 60.0;
  int min_blob_pixels = 4;
};

struct Scenario {
  std::string name;
  uint64_t seed = 1;
  double duration = 900.0;
  double map_resolution = 0.2;
  double likelihood_sigma = 0.2;
  double likelihood_truncation = 0.6;
  double distance_clamp = 5.0;
  WorldConfig world;
  std::vector<Vec3> map_points;
  std::vector<RobotSpec> robots;
  std::vector<FireSource> fires;
};

/// Sensible platform defaults: planar planning with the competition UGV
/// parameters, volumetric planning with the UAV ones, ground-locked MCL
/// z dispersion for the UGV.
RobotSpec default_robot_spec(RobotKind kind);

/// Surface-sampled points for an axis-aligned box (all six faces).
void sample_box(std::vector<Vec3>& out, const Vec3& lo, const Vec3& hi,
                double spacing);

/// Loads a scenario JSON file; relative paths (map file, missions) resolve
/// against the scenario's directory. Throws std::runtime_error with a
/// diagnostic on malformed input.
Scenario load_scenario(const std::string& path);

}  // namespace firenav::sim
