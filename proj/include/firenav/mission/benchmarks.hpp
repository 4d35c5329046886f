#pragma once

#include <string>
#include <vector>

#include "firenav/plan/planner.hpp"
#include "firenav/sim/scenario.hpp"

namespace firenav::mission {

/// One sensor-combination row of the localization benchmark.
struct MclBenchRow {
  std::string combo;
  double pos_rmse = 0.0;
  double z_rmse = 0.0;
  double yaw_rmse = 0.0;
  double mean_update_ms = 0.0;
  double max_update_ms = 0.0;
  int updates = 0;
};

/// Runs the fixed 200 s benchmark trajectory under each sensor combination
/// (map-only, +Alt, +Yaw, +Alt+Yaw, and the GPS variants). The trajectory
/// and the sensor noise streams are identical across combinations.
std::vector<MclBenchRow> bench_mcl(uint64_t seed, double duration = 200.0,
                                   int particles = 1000,
                                   int cloud_points = 500);

struct GpsOutlierResult {
  double max_mcl_error = 0.0;   // position error of the GPS-free filter
  double max_gps_error = 0.0;   // raw GPS error against truth
  double mean_mcl_error = 0.0;
};

/// Constant-velocity GPS drift plus jump-back injected while the filter
/// runs with the GPS term zeroed.
GpsOutlierResult bench_gps_outlier(uint64_t seed, double duration = 200.0);

/// A named planner benchmark problem.
struct PlannerScenario {
  std::string name;
  world::VoxelGrid grid;
  world::DistanceField dist;
  Vec3 start;
  Vec3 goal;
  plan::PlannerMode mode = plan::PlannerMode::Planar;
  double inflation = 0.0;
};

/// The fixed benchmark suite: a door crossing, a pillar field, and a
/// volumetric room with a window.
std::vector<PlannerScenario> planner_benchmark_scenarios();

struct PlannerBenchRow {
  std::string scenario;
  double cost_weight = 0.0;
  double line_of_sight = 0.0;  // infinity allowed
  long expanded = 0;
  double length = 0.0;
  double min_clearance = 0.0;
  double wall_ms = 0.0;
};

std::vector<PlannerBenchRow> bench_planner(
    const std::vector<double>& cost_weights,
    const std::vector<double>& line_of_sights);

}  // namespace firenav::mission
