#pragma once

#include <limits>
#include <span>
#include <vector>

#include "firenav/core/geometry.hpp"
#include "firenav/world/distance_field.hpp"
#include "firenav/world/voxel_grid.hpp"

namespace firenav::plan {

using world::CellIndex;

enum class PlannerMode { Planar, Volumetric };

struct PlannerConfig {
  /// Weight of the obstacle-proximity cost term, in [0, 1]. 0 recovers the
  /// unmodified algorithm.
  double cost_weight = 0.0;
  /// Maximum segment length two vertices may be linked across. Infinity
  /// recovers the unmodified algorithm.
  double max_line_of_sight = std::numeric_limits<double>::infinity();
  double inflation_radius = 0.0;
  double goal_tolerance = 0.3;
  PlannerMode mode = PlannerMode::Volumetric;
  /// Planar mode collapses occupancy over this z band (map frame, meters)
  /// unless the grid is a single layer already. The band starts above the
  /// ground-plane cells so floors do not read as walls.
  double planar_band_min = 0.25;
  double planar_band_max = 1.2;
};

struct Path {
  std::vector<Vec3> waypoints;
  double length = 0.0;
  double min_clearance = 0.0;
  long expanded_nodes = 0;

  bool empty() const { return waypoints.empty(); }
};

/// True iff |a-b| <= max_dist and the conservative voxel traversal between
/// the two points crosses no occupied cell of `grid` (which is expected to
/// carry inflated occupancy already). Out-of-grid cells read as free.
bool line_of_sight(const world::VoxelGrid& grid, const Vec3& a, const Vec3& b,
                   double max_dist);

/// Obstacle-proximity cost of a cell: max_dist - clearance, clamped to
/// [0, max_dist]; higher cost nearer obstacles.
double dist_cost(const world::DistanceField& dist, const CellIndex& cell);

/// Lazy Theta* over 8-connected (Planar) or 26-connected (Volumetric)
/// cells, with the proximity cost term added to the cost-to-reach and the
/// line-of-sight test bounded by max_line_of_sight.
///
/// Throws std::runtime_error("invalid start") when the start lies in
/// inflated-occupied space and std::runtime_error("no path found") when the
/// goal cannot be reached.
Path plan(const world::VoxelGrid& grid, const world::DistanceField& dist,
          const Vec3& start, const Vec3& goal, const PlannerConfig& cfg);

}  // namespace firenav::plan
