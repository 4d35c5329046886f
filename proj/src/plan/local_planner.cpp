#include "firenav/plan/local_planner.hpp"

#include <cmath>
#include <deque>
#include <stdexcept>

namespace firenav::plan {

namespace {

/// Lattice-aligned window origin so identical poses yield identical grids.
Vec3 window_origin(const Pose& robot, const LocalPlannerConfig& cfg) {
  auto snap = [&](double v) {
    return std::floor(v / cfg.resolution) * cfg.resolution;
  };
  return {snap(robot.position.x - cfg.window.x / 2.0),
          snap(robot.position.y - cfg.window.y / 2.0),
          snap(robot.position.z - cfg.window.z / 2.0)};
}

}  // namespace

Path plan_local(std::span<const Vec3> cloud_map, const Path& global_path,
                const Pose& robot, const LocalPlannerConfig& cfg) {
  if (global_path.empty()) throw std::invalid_argument("global path required");

  const Vec3 origin = window_origin(robot, cfg);
  const CellIndex dims{
      static_cast<int>(std::ceil(cfg.window.x / cfg.resolution)),
      static_cast<int>(std::ceil(cfg.window.y / cfg.resolution)),
      static_cast<int>(std::ceil(cfg.window.z / cfg.resolution))};
  world::VoxelGrid grid(cfg.resolution, dims, origin);
  for (const auto& p : cloud_map) {
    const CellIndex c = grid.cell_of(p);
    if (grid.in_bounds(c)) grid.set_occupied(c);
  }
  const auto dist = world::DistanceField::build(grid, cfg.distance_clamp);

  // Farthest global-path point still inside the window (sampled densely
  // along the polyline), with a one-cell safety margin at the border.
  const Aabb inner{
      origin + Vec3{cfg.resolution, cfg.resolution, cfg.resolution},
      origin + Vec3{dims.x * cfg.resolution - cfg.resolution,
                    dims.y * cfg.resolution - cfg.resolution,
                    dims.z * cfg.resolution - cfg.resolution}};
  Vec3 local_goal = global_path.waypoints.front();
  bool have_goal = false;
  const double sample_step = cfg.resolution / 2.0;
  for (std::size_t i = 0; i + 1 < global_path.waypoints.size() || i == 0; ++i) {
    const Vec3 a = global_path.waypoints[i];
    const Vec3 b = global_path.waypoints.size() > 1
                       ? global_path.waypoints[i + 1]
                       : a;
    const double seg = (b - a).norm();
    const int steps = std::max(1, static_cast<int>(std::ceil(seg / sample_step)));
    for (int k = 0; k <= steps; ++k) {
      const Vec3 p = a + (b - a) * (static_cast<double>(k) / steps);
      if (inner.contains(p)) {
        local_goal = p;
        have_goal = true;
      }
    }
    if (global_path.waypoints.size() <= 1) break;
  }
  if (!have_goal) local_goal = robot.position;  // at/over the goal already

  const bool planar = cfg.planner.mode == PlannerMode::Planar;
  if (planar) local_goal.z = robot.position.z;

  // Project an occluded goal to the nearest free cell (breadth-first ring
  // search, deterministic tie-break by flat index). Planar queries look at
  // the collapse band, not the 3D cell, so the ground never reads blocked.
  PlannerConfig pcfg = cfg.planner;
  int band_lo = 0, band_hi = dims.z - 1;
  if (planar && dims.z > 1) {
    band_lo = std::max(0, static_cast<int>(std::floor(
                              (pcfg.planar_band_min - origin.z) /
                              cfg.resolution)));
    band_hi = std::min(dims.z - 1,
                       static_cast<int>(std::floor(
                           (pcfg.planar_band_max - origin.z) /
                           cfg.resolution)));
    if (band_hi < band_lo) band_hi = band_lo;
  }
  const int band_mid = (band_lo + band_hi) / 2;
  auto blocked_cell = [&](const CellIndex& c) {
    if (c.x < 0 || c.x >= dims.x || c.y < 0 || c.y >= dims.y) return true;
    if (planar) {
      for (int z = band_lo; z <= band_hi; ++z)
        if (grid.occupied({c.x, c.y, z})) return true;
      return dist.at({c.x, c.y, band_mid}) < pcfg.inflation_radius;
    }
    if (!grid.in_bounds(c)) return true;
    if (grid.occupied(c)) return true;
    return dist.at(c) < pcfg.inflation_radius;
  };
  CellIndex goal_cell = grid.cell_of(local_goal);
  if (planar) goal_cell.z = band_mid;
  if (blocked_cell(goal_cell)) {
    std::deque<CellIndex> queue{goal_cell};
    std::vector<uint8_t> seen(grid.cell_count(), 0);
    seen[grid.flat(goal_cell)] = 1;
    bool found = false;
    while (!queue.empty()) {
      const CellIndex c = queue.front();
      queue.pop_front();
      if (!blocked_cell(c)) {
        goal_cell = c;
        found = true;
        break;
      }
      for (int dz = planar ? 0 : -1; dz <= (planar ? 0 : 1); ++dz)
        for (int dy = -1; dy <= 1; ++dy)
          for (int dx = -1; dx <= 1; ++dx) {
            const CellIndex nb{c.x + dx, c.y + dy, c.z + dz};
            if (!grid.in_bounds(nb) || seen[grid.flat(nb)]) continue;
            seen[grid.flat(nb)] = 1;
            queue.push_back(nb);
          }
    }
    if (!found) throw std::runtime_error("local goal blocked");
    local_goal = grid.center_of(goal_cell);
    if (planar) local_goal.z = robot.position.z;
  }

  if ((local_goal - robot.position).norm() < cfg.resolution) {
    Path hold;
    hold.waypoints = {robot.position};
    hold.min_clearance = dist.at_point(robot.position);
    return hold;
  }

  // A robot grazing the inflation boundary still needs a way out: plan from
  // the nearest free cell and lead the path from the true position.
  Vec3 start = robot.position;
  bool start_moved = false;
  {
    CellIndex sc = grid.cell_of(start);
    if (planar) sc.z = band_mid;
    if (blocked_cell(sc)) {
      std::deque<CellIndex> queue{sc};
      std::vector<uint8_t> seen(grid.cell_count(), 0);
      if (grid.in_bounds(sc)) seen[grid.flat(sc)] = 1;
      bool found = false;
      while (!queue.empty()) {
        const CellIndex c = queue.front();
        queue.pop_front();
        if (!blocked_cell(c) &&
            (grid.center_of(c) - robot.position).norm() < 1.5) {
          sc = c;
          found = true;
          break;
        }
        for (int dz = planar ? 0 : -1; dz <= (planar ? 0 : 1); ++dz)
          for (int dy = -1; dy <= 1; ++dy)
            for (int dx = -1; dx <= 1; ++dx) {
              const CellIndex nb{c.x + dx, c.y + dy, c.z + dz};
              if (!grid.in_bounds(nb) || seen[grid.flat(nb)]) continue;
              if ((grid.center_of(nb) - robot.position).norm() > 1.6)
                continue;
              seen[grid.flat(nb)] = 1;
              queue.push_back(nb);
            }
      }
      if (!found) throw std::runtime_error("invalid start");
      start = grid.center_of(sc);
      if (planar) start.z = robot.position.z;
      start_moved = true;
    }
  }

  Path path;
  try {
    path = plan(grid, dist, start, local_goal, pcfg);
  } catch (const std::runtime_error& e) {
    if (std::string(e.what()) == "no path found")
      throw std::runtime_error("local goal blocked");
    throw;
  }
  if (start_moved)
    path.waypoints.insert(path.waypoints.begin(), robot.position);
  return path;
}

}  // namespace firenav::plan
