#include "firenav/world/raycast.hpp"

#include <cmath>
#include <limits>

namespace firenav::world {

std::optional<double> raycast(const VoxelGrid& grid, const Vec3& origin,
                              const Vec3& dir, double max_range) {
  constexpr double kInf = std::numeric_limits<double>::infinity();
  const double res = grid.resolution();

  // Clip the ray to the grid box so traversal can start at the entry face.
  const Vec3 lo = grid.origin();
  const Vec3 hi{lo.x + grid.dims().x * res, lo.y + grid.dims().y * res,
                lo.z + grid.dims().z * res};
  double t0 = 0.0, t1 = max_range;
  const double o[3] = {origin.x, origin.y, origin.z};
  const double d[3] = {dir.x, dir.y, dir.z};
  const double lo3[3] = {lo.x, lo.y, lo.z};
  const double hi3[3] = {hi.x, hi.y, hi.z};
  for (int a = 0; a < 3; ++a) {
    if (std::abs(d[a]) < 1e-12) {
      if (o[a] < lo3[a] || o[a] > hi3[a]) return std::nullopt;
      continue;
    }
    double ta = (lo3[a] - o[a]) / d[a];
    double tb = (hi3[a] - o[a]) / d[a];
    if (ta > tb) std::swap(ta, tb);
    t0 = std::max(t0, ta);
    t1 = std::min(t1, tb);
    if (t0 > t1) return std::nullopt;
  }

  // Amanatides & Woo stepping from the entry point.
  const double eps = 1e-9;
  Vec3 p = origin + dir * (t0 + eps);
  CellIndex c = grid.cell_of(p);
  if (!grid.in_bounds(c)) return std::nullopt;
  if (grid.occupied(c)) return t0;

  const int step[3] = {d[0] > 0 ? 1 : -1, d[1] > 0 ? 1 : -1,
                       d[2] > 0 ? 1 : -1};
  double t_max[3], t_delta[3];
  const int ci[3] = {c.x, c.y, c.z};
  for (int a = 0; a < 3; ++a) {
    if (std::abs(d[a]) < 1e-12) {
      t_max[a] = kInf;
      t_delta[a] = kInf;
    } else {
      const double cell_edge =
          lo3[a] + (ci[a] + (step[a] > 0 ? 1 : 0)) * res;
      t_max[a] = (cell_edge - o[a]) / d[a];
      t_delta[a] = res / std::abs(d[a]);
    }
  }

  int cur[3] = {c.x, c.y, c.z};
  while (true) {
    int axis = 0;
    if (t_max[1] < t_max[axis]) axis = 1;
    if (t_max[2] < t_max[axis]) axis = 2;
    const double t = t_max[axis];
    if (t > t1) return std::nullopt;
    cur[axis] += step[axis];
    const CellIndex nc{cur[0], cur[1], cur[2]};
    if (!grid.in_bounds(nc)) return std::nullopt;
    if (grid.occupied(nc)) return t;
    t_max[axis] += t_delta[axis];
  }
}

}  // namespace firenav::world
