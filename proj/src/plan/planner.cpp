#include "firenav/plan/planner.hpp"

#include <algorithm>
#include <cmath>
#include <queue>
#include <stdexcept>

#include "../world/edt.hpp"

namespace firenav::plan {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

/// Conservative traversal in continuous cell coordinates: every cell whose
/// interior the segment passes through is visited; at simultaneous axis
/// crossings the single-axis intermediate cells are visited too, so the
/// segment cannot squeeze between two diagonally-adjacent blocked cells.
template <typename Blocked>
bool segment_free(const Blocked& blocked, double ax, double ay, double az,
                  double bx, double by, double bz) {
  const double a[3] = {ax, ay, az};
  const double b[3] = {bx, by, bz};
  int cell[3] = {static_cast<int>(std::floor(ax)),
                 static_cast<int>(std::floor(ay)),
                 static_cast<int>(std::floor(az))};
  if (blocked(cell[0], cell[1], cell[2])) return false;

  struct Crossing {
    double t;
    int axis;
  };
  std::vector<Crossing> crossings;
  for (int axis = 0; axis < 3; ++axis) {
    const double d = b[axis] - a[axis];
    if (std::abs(d) < 1e-12) continue;
    const int step = d > 0 ? 1 : -1;
    int k = cell[axis] + (step > 0 ? 1 : 0);
    while (true) {
      const double t = (static_cast<double>(k) - a[axis]) / d;
      if (t >= 1.0 - 1e-12) break;
      if (t > 1e-12) crossings.push_back({t, axis});
      k += step;
    }
  }
  std::sort(crossings.begin(), crossings.end(),
            [](const Crossing& l, const Crossing& r) {
              return l.t < r.t || (l.t == r.t && l.axis < r.axis);
            });

  const int step[3] = {bx >= ax ? 1 : -1, by >= ay ? 1 : -1,
                       bz >= az ? 1 : -1};
  std::size_t i = 0;
  while (i < crossings.size()) {
    std::size_t j = i;
    while (j + 1 < crossings.size() &&
           crossings[j + 1].t - crossings[i].t < 1e-12)
      ++j;
    if (j > i) {
      // Corner/edge crossing: visit every proper-subset step so the
      // traversal is symmetric in direction.
      const int naxes = static_cast<int>(j - i + 1);
      for (int mask = 1; mask < (1 << naxes) - 1; ++mask) {
        int probe[3] = {cell[0], cell[1], cell[2]};
        for (int bit = 0; bit < naxes; ++bit) {
          if (!(mask & (1 << bit))) continue;
          const int axis = crossings[i + bit].axis;
          probe[axis] += step[axis];
        }
        if (blocked(probe[0], probe[1], probe[2])) return false;
      }
    }
    for (std::size_t k = i; k <= j; ++k)
      cell[crossings[k].axis] += step[crossings[k].axis];
    if (blocked(cell[0], cell[1], cell[2])) return false;
    i = j + 1;
  }
  return true;
}

/// Search workspace: inflated occupancy plus per-cell clearance, collapsed
/// to one layer in planar mode.
struct PlanSpace {
  const world::VoxelGrid* grid = nullptr;
  PlannerMode mode = PlannerMode::Volumetric;
  int nx = 0, ny = 0, nz = 0;
  int z_layer = 0;  // planar: the single working layer index
  std::vector<uint8_t> blocked_cells;
  std::vector<double> clearance_m;
  double max_dist = 0.0;
  double resolution = 0.0;
  Vec3 origin;

  std::size_t flat(int x, int y) const {
    return static_cast<std::size_t>(x) + static_cast<std::size_t>(nx) * y;
  }
  std::size_t flat3(int x, int y, int z) const {
    return static_cast<std::size_t>(x) +
           static_cast<std::size_t>(nx) *
               (static_cast<std::size_t>(y) +
                static_cast<std::size_t>(ny) * static_cast<std::size_t>(z));
  }

  bool blocked(int x, int y, int z) const {
    if (x < 0 || x >= nx || y < 0 || y >= ny) return false;
    if (mode == PlannerMode::Planar)
      return blocked_cells[flat(x, y)] != 0;
    if (z < 0 || z >= nz) return false;
    return blocked_cells[flat3(x, y, z)] != 0;
  }

  double clearance(int x, int y, int z) const {
    if (mode == PlannerMode::Planar) return clearance_m[flat(x, y)];
    return clearance_m[flat3(x, y, z)];
  }
};

PlanSpace make_space(const world::VoxelGrid& grid,
                     const world::DistanceField& dist,
                     const PlannerConfig& cfg) {
  PlanSpace sp;
  sp.grid = &grid;
  sp.mode = cfg.mode;
  sp.nx = grid.dims().x;
  sp.ny = grid.dims().y;
  sp.nz = grid.dims().z;
  sp.max_dist = dist.max_dist();
  sp.resolution = grid.resolution();
  sp.origin = grid.origin();

  if (cfg.mode == PlannerMode::Volumetric) {
    sp.blocked_cells.resize(grid.cell_count());
    sp.clearance_m.resize(grid.cell_count());
    for (int z = 0; z < sp.nz; ++z)
      for (int y = 0; y < sp.ny; ++y)
        for (int x = 0; x < sp.nx; ++x) {
          const CellIndex c{x, y, z};
          const double cl = dist.at(c);
          sp.blocked_cells[sp.flat3(x, y, z)] =
              (grid.occupied(c) || cl < cfg.inflation_radius) ? 1 : 0;
          sp.clearance_m[sp.flat3(x, y, z)] = cl;
        }
    return sp;
  }

  // Planar: collapse occupancy over the z band (or take the single layer),
  // then derive in-plane clearance with a 2D transform.
  int z_lo = 0, z_hi = sp.nz - 1;
  if (sp.nz > 1) {
    z_lo = std::max(
        0, static_cast<int>(std::floor(
               (cfg.planar_band_min - sp.origin.z) / sp.resolution)));
    z_hi = std::min(
        sp.nz - 1, static_cast<int>(std::floor(
                       (cfg.planar_band_max - sp.origin.z) / sp.resolution)));
    if (z_hi < z_lo) z_hi = z_lo;
  }
  world::VoxelGrid flat_grid(sp.resolution, {sp.nx, sp.ny, 1}, sp.origin);
  for (int y = 0; y < sp.ny; ++y)
    for (int x = 0; x < sp.nx; ++x) {
      bool occ = false;
      for (int z = z_lo; z <= z_hi && !occ; ++z)
        occ = grid.occupied({x, y, z});
      if (occ) flat_grid.set_occupied({x, y, 0});
    }
  const auto sq = world::detail::squared_edt_cells(flat_grid);
  sp.blocked_cells.resize(sq.size());
  sp.clearance_m.resize(sq.size());
  for (std::size_t i = 0; i < sq.size(); ++i) {
    const double cl = std::min(std::sqrt(sq[i]) * sp.resolution, sp.max_dist);
    sp.clearance_m[i] = cl;
    sp.blocked_cells[i] =
        (flat_grid.raw()[i] || cl < cfg.inflation_radius) ? 1 : 0;
  }
  sp.z_layer = (z_lo + z_hi) / 2;
  return sp;
}

struct OpenEntry {
  double f;
  double h;
  std::size_t cell;
  double g_at_push;
};

struct OpenOrder {
  bool operator()(const OpenEntry& a, const OpenEntry& b) const {
    if (a.f != b.f) return a.f > b.f;
    if (a.h != b.h) return a.h > b.h;
    return a.cell > b.cell;
  }
};

}  // namespace

bool line_of_sight(const world::VoxelGrid& grid, const Vec3& a, const Vec3& b,
                   double max_dist) {
  if ((b - a).norm() > max_dist) return false;
  const double res = grid.resolution();
  const Vec3 o = grid.origin();
  auto blocked = [&grid](int x, int y, int z) {
    return grid.occupied({x, y, z});
  };
  return segment_free(blocked, (a.x - o.x) / res, (a.y - o.y) / res,
                      (a.z - o.z) / res, (b.x - o.x) / res, (b.y - o.y) / res,
                      (b.z - o.z) / res);
}

double dist_cost(const world::DistanceField& dist, const CellIndex& cell) {
  if (!dist.in_bounds(cell)) throw std::out_of_range("cell out of bounds");
  const double c = dist.max_dist() - dist.at(cell);
  return std::clamp(c, 0.0, dist.max_dist());
}

Path plan(const world::VoxelGrid& grid, const world::DistanceField& dist,
          const Vec3& start, const Vec3& goal, const PlannerConfig& cfg) {
  if (cfg.cost_weight < 0.0 || cfg.cost_weight > 1.0)
    throw std::invalid_argument("cost_weight must be in [0, 1]");
  if (cfg.max_line_of_sight <= 0.0)
    throw std::invalid_argument("max_line_of_sight must be > 0");

  PlanSpace sp = make_space(grid, dist, cfg);
  const bool planar = cfg.mode == PlannerMode::Planar;
  const double res = sp.resolution;

  auto cell_of = [&](const Vec3& p) {
    CellIndex c = grid.cell_of(p);
    if (planar) c.z = sp.z_layer;
    return c;
  };
  auto center_of = [&](const CellIndex& c) {
    Vec3 p = grid.center_of(c);
    if (planar) p.z = start.z;
    return p;
  };
  auto in_bounds = [&](const CellIndex& c) {
    if (c.x < 0 || c.x >= sp.nx || c.y < 0 || c.y >= sp.ny) return false;
    return planar || (c.z >= 0 && c.z < sp.nz);
  };

  const CellIndex start_cell = cell_of(start);
  const CellIndex goal_cell = cell_of(goal);
  if (!in_bounds(start_cell) ||
      sp.blocked(start_cell.x, start_cell.y, start_cell.z))
    throw std::runtime_error("invalid start");
  if (!in_bounds(goal_cell) ||
      sp.blocked(goal_cell.x, goal_cell.y, goal_cell.z))
    throw std::runtime_error("no path found");

  const std::size_t n_cells =
      planar ? static_cast<std::size_t>(sp.nx) * sp.ny : grid.cell_count();
  auto flat = [&](const CellIndex& c) {
    return planar ? sp.flat(c.x, c.y) : sp.flat3(c.x, c.y, c.z);
  };
  auto unflat = [&](std::size_t i) {
    CellIndex c;
    c.x = static_cast<int>(i % sp.nx);
    c.y = static_cast<int>((i / sp.nx) % sp.ny);
    c.z = planar ? sp.z_layer : static_cast<int>(i / (static_cast<std::size_t>(sp.nx) * sp.ny));
    return c;
  };

  std::vector<double> g(n_cells, kInf);
  std::vector<std::size_t> parent(n_cells, n_cells);
  std::vector<uint8_t> closed(n_cells, 0);

  auto heuristic = [&](const CellIndex& c) {
    const Vec3 p = center_of(c);
    const Vec3 q = center_of(goal_cell);
    return (p - q).norm();
  };
  auto euclid = [&](std::size_t ia, std::size_t ib) {
    const Vec3 pa = center_of(unflat(ia));
    const Vec3 pb = center_of(unflat(ib));
    return (pa - pb).norm();
  };
  auto los_cells = [&](std::size_t ia, std::size_t ib) {
    const CellIndex a = unflat(ia), b = unflat(ib);
    if (euclid(ia, ib) > cfg.max_line_of_sight) return false;
    auto blocked = [&sp](int x, int y, int z) { return sp.blocked(x, y, z); };
    // Centers in cell coordinates sit at index + 0.5.
    return segment_free(blocked, a.x + 0.5, a.y + 0.5, a.z + 0.5, b.x + 0.5,
                        b.y + 0.5, b.z + 0.5);
  };
  auto proximity_cost = [&](std::size_t i) {
    const CellIndex c = unflat(i);
    return std::clamp(sp.max_dist - sp.clearance(c.x, c.y, c.z), 0.0,
                      sp.max_dist);
  };
  // A diagonal move is legal only when every proper-subset intermediate
  // cell is free, matching the segment traversal between the two centers.
  auto step_legal = [&](const CellIndex& c, const CellIndex& off) {
    int axes[3], naxes = 0;
    if (off.x != 0) axes[naxes++] = 0;
    if (off.y != 0) axes[naxes++] = 1;
    if (off.z != 0) axes[naxes++] = 2;
    if (naxes < 2) return true;
    const int d[3] = {off.x, off.y, off.z};
    for (int mask = 1; mask < (1 << naxes) - 1; ++mask) {
      int probe[3] = {c.x, c.y, c.z};
      for (int bit = 0; bit < naxes; ++bit)
        if (mask & (1 << bit)) probe[axes[bit]] += d[axes[bit]];
      if (sp.blocked(probe[0], probe[1], probe[2])) return false;
    }
    return true;
  };

  std::priority_queue<OpenEntry, std::vector<OpenEntry>, OpenOrder> open;
  const std::size_t s_start = flat(start_cell);
  const std::size_t s_goal = flat(goal_cell);
  g[s_start] = 0.0;
  parent[s_start] = s_start;
  open.push({heuristic(start_cell), heuristic(start_cell), s_start, 0.0});

  long expanded = 0;
  bool found = false;

  // Neighbor offsets in a fixed order for determinism.
  std::vector<CellIndex> offsets;
  for (int dz = planar ? 0 : -1; dz <= (planar ? 0 : 1); ++dz)
    for (int dy = -1; dy <= 1; ++dy)
      for (int dx = -1; dx <= 1; ++dx) {
        if (dx == 0 && dy == 0 && dz == 0) continue;
        offsets.push_back({dx, dy, dz});
      }

  while (!open.empty()) {
    const OpenEntry top = open.top();
    open.pop();
    const std::size_t s = top.cell;
    if (closed[s] || top.g_at_push != g[s]) continue;
    ++expanded;

    // Lazy vertex repair: the tentative parent link is only now verified.
    if (s != s_start && !los_cells(parent[s], s)) {
      double best_g = kInf;
      std::size_t best_parent = n_cells;
      const CellIndex c = unflat(s);
      for (const auto& off : offsets) {
        const CellIndex nb{c.x + off.x, c.y + off.y, c.z + off.z};
        if (!in_bounds(nb) || sp.blocked(nb.x, nb.y, nb.z)) continue;
        if (!step_legal(c, off)) continue;
        const std::size_t ni = flat(nb);
        if (!closed[ni]) continue;
        const double cand = g[ni] + euclid(ni, s);
        if (cand < best_g || (cand == best_g && ni < best_parent)) {
          best_g = cand;
          best_parent = ni;
        }
      }
      if (best_parent == n_cells) continue;  // unreachable after repair
      parent[s] = best_parent;
      g[s] = best_g;
    }

    if (s == s_goal) {
      found = true;
      break;
    }
    closed[s] = 1;

    const CellIndex c = unflat(s);
    for (const auto& off : offsets) {
      const CellIndex nb{c.x + off.x, c.y + off.y, c.z + off.z};
      if (!in_bounds(nb) || sp.blocked(nb.x, nb.y, nb.z)) continue;
      if (!step_legal(c, off)) continue;
      const std::size_t ni = flat(nb);
      if (closed[ni]) continue;
      const double g_old = g[ni];
      // Path-2 cost through this vertex's parent, with the proximity term.
      const std::size_t par = parent[s];
      const double cand =
          g[par] + euclid(par, ni) + cfg.cost_weight * proximity_cost(ni);
      if (cand < g[ni]) {
        parent[ni] = par;
        g[ni] = cand;
      }
      if (g[ni] < g_old) {
        const double h = heuristic(nb);
        open.push({g[ni] + h, h, ni, g[ni]});
      }
    }
  }

  if (!found) throw std::runtime_error("no path found");

  std::vector<std::size_t> chain;
  for (std::size_t s = s_goal; s != parent[s]; s = parent[s])
    chain.push_back(s);
  chain.push_back(s_start);
  std::reverse(chain.begin(), chain.end());

  Path path;
  path.expanded_nodes = expanded;
  path.waypoints.reserve(chain.size());
  for (const std::size_t s : chain) path.waypoints.push_back(center_of(unflat(s)));
  // Pin the first waypoint to the exact queried start when the exact
  // segment to the next vertex stays free.
  {
    Vec3 s_exact = start;
    if (planar) s_exact.z = start.z;
    bool ok = path.waypoints.size() == 1;
    if (!ok) {
      const Vec3 w1 = path.waypoints[1];
      auto blocked = [&sp](int x, int y, int z) { return sp.blocked(x, y, z); };
      const double sz = planar ? sp.z_layer + 0.5 : (s_exact.z - sp.origin.z) / res;
      const double wz = planar ? sp.z_layer + 0.5 : (w1.z - sp.origin.z) / res;
      ok = (s_exact - w1).norm() <= cfg.max_line_of_sight &&
           segment_free(blocked, (s_exact.x - sp.origin.x) / res,
                        (s_exact.y - sp.origin.y) / res, sz,
                        (w1.x - sp.origin.x) / res,
                        (w1.y - sp.origin.y) / res, wz);
    }
    if (ok) path.waypoints.front() = s_exact;
  }

  double len = 0.0;
  double min_clear = kInf;
  for (std::size_t i = 0; i < path.waypoints.size(); ++i) {
    if (i > 0) {
      len += (path.waypoints[i] - path.waypoints[i - 1]).norm();
      // Final validation of the mutual-visibility contract.
      const CellIndex a = cell_of(path.waypoints[i - 1]);
      const CellIndex b = cell_of(path.waypoints[i]);
      if (!los_cells(flat(a), flat(b))) {
#ifdef FIRENAV_PLAN_DEBUG
        std::fprintf(stderr,
                     "validation fail seg %zu: (%d,%d,%d)->(%d,%d,%d)\n", i,
                     a.x, a.y, a.z, b.x, b.y, b.z);
#endif
        throw std::logic_error("path validation failed");
      }
      // Clearance sampled densely along the segment.
      const double seg = (path.waypoints[i] - path.waypoints[i - 1]).norm();
      const int steps = std::max(1, static_cast<int>(std::ceil(seg / (res / 2))));
      for (int k = 0; k <= steps; ++k) {
        const Vec3 p = path.waypoints[i - 1] +
                       (path.waypoints[i] - path.waypoints[i - 1]) *
                           (static_cast<double>(k) / steps);
        const CellIndex pc = cell_of(p);
        if (in_bounds(pc))
          min_clear = std::min(min_clear, sp.clearance(pc.x, pc.y, pc.z));
      }
    } else {
      const CellIndex pc = cell_of(path.waypoints[i]);
      min_clear = std::min(min_clear, sp.clearance(pc.x, pc.y, pc.z));
    }
  }
  path.length = len;
  path.min_clearance = min_clear;
  return path;
}

}  // namespace firenav::plan
