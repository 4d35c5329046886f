#include "firenav/world/voxel_grid.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace firenav::world {

VoxelGrid::VoxelGrid(double resolution, CellIndex dims, Vec3 origin)
    : resolution_(resolution), dims_(dims), origin_(origin) {
  if (resolution <= 0.0) throw std::invalid_argument("resolution must be > 0");
  if (dims.x <= 0 || dims.y <= 0 || dims.z <= 0)
    throw std::invalid_argument("grid dims must be > 0");
  occ_.assign(static_cast<std::size_t>(dims.x) * dims.y * dims.z, 0);
}

VoxelGrid VoxelGrid::build(const PointMap& map, double resolution) {
  if (resolution <= 0.0) throw std::invalid_argument("resolution must be > 0");
  const Aabb& b = map.bounds();
  const Vec3 origin{b.min.x - resolution, b.min.y - resolution,
                    b.min.z - resolution};
  auto span_cells = [resolution](double lo, double hi) {
    return static_cast<int>(std::ceil((hi - lo) / resolution)) + 2;
  };
  CellIndex dims{span_cells(b.min.x, b.max.x), span_cells(b.min.y, b.max.y),
                 span_cells(b.min.z, b.max.z)};
  // A point sitting exactly on the upper bound must still land inside.
  VoxelGrid grid(resolution, dims, origin);
  for (const auto& p : map.points()) {
    const CellIndex c = grid.cell_of(p);
    if (!grid.in_bounds(c)) throw std::logic_error("map point outside grid");
    grid.occ_[grid.flat(c)] = 1;
  }
  return grid;
}

void VoxelGrid::set_occupied(const CellIndex& c, bool value) {
  if (!in_bounds(c)) throw std::out_of_range("cell index out of bounds");
  occ_[flat(c)] = value ? 1 : 0;
}

std::size_t VoxelGrid::occupied_count() const {
  return static_cast<std::size_t>(
      std::count(occ_.begin(), occ_.end(), uint8_t{1}));
}

}  // namespace firenav::world
