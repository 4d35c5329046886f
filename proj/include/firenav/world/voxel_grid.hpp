#pragma once

#include <cstdint>
#include <vector>

#include "firenav/core/geometry.hpp"
#include "firenav/world/point_map.hpp"

namespace firenav::world {

struct CellIndex {
  int x = 0;
  int y = 0;
  int z = 0;

  bool operator==(const CellIndex& o) const {
    return x == o.x && y == o.y && z == o.z;
  }
};

/// Boolean occupancy over a regular voxel lattice. Cell (0,0,0) has its
/// minimum corner at `origin`; cell centers sit at origin + (i + 0.5) * res.
class VoxelGrid {
 public:
  VoxelGrid(double resolution, CellIndex dims, Vec3 origin);

  /// A cell is occupied iff at least one map point falls inside it. The grid
  /// covers the map bounds plus one cell of padding on every side.
  static VoxelGrid build(const PointMap& map, double resolution);

  double resolution() const { return resolution_; }
  const CellIndex& dims() const { return dims_; }
  const Vec3& origin() const { return origin_; }
  std::size_t cell_count() const { return occ_.size(); }

  bool in_bounds(const CellIndex& c) const {
    return c.x >= 0 && c.x < dims_.x && c.y >= 0 && c.y < dims_.y && c.z >= 0 &&
           c.z < dims_.z;
  }

  /// Out-of-bounds cells read as free.
  bool occupied(const CellIndex& c) const {
    return in_bounds(c) && occ_[flat(c)] != 0;
  }
  bool occupied_at(const Vec3& p) const { return occupied(cell_of(p)); }

  void set_occupied(const CellIndex& c, bool value = true);

  CellIndex cell_of(const Vec3& p) const {
    return {static_cast<int>(std::floor((p.x - origin_.x) / resolution_)),
            static_cast<int>(std::floor((p.y - origin_.y) / resolution_)),
            static_cast<int>(std::floor((p.z - origin_.z) / resolution_))};
  }

  Vec3 center_of(const CellIndex& c) const {
    return {origin_.x + (c.x + 0.5) * resolution_,
            origin_.y + (c.y + 0.5) * resolution_,
            origin_.z + (c.z + 0.5) * resolution_};
  }

  std::size_t flat(const CellIndex& c) const {
    return static_cast<std::size_t>(c.x) +
           static_cast<std::size_t>(dims_.x) *
               (static_cast<std::size_t>(c.y) +
                static_cast<std::size_t>(dims_.y) *
                    static_cast<std::size_t>(c.z));
  }

  std::size_t occupied_count() const;

  const std::vector<uint8_t>& raw() const { return occ_; }

 private:
  double resolution_;
  CellIndex dims_;
  Vec3 origin_;
  std::vector<uint8_t> occ_;
};

}  // namespace firenav::world
