#pragma once

#include <vector>

#include "firenav/world/voxel_grid.hpp"

namespace firenav::world {

/// Per-cell Euclidean distance (meters) to the nearest occupied cell center,
/// clamped to max_dist. Exact transform over cell centers, 1-Lipschitz.
class DistanceField {
 public:
  static DistanceField build(const VoxelGrid& grid, double max_dist);

  double resolution() const { return resolution_; }
  const CellIndex& dims() const { return dims_; }
  const Vec3& origin() const { return origin_; }
  double max_dist() const { return max_dist_; }

  bool in_bounds(const CellIndex& c) const {
    return c.x >= 0 && c.x < dims_.x && c.y >= 0 && c.y < dims_.y && c.z >= 0 &&
           c.z < dims_.z;
  }

  double at(const CellIndex& c) const { return dist_[flat(c)]; }

  /// Clearance at a map-frame point; out-of-bounds reads as max_dist.
  double at_point(const Vec3& p) const {
    const CellIndex c{
        static_cast<int>(std::floor((p.x - origin_.x) / resolution_)),
        static_cast<int>(std::floor((p.y - origin_.y) / resolution_)),
        static_cast<int>(std::floor((p.z - origin_.z) / resolution_))};
    return in_bounds(c) ? dist_[flat(c)] : max_dist_;
  }

  const std::vector<double>& raw() const { return dist_; }

 private:
  DistanceField() = default;

  std::size_t flat(const CellIndex& c) const {
    return static_cast<std::size_t>(c.x) +
           static_cast<std::size_t>(dims_.x) *
               (static_cast<std::size_t>(c.y) +
                static_cast<std::size_t>(dims_.y) *
                    static_cast<std::size_t>(c.z));
  }

  double resolution_ = 0.0;
  CellIndex dims_;
  Vec3 origin_;
  double max_dist_ = 0.0;
  std::vector<double> dist_;
};

}  // namespace firenav::world
