#pragma once

#include <vector>

#include "firenav/world/voxel_grid.hpp"

namespace firenav::world {

/// Precomputed map-match probability density per cell: a Gaussian of the
/// distance to the nearest occupied cell center, truncated to zero beyond
/// truncation_radius. Immutable once built; safe for concurrent reads.
class LikelihoodField {
 public:
  /// Requires sigma > 0 and truncation_radius >= sigma.
  static LikelihoodField build(const VoxelGrid& grid, double sigma,
                               double truncation_radius);

  double resolution() const { return resolution_; }
  const CellIndex& dims() const { return dims_; }
  const Vec3& origin() const { return origin_; }
  double sigma() const { return sigma_; }
  double truncation_radius() const { return truncation_radius_; }

  /// Peak density 1 / (sqrt(2*pi) * sigma), taken at zero distance.
  double peak() const { return peak_; }

  /// Density of the cell containing p; 0 outside the field bounds.
  double query(const Vec3& p) const {
    const int cx = static_cast<int>(std::floor((p.x - origin_.x) / resolution_));
    const int cy = static_cast<int>(std::floor((p.y - origin_.y) / resolution_));
    const int cz = static_cast<int>(std::floor((p.z - origin_.z) / resolution_));
    if (cx < 0 || cx >= dims_.x || cy < 0 || cy >= dims_.y || cz < 0 ||
        cz >= dims_.z)
      return 0.0;
    return values_[static_cast<std::size_t>(cx) +
                   static_cast<std::size_t>(dims_.x) *
                       (static_cast<std::size_t>(cy) +
                        static_cast<std::size_t>(dims_.y) *
                            static_cast<std::size_t>(cz))];
  }

  double at(const CellIndex& c) const {
    return values_[static_cast<std::size_t>(c.x) +
                   static_cast<std::size_t>(dims_.x) *
                       (static_cast<std::size_t>(c.y) +
                        static_cast<std::size_t>(dims_.y) *
                            static_cast<std::size_t>(c.z))];
  }

  const std::vector<double>& raw() const { return values_; }

 private:
  LikelihoodField() = default;

  double resolution_ = 0.0;
  CellIndex dims_;
  Vec3 origin_;
  double sigma_ = 0.0;
  double truncation_radius_ = 0.0;
  double peak_ = 0.0;
  std::vector<double> values_;
};

}  // namespace firenav::world
