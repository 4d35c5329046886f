#include "firenav/world/distance_field.hpp"

#include <cmath>
#include <stdexcept>

#include "edt.hpp"

namespace firenav::world {

DistanceField DistanceField::build(const VoxelGrid& grid, double max_dist) {
  if (max_dist <= 0.0) throw std::invalid_argument("max_dist must be > 0");
  DistanceField field;
  field.resolution_ = grid.resolution();
  field.dims_ = grid.dims();
  field.origin_ = grid.origin();
  field.max_dist_ = max_dist;

  const auto sq = detail::squared_edt_cells(grid);
  field.dist_.resize(sq.size());
  const double res = grid.resolution();
  for (std::size_t i = 0; i < sq.size(); ++i) {
    const double d = std::sqrt(sq[i]) * res;
    field.dist_[i] = std::min(d, max_dist);
  }
  return field;
}

}  // namespace firenav::world
