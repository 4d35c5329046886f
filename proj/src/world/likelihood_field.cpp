#include "firenav/world/likelihood_field.hpp"

#include <cmath>
#include <stdexcept>

#include "edt.hpp"

namespace firenav::world {

LikelihoodField LikelihoodField::build(const VoxelGrid& grid, double sigma,
                                       double truncation_radius) {
  if (sigma <= 0.0) throw std::invalid_argument("sigma must be > 0");
  if (truncation_radius < sigma)
    throw std::invalid_argument("truncation_radius must be >= sigma");

  LikelihoodField field;
  field.resolution_ = grid.resolution();
  field.dims_ = grid.dims();
  field.origin_ = grid.origin();
  field.sigma_ = sigma;
  field.truncation_radius_ = truncation_radius;
  constexpr double kSqrt2Pi = 2.50662827463100050242;
  field.peak_ = 1.0 / (kSqrt2Pi * sigma);

  const auto sq = detail::squared_edt_cells(grid);
  field.values_.resize(sq.size());
  const double res = grid.resolution();
  const double trunc_sq_cells =
      (truncation_radius / res) * (truncation_radius / res);
  const double inv_two_sigma_sq = 1.0 / (2.0 * sigma * sigma);
  for (std::size_t i = 0; i < sq.size(); ++i) {
    if (sq[i] > trunc_sq_cells) {
      field.values_[i] = 0.0;
    } else {
      const double d = std::sqrt(sq[i]) * res;
      field.values_[i] = field.peak_ * std::exp(-d * d * inv_two_sigma_sq);
    }
  }
  return field;
}

}  // namespace firenav::world
