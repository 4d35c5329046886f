#pragma once

#include <optional>

#include "firenav/world/voxel_grid.hpp"

namespace firenav::world {

/// Distance along a unit ray to the first occupied cell boundary, or
/// nullopt when nothing is hit within max_range. Rays starting inside an
/// occupied cell report 0.
std::optional<double> raycast(const VoxelGrid& grid, const Vec3& origin,
                              const Vec3& dir, double max_range);

}  // namespace firenav::world
