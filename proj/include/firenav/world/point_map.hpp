#pragma once

#include <string>
#include <vector>

#include "firenav/core/geometry.hpp"

namespace firenav::world {

/// Static 3D point map of the environment, map frame, meters.
class PointMap {
 public:
  /// Throws std::invalid_argument("empty map") when no points are given.
  explicit PointMap(std::vector<Vec3> points);

  /// Loads an ASCII map: one "x y z" triple per line, '#' starts a comment.
  static PointMap load(const std::string& path);
  void save(const std::string& path) const;

  const std::vector<Vec3>& points() const { return points_; }
  const Aabb& bounds() const { return bounds_; }
  std::size_t size() const { return points_.size(); }

 private:
  std::vector<Vec3> points_;
  Aabb bounds_;
};

}  // namespace firenav::world
