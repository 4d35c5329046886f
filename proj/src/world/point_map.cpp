#include "firenav/world/point_map.hpp"

#include <fstream>
#include <sstream>
#include <stdexcept>

namespace firenav::world {

PointMap::PointMap(std::vector<Vec3> points) : points_(std::move(points)) {
  if (points_.empty()) throw std::invalid_argument("empty map");
  bounds_.min = bounds_.max = points_.front();
  for (const auto& p : points_) {
    bounds_.min.x = std::min(bounds_.min.x, p.x);
    bounds_.min.y = std::min(bounds_.min.y, p.y);
    bounds_.min.z = std::min(bounds_.min.z, p.z);
    bounds_.max.x = std::max(bounds_.max.x, p.x);
    bounds_.max.y = std::max(bounds_.max.y, p.y);
    bounds_.max.z = std::max(bounds_.max.z, p.z);
  }
}

PointMap PointMap::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open map file: " + path);
  std::vector<Vec3> pts;
  std::string line;
  while (std::getline(in, line)) {
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    std::istringstream ss(line);
    Vec3 p;
    if (ss >> p.x >> p.y >> p.z) pts.push_back(p);
  }
  return PointMap(std::move(pts));
}

void PointMap::save(const std::string& path) const {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write map file: " + path);
  out << "# x y z (meters, map frame)\n";
  char buf[96];
  for (const auto& p : points_) {
    std::snprintf(buf, sizeof(buf), "%.4f %.4f %.4f\n", p.x, p.y, p.z);
    out << buf;
  }
}

}  // namespace firenav::world
