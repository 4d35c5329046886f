#pragma once

#include <cstddef>
#include <limits>
#include <vector>

#include "firenav/world/voxel_grid.hpp"

namespace firenav::world::detail {

// Felzenszwalb & Huttenlocher 1D squared distance transform: lower envelope
// of parabolas rooted at (i, f[i]).
inline void edt_1d(const std::vector<double>& f, std::vector<double>& d) {
  const int n = static_cast<int>(f.size());
  d.assign(n, 0.0);
  std::vector<int> v(n, 0);
  std::vector<double> z(n + 1, 0.0);
  constexpr double kInf = std::numeric_limits<double>::infinity();
  int k = 0;
  v[0] = 0;
  z[0] = -kInf;
  z[1] = kInf;
  for (int q = 1; q < n; ++q) {
    double s;
    while (true) {
      const int p = v[k];
      s = ((f[q] + q * q) - (f[p] + p * p)) / (2.0 * q - 2.0 * p);
      if (s <= z[k]) {
        --k;
      } else {
        break;
      }
    }
    ++k;
    v[k] = q;
    z[k] = s;
    z[k + 1] = kInf;
  }
  k = 0;
  for (int q = 0; q < n; ++q) {
    while (z[k + 1] < q) ++k;
    const int p = v[k];
    d[q] = (q - p) * (double)(q - p) + f[p];
  }
}

/// Large finite stand-in for "no obstacle"; a true infinity would produce
/// NaN in the envelope intersections above.
constexpr double kEdtNoObstacle = 1e20;

/// Exact squared Euclidean distance (in cell units) to the nearest occupied
/// cell, for every cell of the grid. Values >= kEdtNoObstacle/2 mean the grid
/// has no occupied cell at all.
inline std::vector<double> squared_edt_cells(const VoxelGrid& grid) {
  const auto& dims = grid.dims();
  const std::size_t nx = dims.x, ny = dims.y, nz = dims.z;
  std::vector<double> dist(nx * ny * nz, kEdtNoObstacle);
  for (std::size_t i = 0; i < dist.size(); ++i)
    if (grid.raw()[i]) dist[i] = 0.0;

  auto idx = [nx, ny](std::size_t x, std::size_t y, std::size_t z) {
    return x + nx * (y + ny * z);
  };

  std::vector<double> line, out;
  // Pass along x.
  line.resize(nx);
  for (std::size_t z = 0; z < nz; ++z)
    for (std::size_t y = 0; y < ny; ++y) {
      for (std::size_t x = 0; x < nx; ++x) line[x] = dist[idx(x, y, z)];
      edt_1d(line, out);
      for (std::size_t x = 0; x < nx; ++x) dist[idx(x, y, z)] = out[x];
    }
  // Pass along y.
  line.resize(ny);
  for (std::size_t z = 0; z < nz; ++z)
    for (std::size_t x = 0; x < nx; ++x) {
      for (std::size_t y = 0; y < ny; ++y) line[y] = dist[idx(x, y, z)];
      edt_1d(line, out);
      for (std::size_t y = 0; y < ny; ++y) dist[idx(x, y, z)] = out[y];
    }
  // Pass along z.
  line.resize(nz);
  for (std::size_t y = 0; y < ny; ++y)
    for (std::size_t x = 0; x < nx; ++x) {
      for (std::size_t z = 0; z < nz; ++z) line[z] = dist[idx(x, y, z)];
      edt_1d(line, out);
      for (std::size_t z = 0; z < nz; ++z) dist[idx(x, y, z)] = out[z];
    }
  return dist;
}

}  // namespace firenav::world::detail
