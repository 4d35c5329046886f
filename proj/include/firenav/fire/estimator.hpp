#pragma once

#include <Eigen/Dense>
#include <optional>
#include <span>

#include "firenav/fire/detect.hpp"
#include "firenav/fire/thermal_image.hpp"
#include "firenav/world/raycast.hpp"
#include "firenav/world/voxel_grid.hpp"

namespace firenav::fire {

struct RangeEstimate {
  double range = 0.0;  // meters along the pixel ray
  // Fractional (per meter of range) uncertainties; back_project turns them
  // into absolute sigmas by multiplying with the range, so the variance
  // scales with range^2.
  double sigma_ray_frac = 0.0;
  double sigma_lateral_frac = 0.0;
  enum class Source { Lidar, NadirHeight, MapRaycast } source = Source::Lidar;
};

struct RangeConfig {
  int bbox_dilation_px = 2;
  double lidar_sigma_frac = 0.03;
  double nadir_sigma_frac = 0.05;
  double map_sigma_frac = 0.3;  // fallback route, large uncertainty
  double lateral_sigma_frac = 0.02;
  double ground_height = 0.0;
  bool nadir = false;
};

/// Range to a detected blob. LIDAR points (map frame) projecting inside the
/// dilated blob bounding box vote with their median range; a nadir camera
/// over a ground fire uses the height above ground; otherwise the static
/// map is ray-cast along the centroid ray with a large uncertainty.
///
/// Throws std::runtime_error("range unavailable") when no route applies.
RangeEstimate estimate_range(const FireDetection2D& det,
                             const ThermalImage& img,
                             std::span<const Vec3> cloud_map,
                             const world::VoxelGrid& grid,
                             const RangeConfig& cfg);

/// Back-projects the blob centroid at the given range into the map frame,
/// with a covariance elongated along the ray (variance scaling with
/// range^2) per the RangeEstimate sigmas.
struct Measurement3D {
  Vec3 position;
  Eigen::Matrix3d covariance;
};
Measurement3D back_project(const FireDetection2D& det, const ThermalImage& img,
                           const RangeEstimate& range);

/// Information-filter state for one tracked fire: Omega (information
/// matrix) and xi (information vector); fusion is additive, so any
/// permutation of the same measurements yields the same state.
class FireEstimate3D {
 public:
  FireEstimate3D();

  /// Omega += R^-1, xi += R^-1 z. Throws std::runtime_error("degenerate
  /// measurement") when R is singular.
  void fuse(const Vec3& z, const Eigen::Matrix3d& R);

  int count() const { return count_; }
  bool valid() const { return count_ > 0; }
  Vec3 mean() const;
  Eigen::Matrix3d covariance() const;
  double covariance_trace() const;

  const Eigen::Matrix3d& information_matrix() const { return omega_; }
  const Eigen::Vector3d& information_vector() const { return xi_; }

 private:
  Eigen::Matrix3d omega_;
  Eigen::Vector3d xi_;
  int count_ = 0;
};

struct ConfirmConfig {
  double covariance_trace_limit = 1.0;  // m^2
  int min_measurements = 3;
};

/// A track is confirmed once its covariance trace drops under the limit or
/// enough measurements are fused, whichever happens first.
bool confirmed(const FireEstimate3D& est, const ConfirmConfig& cfg);

}  // namespace firenav::fire
