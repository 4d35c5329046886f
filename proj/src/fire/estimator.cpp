#include "firenav/fire/estimator.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

namespace firenav::fire {

RangeEstimate estimate_range(const FireDetection2D& det,
                             const ThermalImage& img,
                             std::span<const Vec3> cloud_map,
                             const world::VoxelGrid& grid,
                             const RangeConfig& cfg) {
  RangeEstimate est;

  // LIDAR association: points projecting into the dilated blob box.
  std::vector<double> ranges;
  const double u0 = det.u_min - cfg.bbox_dilation_px;
  const double u1 = det.u_max + cfg.bbox_dilation_px;
  const double v0 = det.v_min - cfg.bbox_dilation_px;
  const double v1 = det.v_max + cfg.bbox_dilation_px;
  for (const auto& p : cloud_map) {
    const Vec3 d = p - img.pose.position;
    const double depth = d.dot(img.pose.forward);
    if (depth < 0.05) continue;
    const double u = img.intrinsics.cx + img.intrinsics.fx * d.dot(img.pose.right) / depth;
    const double v = img.intrinsics.cy + img.intrinsics.fy * d.dot(img.pose.down) / depth;
    if (u < u0 || u > u1 || v < v0 || v > v1) continue;
    ranges.push_back(d.norm());
  }
  if (!ranges.empty()) {
    // Median is robust to edge pixels straddling the blob boundary.
    std::sort(ranges.begin(), ranges.end());
    est.range = ranges[ranges.size() / 2];
    est.sigma_ray_frac = cfg.lidar_sigma_frac;
    est.sigma_lateral_frac = cfg.lateral_sigma_frac;
    est.source = RangeEstimate::Source::Lidar;
    return est;
  }

  const Vec3 ray = img.pixel_ray(det.u, det.v);

  if (cfg.nadir) {
    // Ground fires seen from above: intersect the pixel ray with the
    // ground plane.
    if (ray.z < -1e-6) {
      const double t = (cfg.ground_height - img.pose.position.z) / ray.z;
      if (t > 0.0) {
        est.range = t;
        est.sigma_ray_frac = cfg.nadir_sigma_frac;
        est.sigma_lateral_frac = cfg.lateral_sigma_frac;
        est.source = RangeEstimate::Source::NadirHeight;
        return est;
      }
    }
  }

  // Fallback: the farthest surface the map allows along the ray.
  const auto hit = world::raycast(grid, img.pose.position, ray, 200.0);
  if (hit && *hit > 0.0) {
    est.range = *hit;
    est.sigma_ray_frac = cfg.map_sigma_frac;
    est.sigma_lateral_frac = cfg.lateral_sigma_frac;
    est.source = RangeEstimate::Source::MapRaycast;
    return est;
  }

  throw std::runtime_error("range unavailable");
}

Measurement3D back_project(const FireDetection2D& det, const ThermalImage& img,
                           const RangeEstimate& range) {
  if (range.range <= 0.0) throw std::invalid_argument("range must be > 0");
  const Vec3 ray = img.pixel_ray(det.u, det.v);
  Measurement3D m;
  m.position = img.pose.position + ray * range.range;

  // Covariance elongated along the ray; sigmas grow linearly with range so
  // doubling the range quadruples the variances.
  const double s_ray = std::max(1e-3, range.sigma_ray_frac * range.range);
  const double s_lat = std::max(1e-3, range.sigma_lateral_frac * range.range);

  Eigen::Vector3d er(ray.x, ray.y, ray.z);
  er.normalize();
  Eigen::Vector3d up(0.0, 0.0, 1.0);
  Eigen::Vector3d e1 = er.cross(up);
  if (e1.norm() < 1e-6) e1 = er.cross(Eigen::Vector3d(1.0, 0.0, 0.0));
  e1.normalize();
  const Eigen::Vector3d e2 = er.cross(e1).normalized();

  Eigen::Matrix3d basis;
  basis.col(0) = er;
  basis.col(1) = e1;
  basis.col(2) = e2;
  Eigen::Matrix3d diag = Eigen::Matrix3d::Zero();
  diag(0, 0) = s_ray * s_ray;
  diag(1, 1) = s_lat * s_lat;
  diag(2, 2) = s_lat * s_lat;
  m.covariance = basis * diag * basis.transpose();
  return m;
}

FireEstimate3D::FireEstimate3D()
    : omega_(Eigen::Matrix3d::Zero()), xi_(Eigen::Vector3d::Zero()) {}

void FireEstimate3D::fuse(const Vec3& z, const Eigen::Matrix3d& R) {
  Eigen::FullPivLU<Eigen::Matrix3d> lu(R);
  if (!lu.isInvertible()) throw std::runtime_error("degenerate measurement");
  const Eigen::Matrix3d r_inv = lu.inverse();
  omega_ += r_inv;
  xi_ += r_inv * Eigen::Vector3d(z.x, z.y, z.z);
  ++count_;
}

Vec3 FireEstimate3D::mean() const {
  if (count_ == 0) throw std::logic_error("no measurements fused");
  const Eigen::Vector3d mu = omega_.ldlt().solve(xi_);
  return {mu.x(), mu.y(), mu.z()};
}

Eigen::Matrix3d FireEstimate3D::covariance() const {
  if (count_ == 0) throw std::logic_error("no measurements fused");
  return omega_.inverse();
}

double FireEstimate3D::covariance_trace() const {
  return covariance().trace();
}

bool confirmed(const FireEstimate3D& est, const ConfirmConfig& cfg) {
  if (!est.valid()) return false;
  return est.count() >= cfg.min_measurements ||
         est.covariance_trace() < cfg.covariance_trace_limit;
}

}  // namespace firenav::fire
