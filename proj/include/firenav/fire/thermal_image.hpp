#pragma once

#include <vector>

#include "firenav/core/geometry.hpp"

namespace firenav::fire {

/// Right/down/forward orthonormal basis of a camera in the map frame.
/// Image u grows along `right`, v along `down`, depth along `forward`.
struct CameraPose {
  Vec3 position;
  Vec3 right{0, -1, 0};
  Vec3 down{0, 0, -1};
  Vec3 forward{1, 0, 0};
};

struct CameraIntrinsics {
  double fx = 0.0;
  double fy = 0.0;
  double cx = 0.0;
  double cy = 0.0;
};

/// Temperature image in degrees Celsius, clamped to the camera range.
struct ThermalImage {
  int width = 0;
  int height = 0;
  std::vector<double> values;  // row-major, height * width
  CameraIntrinsics intrinsics;
  CameraPose pose;
  double timestamp = 0.0;

  double at(int u, int v) const { return values[v * width + u]; }
  double& at(int u, int v) { return values[v * width + u]; }

  /// Unit map-frame direction of the ray through pixel (u, v).
  Vec3 pixel_ray(double u, double v) const {
    const Vec3 d = pose.right * ((u - intrinsics.cx) / intrinsics.fx) +
                   pose.down * ((v - intrinsics.cy) / intrinsics.fy) +
                   pose.forward;
    return d.normalized();
  }
};

}  // namespace firenav::fire
