#pragma once

#include <vector>

#include "firenav/core/rng.hpp"
#include "firenav/fire/thermal_image.hpp"
#include "firenav/sim/types.hpp"
#include "firenav/sim/world.hpp"

namespace firenav::sim {

/// Body-frame pose increments over one interval, as an odometry source
/// reports them (drift and noise included).
struct OdomIncrement {
  double dx = 0.0;
  double dy = 0.0;
  double dz = 0.0;
  double dyaw = 0.0;
};

/// Ray-casts the rig's scan pattern from the robot pose against the world
/// grid. Points are returned in the sensor (body, yaw-aligned) frame;
/// misses are omitted. Deterministic given the rng stream.
std::vector<Vec3> simulate_lidar(const World& world, const Pose& pose,
                                 const LidarConfig& cfg, Rng& rng);

/// GPS fix in the map frame. In outlier mode the reported position drifts
/// at constant velocity along one axis between the scheduled times and then
/// jumps back to the nominal reading.
Vec3 simulate_gps(const Pose& truth, const GpsConfig& cfg, double time,
                  Rng& rng);

/// Body-frame increments between two true poses, with per-axis
/// multiplicative drift and additive Gaussian noise. dt scales yaw drift.
OdomIncrement simulate_odometry(const Pose& prev, const Pose& cur,
                                const OdomConfig& cfg, double dt, Rng& rng);

/// True yaw plus Gaussian noise, wrapped to (-pi, pi].
double simulate_compass(const Pose& truth, double sigma, Rng& rng);

/// Height above ground plus Gaussian noise.
double simulate_altimeter(const Pose& truth, double sigma, Rng& rng);

/// Camera pose of a thermal mount. pan/tilt only applies to PanTilt mounts.
fire::CameraPose thermal_camera_pose(const RobotState& robot,
                                     const ThermalConfig& cfg);

/// Renders the ambient-temperature image with every unoccluded fire inside
/// the field of view drawn as a filled disc at its plate temperature.
fire::ThermalImage simulate_thermal(const World& world,
                                    const fire::CameraPose& camera,
                                    const ThermalConfig& cfg, double time);

fire::CameraIntrinsics thermal_intrinsics(const ThermalConfig& cfg);

}  // namespace firenav::sim
