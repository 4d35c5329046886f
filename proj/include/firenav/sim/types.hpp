#pragma once

#include <optional>
#include <string>
#include <vector>

#include "firenav/core/geometry.hpp"

namespace firenav::sim {

enum class RobotKind { Ugv, Uav };

enum class BlanketState { Stowed, Unrolled, Dropped, Absent };

enum class FireKind { IndoorFloor, Facade, OutdoorGround };

enum class ThermalMount { Forward, Nadir, PanTilt };

struct LidarConfig {
  int channels = 8;
  int rays_per_channel = 120;
  double vertical_fov = 0.4;  // rad, total span
  double min_range = 0.2;
  double max_range = 120.0;
  double range_noise = 0.02;  // meters, std dev
  double rate = 10.0;         // Hz
};

enum class GpsMode { Nominal, Outlier };

struct GpsOutlierSchedule {
  int axis = 1;  // 0 = x, 1 = y
  double velocity = 0.033;  // m/s constant drift
  double start_time = 0.0;
  double end_time = 0.0;  // offset jumps back to truth at end_time
};

struct GpsConfig {
  double xy_noise = 0.5;
  double z_noise = 1.0;
  GpsMode mode = GpsMode::Nominal;
  GpsOutlierSchedule outlier;
  double rate = 5.0;
};

struct OdomConfig {
  // Multiplicative drift per body axis (1.0 = drift-free).
  double drift_x = 1.0;
  double drift_y = 1.0;
  double drift_z = 1.0;
  double drift_yaw_rate = 0.0;  // additive rad per second
  double noise_xyz = 0.0;       // additive, std dev per increment
  double noise_yaw = 0.0;
};

struct ThermalConfig {
  int width = 80;
  int height = 60;
  double hfov = 1.0;  // rad
  ThermalMount mount = ThermalMount::Forward;
  double min_temp = -40.0;
  double max_temp = 330.0;
  double ambient = 25.0;
  double rate = 10.0;
};

struct SensorRig {
  LidarConfig lidar;
  GpsConfig gps;
  OdomConfig odom;
  double compass_noise = 0.005;
  double altimeter_noise = 0.05;
  ThermalConfig thermal;          // primary camera
  std::optional<ThermalConfig> thermal_nadir;  // second camera (M600 style)
};

struct PanTiltState {
  double pan = 0.0;
  double tilt = 0.0;
};

enum class BlanketOp { Unroll, Drop };

/// Per-step actuation command for one robot. Velocities are body frame.
struct RobotCommand {
  Vec3 velocity;          // vx forward, vy left, vz up
  double yaw_rate = 0.0;
  double pan_rate = 0.0;   // UGV pan&tilt unit
  double tilt_rate = 0.0;
  bool eject_water = false;
  std::optional<BlanketOp> blanket_op;
};

struct RobotState {
  std::string id;
  RobotKind kind = RobotKind::Ugv;
  Pose pose;  // ground truth
  Vec3 velocity_cmd;
  double yaw_rate_cmd = 0.0;
  double water_remaining = 3.0;
  double tank_capacity = 3.0;
  double water_dispensed = 0.0;
  BlanketState blanket = BlanketState::Absent;
  PanTiltState pan_tilt;
  SensorRig rig;
  int collisions = 0;
  double distance_traveled = 0.0;
};

struct FireSource {
  std::string id;
  Vec3 position;
  FireKind kind = FireKind::OutdoorGround;
  double radius = 0.25;             // target disc radius
  double plate_temperature = 110.0;  // degC, <= 110
  double water_received = 0.0;       // liters on target
  double blanket_coverage = 0.0;     // [0, 1]
  double facing_yaw = 0.0;  // disc normal heading for vertical plates

  /// Unit normal of the target disc.
  Vec3 normal() const {
    if (kind == FireKind::OutdoorGround) return {0.0, 0.0, 1.0};
    return {std::cos(facing_yaw), std::sin(facing_yaw), 0.0};
  }
};

}  // namespace firenav::sim
