#include "firenav/sim/sensors.hpp"

#include <cmath>

#include "firenav/world/raycast.hpp"

namespace firenav::sim {

namespace {
constexpr double kPi = 3.14159265358979323846;
constexpr double kLidarMountHeight = 0.45;
constexpr double kPanTiltCameraHeight = 0.55;
constexpr double kNadirCameraDrop = -0.15;
}  // namespace

std::vector<Vec3> simulate_lidar(const World& world, const Pose& pose,
                                 const LidarConfig& cfg, Rng& rng) {
  std::vector<Vec3> cloud;
  cloud.reserve(static_cast<std::size_t>(cfg.channels) * cfg.rays_per_channel);
  const Vec3 mount{0.0, 0.0, kLidarMountHeight};
  const Vec3 origin = body_to_map(pose, mount);
  const double c = std::cos(pose.yaw), s = std::sin(pose.yaw);

  for (int ch = 0; ch < cfg.channels; ++ch) {
    const double el =
        cfg.channels > 1
            ? -cfg.vertical_fov / 2.0 +
                  cfg.vertical_fov * ch / (cfg.channels - 1)
            : 0.0;
    const double ce = std::cos(el), se = std::sin(el);
    for (int i = 0; i < cfg.rays_per_channel; ++i) {
      const double az = 2.0 * kPi * i / cfg.rays_per_channel;
      const Vec3 dir_body{ce * std::cos(az), ce * std::sin(az), se};
      const Vec3 dir_map{dir_body.x * c - dir_body.y * s,
                         dir_body.x * s + dir_body.y * c, dir_body.z};
      const auto hit =
          world::raycast(world.grid(), origin, dir_map, cfg.max_range);
      if (!hit) continue;
      const double r = *hit + rng.gaussian(0.0, cfg.range_noise);
      if (r < cfg.min_range || r > cfg.max_range) continue;
      cloud.push_back(mount + dir_body * r);
    }
  }
  return cloud;
}

Vec3 simulate_gps(const Pose& truth, const GpsConfig& cfg, double time,
                  Rng& rng) {
  Vec3 fix{truth.position.x + rng.gaussian(0.0, cfg.xy_noise),
           truth.position.y + rng.gaussian(0.0, cfg.xy_noise),
           truth.position.z + rng.gaussian(0.0, cfg.z_noise)};
  if (cfg.mode == GpsMode::Outlier && time >= cfg.outlier.start_time &&
      time < cfg.outlier.end_time) {
    const double offset =
        cfg.outlier.velocity * (time - cfg.outlier.start_time);
    if (cfg.outlier.axis == 0)
      fix.x += offset;
    else
      fix.y += offset;
  }
  return fix;
}

OdomIncrement simulate_odometry(const Pose& prev, const Pose& cur,
                                const OdomConfig& cfg, double dt, Rng& rng) {
  const Vec3 body = map_to_body(prev, cur.position);
  OdomIncrement inc;
  inc.dx = body.x * cfg.drift_x + rng.gaussian(0.0, cfg.noise_xyz);
  inc.dy = body.y * cfg.drift_y + rng.gaussian(0.0, cfg.noise_xyz);
  inc.dz = body.z * cfg.drift_z + rng.gaussian(0.0, cfg.noise_xyz);
  inc.dyaw = wrap_angle(cur.yaw - prev.yaw) + cfg.drift_yaw_rate * dt +
             rng.gaussian(0.0, cfg.noise_yaw);
  return inc;
}

double simulate_compass(const Pose& truth, double sigma, Rng& rng) {
  return wrap_angle(truth.yaw + rng.gaussian(0.0, sigma));
}

double simulate_altimeter(const Pose& truth, double sigma, Rng& rng) {
  return truth.position.z + rng.gaussian(0.0, sigma);
}

fire::CameraIntrinsics thermal_intrinsics(const ThermalConfig& cfg) {
  fire::CameraIntrinsics k;
  k.fx = (cfg.width / 2.0) / std::tan(cfg.hfov / 2.0);
  k.fy = k.fx;
  k.cx = (cfg.width - 1) / 2.0;
  k.cy = (cfg.height - 1) / 2.0;
  return k;
}

fire::CameraPose thermal_camera_pose(const RobotState& robot,
                                     const ThermalConfig& cfg) {
  fire::CameraPose cam;
  const Pose& pose = robot.pose;
  switch (cfg.mount) {
    case ThermalMount::Forward: {
      cam.forward = direction_from_yaw_pitch(pose.yaw, 0.0);
      cam.right = {std::sin(pose.yaw), -std::cos(pose.yaw), 0.0};
      cam.down = cam.forward.cross(cam.right).normalized();
      cam.position = pose.position + Vec3{0.0, 0.0, 0.0};
      break;
    }
    case ThermalMount::Nadir: {
      cam.forward = {0.0, 0.0, -1.0};
      cam.right = {std::sin(pose.yaw), -std::cos(pose.yaw), 0.0};
      cam.down = cam.forward.cross(cam.right).normalized();
      cam.position = pose.position + Vec3{0.0, 0.0, kNadirCameraDrop};
      break;
    }
    case ThermalMount::PanTilt: {
      const double yaw = pose.yaw + robot.pan_tilt.pan;
      cam.forward = direction_from_yaw_pitch(yaw, robot.pan_tilt.tilt);
      Vec3 flat = cam.forward.cross(Vec3{0.0, 0.0, 1.0});
      if (flat.norm() < 1e-9) flat = Vec3{std::sin(yaw), -std::cos(yaw), 0.0};
      cam.right = flat.normalized();
      cam.down = cam.forward.cross(cam.right).normalized();
      cam.position = pose.position + Vec3{0.0, 0.0, kPanTiltCameraHeight};
      break;
    }
  }
  return cam;
}

fire::ThermalImage simulate_thermal(const World& world,
                                    const fire::CameraPose& camera,
                                    const ThermalConfig& cfg, double time) {
  fire::ThermalImage img;
  img.width = cfg.width;
  img.height = cfg.height;
  img.intrinsics = thermal_intrinsics(cfg);
  img.pose = camera;
  img.timestamp = time;
  const double ambient =
      std::clamp(cfg.ambient, cfg.min_temp, cfg.max_temp);
  img.values.assign(static_cast<std::size_t>(cfg.width) * cfg.height, ambient);

  const double res = world.grid().resolution();
  for (const auto& fire : world.fires()) {
    const Vec3 v = fire.position - camera.position;
    const double depth = v.dot(camera.forward);
    if (depth < 0.05) continue;
    const double u = img.intrinsics.cx + img.intrinsics.fx * v.dot(camera.right) / depth;
    const double vv = img.intrinsics.cy + img.intrinsics.fy * v.dot(camera.down) / depth;
    const double r_px = img.intrinsics.fx * fire.radius / depth;
    if (u < -r_px || u > cfg.width - 1 + r_px || vv < -r_px ||
        vv > cfg.height - 1 + r_px)
      continue;

    // Occlusion against the static grid, with slack so the plate's own
    // mounting surface does not hide it.
    const double range = v.norm();
    const auto hit = world::raycast(world.grid(), camera.position,
                                    v.normalized(), range - 1.5 * res);
    if (hit) continue;

    const double temp =
        std::clamp(fire.plate_temperature, cfg.min_temp, cfg.max_temp);
    const int u0 = std::max(0, static_cast<int>(std::floor(u - r_px)));
    const int u1 = std::min(cfg.width - 1, static_cast<int>(std::ceil(u + r_px)));
    const int v0 = std::max(0, static_cast<int>(std::floor(vv - r_px)));
    const int v1 = std::min(cfg.height - 1, static_cast<int>(std::ceil(vv + r_px)));
    for (int py = v0; py <= v1; ++py)
      for (int px = u0; px <= u1; ++px) {
        const double du = px - u, dv = py - vv;
        if (du * du + dv * dv <= r_px * r_px)
          img.at(px, py) = std::max(img.at(px, py), temp);
      }
  }
  return img;
}

}  // namespace firenav::sim
