#include "firenav/mission/benchmarks.hpp"

#include <chrono>
#include <cmath>

#include "firenav/mcl/mcl.hpp"
#include "firenav/sim/sensors.hpp"
#include "firenav/track/trackers.hpp"
#include "firenav/world/point_map.hpp"

namespace firenav::mission {

namespace {

/// 20x20x6 m room with pillars and an interior wall stub; the scan pattern
/// is mostly horizontal, so altitude is weakly observable from geometry.
std::vector<Vec3> benchmark_map_points() {
  std::vector<Vec3> pts;
  const double s = 0.1;
  sim::sample_box(pts, {-10, -10, 0.0}, {10, 10, 0.1}, s);     // floor
  sim::sample_box(pts, {-10, -10, 0}, {-9.8, 10, 6}, s);       // walls
  sim::sample_box(pts, {9.8, -10, 0}, {10, 10, 6}, s);
  sim::sample_box(pts, {-10, -10, 0}, {10, -9.8, 6}, s);
  sim::sample_box(pts, {-10, 9.8, 0}, {10, 10, 6}, s);
  sim::sample_box(pts, {-2.2, -2.2, 0}, {-1.8, -1.8, 6}, s);   // pillars
  sim::sample_box(pts, {2.8, -3.2, 0}, {3.2, -2.8, 6}, s);
  sim::sample_box(pts, {-3.2, 3.8, 0}, {-2.8, 4.2, 6}, s);
  sim::sample_box(pts, {1.8, 2.8, 0}, {2.2, 3.2, 6}, s);
  sim::sample_box(pts, {-0.2, -7.0, 0}, {0.2, -1.0, 4}, s);    // wall stub
  return pts;
}

sim::LidarConfig benchmark_lidar() {
  sim::LidarConfig lidar;
  lidar.channels = 8;
  lidar.rays_per_channel = 120;
  lidar.vertical_fov = 0.3;  // narrow: mostly walls, little floor
  lidar.range_noise = 0.02;
  return lidar;
}

sim::OdomConfig benchmark_odom() {
  sim::OdomConfig odom;
  odom.drift_x = 1.04;
  odom.drift_y = 0.97;
  odom.drift_z = 1.05;
  odom.drift_yaw_rate = 0.006;  // rad/s, integrates to a strong yaw bias
  odom.noise_xyz = 0.004;
  odom.noise_yaw = 0.003;
  return odom;
}

struct BenchSensors {
  bool use_alt = false;
  bool use_yaw = false;
  bool use_gps = false;
};

struct BenchOutcome {
  double pos_rmse = 0.0, z_rmse = 0.0, yaw_rmse = 0.0;
  double mean_update_ms = 0.0, max_update_ms = 0.0;
  int updates = 0;
  double max_pos_error = 0.0;
  double mean_pos_error = 0.0;
  double max_gps_error = 0.0;
};

/// One benchmark flight. The trajectory is driven from ground truth, so
/// every combination sees the identical motion and sensor streams.
BenchOutcome run_bench(uint64_t seed, double duration, int particles,
                       int cloud_points, const BenchSensors& sensors,
                       bool gps_outlier) {
  sim::World world(world::PointMap(benchmark_map_points()), 0.2, seed, {});
  const auto likelihood = world::LikelihoodField::build(world.grid(), 0.2, 0.6);

  sim::RobotState robot;
  robot.id = "bench";
  robot.kind = sim::RobotKind::Uav;
  robot.pose = {{-7.0, -7.0, 1.5}, 0.0};
  world.add_robot(robot);

  const sim::LidarConfig lidar = benchmark_lidar();
  const sim::OdomConfig odom = benchmark_odom();
  sim::GpsConfig gps;
  gps.xy_noise = 0.5;
  if (gps_outlier) {
    gps.mode = sim::GpsMode::Outlier;
    gps.outlier.axis = 1;
    gps.outlier.velocity = 0.1;
    gps.outlier.start_time = 20.0;
    gps.outlier.end_time = 170.0;  // 15 m drift, then the jump back
  }

  Rng lidar_rng(seed ^ 0x11a5ULL), gps_rng(seed ^ 0x29b7ULL),
      odom_rng(seed ^ 0x3d31ULL), compass_rng(seed ^ 0x4ef3ULL),
      alt_rng(seed ^ 0x5c0dULL);

  mcl::MclConfig cfg;
  cfg.particle_count = particles;
  cfg.max_cloud_points = cloud_points;
  cfg.use_altimeter = sensors.use_alt;
  cfg.use_yaw = sensors.use_yaw;
  cfg.use_gps = sensors.use_gps;
  cfg.alpha = sensors.use_gps ? 0.8 : 1.0;
  cfg.resample_sigma_z = 0.05;
  cfg.resample_sigma_yaw = 0.02;
  mcl::MclFilter filter(cfg, seed ^ 0x6ab1ULL);
  filter.initialize(robot.pose, {0.1, 0.1, 0.05, 0.05});

  const std::vector<Vec3> circuit = {{7.0, -7.0, 2.5}, {7.0, 7.0, 1.5},
                                     {-7.0, 7.0, 3.0}, {-7.0, -7.0, 1.5}};
  std::size_t wp = 0;

  track::SaturatedProportionalConfig sp;
  sp.max_speed_xy = 0.8;
  sp.max_speed_z = 0.5;

  const double dt = 0.05;
  const long steps = static_cast<long>(duration / dt);
  Pose prev_truth = robot.pose;
  std::vector<Vec3> cloud;

  double sum_sq_pos = 0.0, sum_sq_z = 0.0, sum_sq_yaw = 0.0;
  long samples = 0;
  BenchOutcome out;
  double sum_update_ms = 0.0;
  double sum_pos_error = 0.0;
  long err_samples = 0;

  for (long step = 0; step < steps; ++step) {
    const sim::RobotState& truth = world.robot(0);

    // Waypoint circuit steering from truth.
    const Vec3 target = circuit[wp];
    if ((truth.pose.position - target).norm() < 0.4)
      wp = (wp + 1) % circuit.size();
    const Vec3 d = target - truth.pose.position;
    const double desired_yaw =
        d.norm_xy() > 0.3 ? std::atan2(d.y, d.x) : truth.pose.yaw;
    const auto uc =
        track::saturated_proportional(target, truth.pose, desired_yaw, sp);
    sim::RobotCommand cmd;
    cmd.velocity = uc.velocity;
    cmd.yaw_rate = uc.yaw_rate;

    // Sensors and filter.
    const auto inc =
        sim::simulate_odometry(prev_truth, truth.pose, odom, dt, odom_rng);
    filter.predict({inc.dx, inc.dy, inc.dz, inc.dyaw});
    prev_truth = truth.pose;

    if (step % 2 == 0)
      cloud = sim::simulate_lidar(world, truth.pose, lidar, lidar_rng);
    std::optional<Vec3> gps_fix;
    if (step % 4 == 0)
      gps_fix = sim::simulate_gps(truth.pose, gps, world.time(), gps_rng);
    const double compass =
        sim::simulate_compass(truth.pose, 0.005, compass_rng);
    const double altimeter =
        sim::simulate_altimeter(truth.pose, 0.05, alt_rng);

    if (gps_fix) {
      const double gerr =
          Vec3{gps_fix->x - truth.pose.position.x,
               gps_fix->y - truth.pose.position.y, 0.0}
              .norm();
      out.max_gps_error = std::max(out.max_gps_error, gerr);
    }

    if (filter.should_update() && !cloud.empty()) {
      const auto t0 = std::chrono::steady_clock::now();
      filter.update(cloud, likelihood, 0.0, 0.0,
                    sensors.use_gps ? gps_fix : std::nullopt, altimeter,
                    compass);
      const auto t1 = std::chrono::steady_clock::now();
      const double ms =
          std::chrono::duration<double, std::milli>(t1 - t0).count();
      sum_update_ms += ms;
      out.max_update_ms = std::max(out.max_update_ms, ms);
      ++out.updates;
    }

    // Error sampling at 10 Hz after a short settle.
    if (step % 2 == 0 && world.time() > 5.0) {
      const auto est = filter.estimate();
      const Vec3 err = est.pose.position - truth.pose.position;
      const double yaw_err = wrap_angle(est.pose.yaw - truth.pose.yaw);
      sum_sq_pos += err.dot(err);
      sum_sq_z += err.z * err.z;
      sum_sq_yaw += yaw_err * yaw_err;
      ++samples;
      const double pe = err.norm();
      out.max_pos_error = std::max(out.max_pos_error, pe);
      sum_pos_error += pe;
      ++err_samples;
    }

    world.step(dt, std::span<const sim::RobotCommand>(&cmd, 1));
  }

  out.pos_rmse = samples ? std::sqrt(sum_sq_pos / samples) : 0.0;
  out.z_rmse = samples ? std::sqrt(sum_sq_z / samples) : 0.0;
  out.yaw_rmse = samples ? std::sqrt(sum_sq_yaw / samples) : 0.0;
  out.mean_update_ms = out.updates ? sum_update_ms / out.updates : 0.0;
  out.mean_pos_error = err_samples ? sum_pos_error / err_samples : 0.0;
  return out;
}

}  // namespace

std::vector<MclBenchRow> bench_mcl(uint64_t seed, double duration,
                                   int particles, int cloud_points) {
  const std::vector<std::pair<std::string, BenchSensors>> combos = {
      {"map_only", {false, false, false}},
      {"alt", {true, false, false}},
      {"yaw", {false, true, false}},
      {"alt_yaw", {true, true, false}},
      {"gps", {false, false, true}},
      {"gps_alt", {true, false, true}},
      {"gps_yaw", {false, true, true}},
      {"gps_alt_yaw", {true, true, true}},
  };
  std::vector<MclBenchRow> rows;
  for (const auto& [name, sensors] : combos) {
    const BenchOutcome o =
        run_bench(seed, duration, particles, cloud_points, sensors, false);
    rows.push_back({name, o.pos_rmse, o.z_rmse, o.yaw_rmse, o.mean_update_ms,
                    o.max_update_ms, o.updates});
  }
  return rows;
}

GpsOutlierResult bench_gps_outlier(uint64_t seed, double duration) {
  // Filter runs GPS-free (weight zeroed); the injected outlier only shows
  // up in the raw fix error.
  const BenchOutcome o = run_bench(seed, duration, 1000, 500,
                                   {true, true, false}, true);
  return {o.max_pos_error, o.max_gps_error, o.mean_pos_error};
}

std::vector<PlannerScenario> planner_benchmark_scenarios() {
  std::vector<PlannerScenario> out;

  // Door crossing: a wall split by a 1.6 m doorway.
  {
    world::VoxelGrid grid(0.2, {100, 100, 1}, {0, 0, 0});
    for (int x = 0; x < 100; ++x)
      for (int y : {0, 99}) grid.set_occupied({x, y, 0});
    for (int y = 0; y < 100; ++y)
      for (int x : {0, 99}) grid.set_occupied({x, y, 0});
    for (int x = 1; x < 99; ++x) {
      if (x >= 46 && x <= 53) continue;  // the door
      grid.set_occupied({x, 50, 0});
    }
    auto dist = world::DistanceField::build(grid, 5.0);
    out.push_back({"door", std::move(grid), std::move(dist),
                   {5.1, 3.1, 0.1}, {15.1, 17.1, 0.1},
                   plan::PlannerMode::Planar, 0.4});
  }

  // Pillar field.
  {
    world::VoxelGrid grid(0.2, {100, 100, 1}, {0, 0, 0});
    for (int x = 0; x < 100; ++x)
      for (int y : {0, 99}) grid.set_occupied({x, y, 0});
    for (int y = 0; y < 100; ++y)
      for (int x : {0, 99}) grid.set_occupied({x, y, 0});
    for (int px = 15; px < 95; px += 16)
      for (int py = 15; py < 95; py += 16)
        for (int dx = 0; dx < 3; ++dx)
          for (int dy = 0; dy < 3; ++dy)
            grid.set_occupied({px + dx, py + dy, 0});
    auto dist = world::DistanceField::build(grid, 5.0);
    out.push_back({"pillars", std::move(grid), std::move(dist),
                   {1.5, 1.5, 0.1}, {18.5, 18.5, 0.1},
                   plan::PlannerMode::Planar, 0.4});
  }

  // Volumetric room with a window in the dividing wall.
  {
    world::VoxelGrid grid(0.2, {60, 60, 25}, {0, 0, 0});
    for (int x = 0; x < 60; ++x)
      for (int z = 0; z < 25; ++z) {
        const bool window = x >= 24 && x <= 33 && z >= 10 && z <= 16;
        if (!window) grid.set_occupied({x, 30, z});
      }
    for (int x = 0; x < 60; ++x)
      for (int y = 0; y < 60; ++y) grid.set_occupied({x, y, 0});  // floor
    auto dist = world::DistanceField::build(grid, 5.0);
    out.push_back({"window3d", std::move(grid), std::move(dist),
                   {3.0, 3.0, 1.5}, {9.0, 11.0, 1.9},
                   plan::PlannerMode::Volumetric, 0.6});
  }
  return out;
}

std::vector<PlannerBenchRow> bench_planner(
    const std::vector<double>& cost_weights,
    const std::vector<double>& line_of_sights) {
  std::vector<PlannerBenchRow> rows;
  const auto scenarios = planner_benchmark_scenarios();
  for (const auto& sc : scenarios) {
    for (const double cw : cost_weights) {
      for (const double los : line_of_sights) {
        plan::PlannerConfig cfg;
        cfg.mode = sc.mode;
        cfg.inflation_radius = sc.inflation;
        cfg.cost_weight = cw;
        cfg.max_line_of_sight = los;
        const auto t0 = std::chrono::steady_clock::now();
        const plan::Path path =
            plan::plan(sc.grid, sc.dist, sc.start, sc.goal, cfg);
        const auto t1 = std::chrono::steady_clock::now();
        rows.push_back(
            {sc.name, cw, los, path.expanded_nodes, path.length,
             path.min_clearance,
             std::chrono::duration<double, std::milli>(t1 - t0).count()});
      }
    }
  }
  return rows;
}

}  // namespace firenav::mission
