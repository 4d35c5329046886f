#include <doctest.h>

#include <cmath>

#include "firenav/sim/scenario.hpp"
#include "firenav/sim/sensors.hpp"
#include "firenav/sim/world.hpp"
#include "oracles.hpp"

using namespace firenav;
using namespace firenav::sim;

namespace {

constexpr double kPi = 3.14159265358979323846;

/// Small room: ground plane plus one wall 5 m ahead of the origin.
World make_room(uint64_t seed = 1, WorldConfig cfg = {}) {
  std::vector<Vec3> pts;
  sample_box(pts, {-10, -10, 0.0}, {10, 10, 0.05}, 0.1);   // ground
  sample_box(pts, {5.0, -10, 0.0}, {5.3, 10, 3.0}, 0.1);   // wall at x=5
  World world(world::PointMap(pts), 0.2, seed, cfg);
  return world;
}

RobotState make_ugv(const std::string& id = "ugv") {
  RobotState r;
  r.id = id;
  r.kind = RobotKind::Ugv;
  r.pose = {{0, 0, 0}, 0.0};
  r.tank_capacity = 3.0;
  r.water_remaining = 3.0;
  return r;
}

RobotState make_uav(const std::string& id = "uav") {
  RobotState r;
  r.id = id;
  r.kind = RobotKind::Uav;
  r.pose = {{0, 0, 1.5}, 0.0};
  r.tank_capacity = 1.0;
  r.water_remaining = 1.0;
  return r;
}

}  // namespace

TEST_CASE("step: unit velocity integrates to unit displacement") {
  World world = make_room();
  world.add_robot(make_uav());
  RobotCommand cmd;
  cmd.velocity = {1.0, 0.0, 0.0};
  for (int i = 0; i < 20; ++i)
    world.step(0.05, std::span<const RobotCommand>(&cmd, 1));
  CHECK(world.robot(0).pose.position.x == doctest::Approx(1.0));
  CHECK(world.time() == doctest::Approx(1.0));
}

TEST_CASE("step: UGV speed capped at 0.7 m/s") {
  World world = make_room();
  world.add_robot(make_ugv());
  RobotCommand cmd;
  cmd.velocity = {2.0, 0.0, 0.0};
  for (int i = 0; i < 20; ++i)
    world.step(0.05, std::span<const RobotCommand>(&cmd, 1));
  CHECK(world.robot(0).pose.position.x == doctest::Approx(0.7).epsilon(1e-6));
  CHECK(world.robot(0).pose.position.z == 0.0);
}

TEST_CASE("step: wall contact stops motion and emits a collision event") {
  World world = make_room();
  world.add_robot(make_uav());
  RobotCommand cmd;
  cmd.velocity = {2.0, 0.0, 0.0};
  for (int i = 0; i < 100; ++i)
    world.step(0.05, std::span<const RobotCommand>(&cmd, 1));
  CHECK(world.robot(0).pose.position.x < 5.0);
  CHECK(world.robot(0).pose.position.x > 4.0);
  CHECK(world.robot(0).collisions > 0);
  CHECK(!world.events().of_kind("collision").empty());
}

TEST_CASE("lidar: wall 5 m ahead returns forward ranges near 5") {
  World world = make_room();
  world.add_robot(make_uav());
  LidarConfig lidar;
  lidar.channels = 1;
  lidar.rays_per_channel = 360;
  lidar.range_noise = 0.0;
  Rng rng(3);
  const auto cloud =
      simulate_lidar(world, world.robot(0).pose, lidar, rng);
  REQUIRE(!cloud.empty());
  int forward = 0;
  for (const auto& p : cloud) {
    if (std::abs(p.y) < 0.3 && p.x > 0) {
      ++forward;
      CHECK(p.x == doctest::Approx(5.0).epsilon(0.05));
    }
  }
  CHECK(forward > 0);
}

TEST_CASE("lidar: nothing in range yields an empty cloud") {
  std::vector<Vec3> pts = {{50.0, 50.0, 0.0}};  // lone point far away
  World world(world::PointMap(pts), 0.2, 1, {});
  world.add_robot(make_uav());
  LidarConfig lidar;
  lidar.channels = 4;
  lidar.rays_per_channel = 90;
  lidar.max_range = 10.0;
  Rng rng(3);
  const auto cloud = simulate_lidar(world, {{0, 0, 1.5}, 0.0}, lidar, rng);
  CHECK(cloud.empty());
}

TEST_CASE("lidar: every return is consistent with the occupancy grid") {
  World world = make_room(5);
  world.add_robot(make_uav());
  LidarConfig lidar;
  lidar.channels = 8;
  lidar.rays_per_channel = 90;
  lidar.vertical_fov = 0.5;
  lidar.range_noise = 0.02;
  Rng rng(7);
  const Pose pose{{-2.0, 1.0, 1.2}, 0.7};
  const auto cloud = simulate_lidar(world, pose, lidar, rng);
  REQUIRE(cloud.size() > 100);
  const auto& grid = world.grid();
  for (const auto& p : cloud) {
    const Vec3 m = body_to_map(pose, p);
    // Within one cell of some occupied voxel.
    bool near = false;
    const auto c = grid.cell_of(m);
    for (int dz = -1; dz <= 1 && !near; ++dz)
      for (int dy = -1; dy <= 1 && !near; ++dy)
        for (int dx = -1; dx <= 1 && !near; ++dx)
          near = grid.occupied({c.x + dx, c.y + dy, c.z + dz});
    CHECK(near);
  }
}

TEST_CASE("gps: nominal, outlier drift, and noise statistics") {
  Rng rng(11);
  GpsConfig cfg;
  cfg.xy_noise = 0.0;
  cfg.z_noise = 0.0;
  const Pose truth{{3.0, -2.0, 1.0}, 0.3};

  SUBCASE("zero noise returns the truth") {
    const Vec3 fix = simulate_gps(truth, cfg, 10.0, rng);
    CHECK(fix.x == truth.position.x);
    CHECK(fix.y == truth.position.y);
  }

  SUBCASE("constant-velocity drift reaches 15 m then jumps back") {
    cfg.mode = GpsMode::Outlier;
    cfg.outlier.axis = 1;
    cfg.outlier.velocity = 0.033;
    cfg.outlier.start_time = 0.0;
    cfg.outlier.end_time = 450.0;
    const Vec3 before = simulate_gps(truth, cfg, 449.9, rng);
    CHECK(before.y - truth.position.y ==
          doctest::Approx(0.033 * 449.9).epsilon(1e-6));
    CHECK(before.y - truth.position.y > 14.0);
    const Vec3 after = simulate_gps(truth, cfg, 450.0, rng);
    CHECK(after.y == truth.position.y);  // the jump
  }

  SUBCASE("sample std dev tracks the configured noise") {
    cfg.xy_noise = 0.5;
    double sum = 0.0, sum_sq = 0.0;
    const int n = 10000;
    for (int i = 0; i < n; ++i) {
      const Vec3 fix = simulate_gps(truth, cfg, 0.0, rng);
      const double e = fix.x - truth.position.x;
      sum += e;
      sum_sq += e * e;
    }
    const double var = sum_sq / n - (sum / n) * (sum / n);
    CHECK(std::sqrt(var) == doctest::Approx(0.5).epsilon(0.1));
  }
}

TEST_CASE("odometry: exact, multiplicative drift, integrated yaw drift") {
  Rng rng(13);
  OdomConfig cfg;

  SUBCASE("zero noise gives exact body-frame increments") {
    const Pose prev{{1.0, 2.0, 0.5}, kPi / 2};
    const Pose cur{{1.0, 3.0, 0.7}, kPi / 2 + 0.1};
    const auto inc = simulate_odometry(prev, cur, cfg, 0.05, rng);
    CHECK(inc.dx == doctest::Approx(1.0));   // +y world = +x body at yaw 90
    CHECK(inc.dy == doctest::Approx(0.0).epsilon(1e-9));
    CHECK(inc.dz == doctest::Approx(0.2));
    CHECK(inc.dyaw == doctest::Approx(0.1));
  }

  SUBCASE("multiplicative drift inflates a straight run") {
    cfg.drift_x = 1.05;
    double integrated = 0.0;
    Pose prev{{0, 0, 0}, 0.0};
    for (int i = 0; i < 100; ++i) {
      Pose cur = prev;
      cur.position.x += 0.1;  // 10 m total
      integrated += simulate_odometry(prev, cur, cfg, 0.05, rng).dx;
      prev = cur;
    }
    CHECK(integrated == doctest::Approx(10.5).epsilon(1e-9));
  }

  SUBCASE("yaw drift accumulates across steps") {
    cfg.drift_yaw_rate = 0.02;  // per second; dt 0.05 -> 0.001 per step
    double yaw = 0.0;
    const Pose pose{{0, 0, 0}, 0.0};
    for (int i = 0; i < 1000; ++i)
      yaw += simulate_odometry(pose, pose, cfg, 0.05, rng).dyaw;
    CHECK(yaw == doctest::Approx(1.0).epsilon(1e-9));
  }
}

TEST_CASE("compass wraps and altimeter is unbiased") {
  Rng rng(17);
  SUBCASE("yaw pi stays pi") {
    const double y = simulate_compass({{0, 0, 0}, kPi}, 0.0, rng);
    CHECK(y == doctest::Approx(kPi));
  }
  SUBCASE("noise pushes past pi and wraps") {
    CHECK(wrap_angle(kPi - 0.01 + 0.02) ==
          doctest::Approx(-kPi + 0.01));
  }
  SUBCASE("altimeter mean within 0.01 of truth over 1e4 samples") {
    double sum = 0.0;
    for (int i = 0; i < 10000; ++i)
      sum += simulate_altimeter({{0, 0, 2.0}, 0}, 0.1, rng);
    CHECK(sum / 10000 == doctest::Approx(2.0).epsilon(0.005));
  }
}

TEST_CASE("thermal: ambient image, centered fire, occlusion") {
  World world = make_room();
  world.add_robot(make_uav());
  ThermalConfig cfg;

  SUBCASE("no fire in view renders uniform ambient") {
    const auto cam = thermal_camera_pose(world.robot(0), cfg);
    const auto img = simulate_thermal(world, cam, cfg, 0.0);
    for (const double v : img.values) CHECK(v == cfg.ambient);
  }

  SUBCASE("fire on the optical axis peaks at the image center") {
    FireSource fire;
    fire.position = {3.0, 0.0, 1.5};
    fire.kind = FireKind::Facade;
    fire.facing_yaw = kPi;  // facing the camera
    world.add_fire(fire);
    const auto cam = thermal_camera_pose(world.robot(0), cfg);
    const auto img = simulate_thermal(world, cam, cfg, 0.0);
    // The whole disc renders at plate temperature; its centroid must sit at
    // the image center.
    double su = 0.0, sv = 0.0, best = -1e9;
    int hot = 0;
    for (int v = 0; v < img.height; ++v)
      for (int u = 0; u < img.width; ++u) {
        best = std::max(best, img.at(u, v));
        if (img.at(u, v) > 100.0) {
          su += u;
          sv += v;
          ++hot;
        }
      }
    REQUIRE(hot > 0);
    CHECK(best == doctest::Approx(110.0));
    CHECK(std::abs(su / hot - (img.width - 1) / 2.0) <= 1.0);
    CHECK(std::abs(sv / hot - (img.height - 1) / 2.0) <= 1.0);
  }

  SUBCASE("fire behind the wall renders ambient") {
    FireSource fire;
    fire.position = {7.0, 0.0, 1.5};  // behind the x=5 wall
    world.add_fire(fire);
    const auto cam = thermal_camera_pose(world.robot(0), cfg);
    const auto img = simulate_thermal(world, cam, cfg, 0.0);
    for (const double v : img.values) CHECK(v == cfg.ambient);
  }
}

TEST_CASE("water: full hit, miss, and out of reach") {
  WorldConfig wcfg;
  wcfg.stream_jitter = 0.0;
  World world = make_room(1, wcfg);

  RobotState ugv = make_ugv();
  ugv.pose.yaw = 0.0;
  world.add_robot(ugv);

  FireSource fire;
  fire.kind = FireKind::IndoorFloor;
  fire.facing_yaw = kPi;     // plate faces the robot
  fire.position = {1.0, 0.0, 0.55};  // dead ahead of the nozzle
  const int fi = world.add_fire(fire);

  SUBCASE("dead-center hit for 60 s lands the full liter") {
    RobotCommand cmd;
    cmd.eject_water = true;
    for (int i = 0; i < 1200; ++i)
      world.step(0.05, std::span<const RobotCommand>(&cmd, 1));
    CHECK(world.fire(fi).water_received == doctest::Approx(1.0).epsilon(1e-6));
    CHECK(world.robot(0).water_remaining == doctest::Approx(2.0));
  }

  SUBCASE("aimed away wastes the water") {
    world.robot(0).pose.yaw = kPi / 2;
    RobotCommand cmd;
    cmd.eject_water = true;
    for (int i = 0; i < 200; ++i)
      world.step(0.05, std::span<const RobotCommand>(&cmd, 1));
    CHECK(world.fire(fi).water_received == 0.0);
    CHECK(world.robot(0).water_remaining < 3.0);
  }

  SUBCASE("a fire past the stream reach receives nothing") {
    world.fire(fi).position = {3.0, 0.0, 0.55};
    RobotCommand cmd;
    cmd.eject_water = true;
    for (int i = 0; i < 200; ++i)
      world.step(0.05, std::span<const RobotCommand>(&cmd, 1));
    CHECK(world.fire(fi).water_received == 0.0);
  }

  SUBCASE("water conservation: dispensed equals tank delta") {
    RobotCommand cmd;
    cmd.eject_water = true;
    for (int i = 0; i < 500; ++i)
      world.step(0.05, std::span<const RobotCommand>(&cmd, 1));
    const auto& r = world.robot(0);
    CHECK(r.water_dispensed ==
          doctest::Approx(r.tank_capacity - r.water_remaining));
  }
}

TEST_CASE("blanket: transitions and coverage") {
  World world = make_room();
  RobotState uav = make_uav();
  uav.blanket = BlanketState::Stowed;
  uav.pose = {{0.0, 0.0, 1.5}, 0.0};
  world.add_robot(uav);

  FireSource fire;
  fire.kind = FireKind::OutdoorGround;
  fire.position = {0.0, 0.0, 0.0};
  fire.radius = 0.25;
  const int fi = world.add_fire(fire);

  SUBCASE("drop before unroll is an error") {
    CHECK_THROWS_WITH(world.apply_blanket_op(0, BlanketOp::Drop),
                      "blanket not unrolled");
  }

  SUBCASE("centered drop of a large blanket covers fully") {
    world.apply_blanket_op(0, BlanketOp::Unroll);
    world.apply_blanket_op(0, BlanketOp::Drop);
    CHECK(world.fire(fi).blanket_coverage == doctest::Approx(1.0));
    const auto events = world.events().of_kind("blanket_drop");
    CHECK(events.size() == 1);
  }

  SUBCASE("offset by half the blanket width bisects the disc") {
    // Rectangle edge passes through the disc center.
    world.robot(0).pose.position = {0.0, 0.6, 1.5};
    world.apply_blanket_op(0, BlanketOp::Unroll);
    world.apply_blanket_op(0, BlanketOp::Drop);
    const double expected = oracles::disc_rect_overlap_ref(
        0.0, 0.0, 0.25, 0.0, 0.6, 1.8, 1.2, 0.0);
    CHECK(world.fire(fi).blanket_coverage ==
          doctest::Approx(expected).epsilon(0.02));
    CHECK(world.fire(fi).blanket_coverage == doctest::Approx(0.5).epsilon(0.05));
  }

  SUBCASE("distant drop covers nothing") {
    world.robot(0).pose.position = {5.0, 5.0, 1.5};
    world.apply_blanket_op(0, BlanketOp::Unroll);
    world.apply_blanket_op(0, BlanketOp::Drop);
    CHECK(world.fire(fi).blanket_coverage == 0.0);
  }
}

TEST_CASE("determinism: same seed and commands give identical trajectories") {
  auto run = [](uint64_t seed) {
    WorldConfig cfg;
    World world = make_room(seed, cfg);
    world.add_robot(make_uav());
    Rng lidar_rng(seed);
    std::vector<Vec3> last_cloud;
    RobotCommand cmd;
    for (int i = 0; i < 100; ++i) {
      cmd.velocity = {0.5, 0.1 * std::sin(i * 0.05), 0.05};
      cmd.yaw_rate = 0.1;
      cmd.eject_water = i % 7 == 0;
      world.step(0.05, std::span<const RobotCommand>(&cmd, 1));
      if (i % 5 == 0)
        last_cloud = simulate_lidar(world, world.robot(0).pose,
                                    world.robot(0).rig.lidar, lidar_rng);
    }
    return std::make_tuple(world.robot(0).pose, last_cloud,
                           world.robot(0).water_remaining);
  };
  const auto [pose_a, cloud_a, water_a] = run(42);
  const auto [pose_b, cloud_b, water_b] = run(42);
  CHECK(pose_a.position.x == pose_b.position.x);
  CHECK(pose_a.position.y == pose_b.position.y);
  CHECK(pose_a.position.z == pose_b.position.z);
  CHECK(pose_a.yaw == pose_b.yaw);
  CHECK(water_a == water_b);
  REQUIRE(cloud_a.size() == cloud_b.size());
  for (std::size_t i = 0; i < cloud_a.size(); ++i) {
    CHECK(cloud_a[i].x == cloud_b[i].x);
    CHECK(cloud_a[i].y == cloud_b[i].y);
    CHECK(cloud_a[i].z == cloud_b[i].z);
  }
}
