#include <doctest.h>

#include <cmath>

#include "firenav/sim/world.hpp"
#include "firenav/track/trackers.hpp"

using namespace firenav;
using track::PurePursuitConfig;
using track::SaturatedProportionalConfig;

namespace {
constexpr double kPi = 3.14159265358979323846;
}

TEST_CASE("pure pursuit: heading change law") {
  PurePursuitConfig cfg;
  cfg.look_ahead = 1.0;
  cfg.nominal_speed = 0.5;

  SUBCASE("target dead ahead drives straight at nominal speed") {
    const std::vector<Vec3> path = {{0, 0, 0}, {10, 0, 0}};
    const auto cmd = track::pure_pursuit(path, {{0, 0, 0}, 0.0}, cfg);
    CHECK(cmd.omega == doctest::Approx(0.0));
    CHECK(cmd.v == doctest::Approx(cfg.nominal_speed));
  }

  SUBCASE("a waypoint at (1,1) in the robot frame gives dtheta = pi/4") {
    // Path bends 90 degrees exactly at the look-ahead distance.
    const std::vector<Vec3> path = {{0, 0, 0}, {1, 0, 0}, {1, 10, 0}};
    // Robot slightly behind the corner so the target lands at (1, ~1).
    Pose pose{{0, 0, 0}, 0.0};
    const auto cmd = track::pure_pursuit(path, pose, cfg);
    // Target at arc length 1.0 = the corner (1,0); steer straight.
    CHECK(cmd.omega == doctest::Approx(0.0).epsilon(1e-9));

    // From the corner, one look-ahead along the second leg is (1,1).
    Pose at_corner{{1, 0, 0}, 0.0};
    const auto cmd2 = track::pure_pursuit(path, at_corner, cfg);
    const double expected_omega = cfg.angular_gain * (kPi / 4);
    CHECK(cmd2.omega ==
          doctest::Approx(std::min(expected_omega, cfg.max_yaw_rate)));
  }

  SUBCASE("inside the goal tolerance the command is zero") {
    const std::vector<Vec3> path = {{0, 0, 0}, {5, 0, 0}};
    const auto cmd = track::pure_pursuit(path, {{4.9, 0.05, 0}, 0.3}, cfg);
    CHECK(cmd.v == 0.0);
    CHECK(cmd.omega == 0.0);
  }
}

TEST_CASE("saturated proportional: clamp and linear regions") {
  SaturatedProportionalConfig cfg;
  cfg.gain = 0.8;
  cfg.max_speed_xy = 1.5;
  cfg.max_speed_z = 1.0;

  SUBCASE("large error saturates exactly at the limit") {
    const auto cmd = track::saturated_proportional({100, 0, 0},
                                                   {{0, 0, 0}, 0}, 0.0, cfg);
    CHECK(cmd.velocity.x == 1.5);
  }
  SUBCASE("zero error commands nothing") {
    const auto cmd =
        track::saturated_proportional({2, 3, 1}, {{2, 3, 1}, 0.4}, 0.4, cfg);
    CHECK(cmd.velocity.x == doctest::Approx(0.0));
    CHECK(cmd.velocity.y == doctest::Approx(0.0));
    CHECK(cmd.velocity.z == doctest::Approx(0.0));
    CHECK(cmd.yaw_rate == doctest::Approx(0.0));
  }
  SUBCASE("half-saturation error lands in the linear region") {
    const double err = cfg.max_speed_xy / (2 * cfg.gain);
    const auto cmd = track::saturated_proportional({err, 0, 0},
                                                   {{0, 0, 0}, 0}, 0.0, cfg);
    CHECK(cmd.velocity.x == doctest::Approx(cfg.max_speed_xy / 2));
  }
  SUBCASE("commands never exceed the saturation bounds") {
    Rng rng(3);
    for (int i = 0; i < 200; ++i) {
      const Vec3 target{rng.uniform(-50, 50), rng.uniform(-50, 50),
                        rng.uniform(-20, 20)};
      const Pose pose{{rng.uniform(-5, 5), rng.uniform(-5, 5), 0},
                      rng.uniform(-kPi, kPi)};
      const auto cmd = track::saturated_proportional(
          target, pose, rng.uniform(-kPi, kPi), cfg);
      CHECK(std::abs(cmd.velocity.x) <= cfg.max_speed_xy);
      CHECK(std::abs(cmd.velocity.y) <= cfg.max_speed_xy);
      CHECK(std::abs(cmd.velocity.z) <= cfg.max_speed_z);
      CHECK(std::abs(cmd.yaw_rate) <= cfg.max_yaw_rate);
    }
  }
}

TEST_CASE("closed loop: proportional tracker converges monotonically") {
  std::vector<Vec3> pts = {{50, 50, 0}};  // far-away lone map point
  sim::World world(world::PointMap(pts), 0.2, 1, {});
  sim::RobotState uav;
  uav.id = "uav";
  uav.kind = sim::RobotKind::Uav;
  uav.pose = {{0, 0, 2}, 0.0};
  world.add_robot(uav);

  SaturatedProportionalConfig cfg;
  const Vec3 target{6.0, -3.0, 4.0};
  double prev = (target - world.robot(0).pose.position).norm();
  bool reached = false;
  for (int i = 0; i < 2000; ++i) {
    const auto& pose = world.robot(0).pose;
    const auto uc = track::saturated_proportional(target, pose, 0.0, cfg);
    sim::RobotCommand cmd;
    cmd.velocity = uc.velocity;
    cmd.yaw_rate = uc.yaw_rate;
    world.step(0.05, std::span<const sim::RobotCommand>(&cmd, 1));
    const double d = (target - world.robot(0).pose.position).norm();
    CHECK(d <= prev + 1e-9);  // monotone, no overshoot in a first-order loop
    prev = d;
    if (d < cfg.goal_tolerance) {
      reached = true;
      break;
    }
  }
  CHECK(reached);
}

TEST_CASE("closed loop: pure pursuit cross-track error stays under L/2") {
  std::vector<Vec3> pts = {{50, 50, 0}};
  sim::World world(world::PointMap(pts), 0.2, 1, {});
  sim::RobotState ugv;
  ugv.id = "ugv";
  ugv.kind = sim::RobotKind::Ugv;
  ugv.pose = {{0.0, 0.4, 0.0}, 0.5};  // offset and misaligned
  world.add_robot(ugv);

  PurePursuitConfig cfg;
  const std::vector<Vec3> path = {{0, 0, 0}, {12, 0, 0}};
  double worst_after_transient = 0.0;
  for (int i = 0; i < 1600; ++i) {
    const auto& pose = world.robot(0).pose;
    const auto uc = track::pure_pursuit(path, pose, cfg);
    sim::RobotCommand cmd;
    cmd.velocity = {uc.v, 0, 0};
    cmd.yaw_rate = uc.omega;
    world.step(0.05, std::span<const sim::RobotCommand>(&cmd, 1));
    const double t = world.time();
    if (t > 8.0)
      worst_after_transient =
          std::max(worst_after_transient, std::abs(world.robot(0).pose.position.y));
    if (world.robot(0).pose.position.x > 11.0) break;
  }
  CHECK(worst_after_transient < cfg.look_ahead / 2);
}
