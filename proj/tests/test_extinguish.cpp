#include <doctest.h>

#include <cmath>

#include "firenav/fire/extinguish.hpp"
#include "firenav/sim/scenario.hpp"
#include "firenav/sim/sensors.hpp"

using namespace firenav;
using fire::ExtinguishConfig;
using fire::ExtinguishProcedure;
using fire::FireDetection2D;
using fire::ProcedureCommand;
using fire::ProcedureContext;
using fire::ProcedurePhase;
using fire::ProcedureVariant;

namespace {

constexpr double kPi = 3.14159265358979323846;

ExtinguishConfig ugv_config() {
  ExtinguishConfig cfg;
  cfg.variant = ProcedureVariant::UgvWater;
  cfg.zone = {39.5, 29.5, 10.0, 10.0};
  return cfg;
}

FireDetection2D det_at(double u, double v) {
  FireDetection2D d;
  d.u = u;
  d.v = v;
  d.pixel_count = 25;
  return d;
}

ProcedureContext ctx_at(double t, double water = 3.0) {
  ProcedureContext ctx;
  ctx.time = t;
  ctx.water_remaining = water;
  ctx.height_above_ground = 3.0;
  return ctx;
}

}  // namespace

TEST_CASE("confirm: immediate detection enters centering") {
  ExtinguishProcedure proc(ugv_config());
  proc.step(0.1, {det_at(10, 10)}, ctx_at(0.0));
  CHECK(proc.phase() == ProcedurePhase::Centering);
}

TEST_CASE("confirm: exhausted scan aborts") {
  ExtinguishConfig cfg = ugv_config();
  ExtinguishProcedure proc(cfg);
  ProcedureContext ctx = ctx_at(0.0);
  for (int i = 0; i < 10000 && !proc.terminal(); ++i) {
    ctx.time = i * 0.1;
    const auto cmd = proc.step(0.1, {}, ctx);
    // The UGV variant scans with the pan&tilt only; base stays still.
    CHECK(cmd.velocity.norm() == 0.0);
    CHECK(cmd.yaw_rate == 0.0);
    // Follow the commanded rates so setpoints are reached.
    ctx.pan += cmd.pan_rate * 0.1;
    ctx.tilt += cmd.tilt_rate * 0.1;
  }
  CHECK(proc.phase() == ProcedurePhase::Aborted);
}

TEST_CASE("confirm: facade variant sweeps a square, blanket a ground square") {
  ExtinguishConfig cfg;
  cfg.variant = ProcedureVariant::UavFacadeWater;
  cfg.zone = {39.5, 29.5, 10, 10};
  ExtinguishProcedure proc(cfg);
  ProcedureContext ctx = ctx_at(0.0);
  ctx.pose = {{0, 0, 3}, 0};
  bool moved_y = false, moved_z = false, moved_x = false;
  for (int i = 0; i < 2000 && !proc.terminal(); ++i) {
    ctx.time = i * 0.1;
    const auto cmd = proc.step(0.1, {}, ctx);
    if (std::abs(cmd.velocity.y) > 0.05) moved_y = true;
    if (std::abs(cmd.velocity.z) > 0.05) moved_z = true;
    if (std::abs(cmd.velocity.x) > 0.05) moved_x = true;
    // Integrate in the body frame (yaw 0).
    ctx.pose.position += cmd.velocity * 0.1;
  }
  CHECK(moved_y);
  CHECK(moved_z);
  CHECK(!moved_x);  // parallel to the facade
  CHECK(proc.phase() == ProcedurePhase::Aborted);
}

TEST_CASE("center: zone dwell starts the ejection") {
  ExtinguishProcedure proc(ugv_config());
  ProcedureContext ctx = ctx_at(0.0);
  proc.step(0.1, {det_at(10, 5)}, ctx);
  REQUIRE(proc.phase() == ProcedurePhase::Centering);

  SUBCASE("centroid at the zone center commands nothing and dwells") {
    const auto cmd = proc.step(0.1, {det_at(39.5, 29.5)}, ctx);
    CHECK(cmd.pan_rate == doctest::Approx(0.0));
    CHECK(cmd.tilt_rate == doctest::Approx(0.0));
    // Dwell through; 0.5 s of in-zone detections flips to extinguishing.
    for (int i = 0; i < 5; ++i) proc.step(0.1, {det_at(39.5, 29.5)}, ctx);
    CHECK(proc.phase() == ProcedurePhase::Extinguishing);
  }

  SUBCASE("proportional law with the documented gain and sign") {
    ExtinguishConfig cfg = ugv_config();
    cfg.center_gain = 0.002;
    ExtinguishProcedure p2(cfg);
    p2.step(0.1, {det_at(10, 5)}, ctx);
    const auto cmd = p2.step(0.1, {det_at(39.5 + 40.0, 29.5)}, ctx);
    CHECK(cmd.pan_rate == doctest::Approx(-0.08));  // toward the target
    CHECK(cmd.tilt_rate == doctest::Approx(0.0));
  }

  SUBCASE("detection lost for two seconds returns to confirming") {
    for (int i = 0; i < 21 && !proc.terminal(); ++i)
      proc.step(0.1, {}, ctx);
    CHECK(proc.phase() == ProcedurePhase::Confirming);
  }
}

TEST_CASE("extinguish: UGV cross pattern visits all four lobes over 60 s") {
  ExtinguishConfig cfg = ugv_config();
  ExtinguishProcedure proc(cfg);
  ProcedureContext ctx = ctx_at(0.0, 3.0);
  proc.step(0.1, {det_at(39.5, 29.5)}, ctx);
  for (int i = 0; i < 6; ++i) proc.step(0.1, {det_at(39.5, 29.5)}, ctx);
  REQUIRE(proc.phase() == ProcedurePhase::Extinguishing);

  double min_pan = 0, max_pan = 0, min_tilt = 0, max_tilt = 0;
  double eject_time = 0.0;
  for (int i = 0; i < 700 && !proc.terminal(); ++i) {
    ctx.time = 1.0 + i * 0.1;
    const auto cmd = proc.step(0.1, {det_at(39.5, 29.5)}, ctx);
    if (cmd.eject) eject_time += 0.1;
    ctx.pan += cmd.pan_rate * 0.1;
    ctx.tilt += cmd.tilt_rate * 0.1;
    min_pan = std::min(min_pan, ctx.pan);
    max_pan = std::max(max_pan, ctx.pan);
    min_tilt = std::min(min_tilt, ctx.tilt);
    max_tilt = std::max(max_tilt, ctx.tilt);
  }
  CHECK(proc.phase() == ProcedurePhase::Succeeded);
  CHECK(eject_time == doctest::Approx(60.0).epsilon(0.02));
  // All four lobes reached (amplitude ~5 degrees).
  CHECK(max_pan > 0.06);
  CHECK(min_pan < -0.06);
  CHECK(max_tilt > 0.06);
  CHECK(min_tilt < -0.06);
}

TEST_CASE("extinguish: servo keeps correcting during the facade ejection") {
  ExtinguishConfig cfg;
  cfg.variant = ProcedureVariant::UavFacadeWater;
  cfg.zone = {39.5, 29.5, 10, 10};
  ExtinguishProcedure proc(cfg);
  ProcedureContext ctx = ctx_at(0.0, 1.0);
  proc.step(0.1, {det_at(39.5, 29.5)}, ctx);
  for (int i = 0; i < 6; ++i) proc.step(0.1, {det_at(39.5, 29.5)}, ctx);
  REQUIRE(proc.phase() == ProcedurePhase::Extinguishing);

  // Simulate a lateral disturbance pushing the centroid off-zone.
  bool corrected = false;
  for (int i = 0; i < 100; ++i) {
    const auto cmd = proc.step(0.1, {det_at(55.0, 29.5)}, ctx);
    CHECK(cmd.eject);
    if (std::abs(cmd.velocity.y) > 1e-6) corrected = true;
  }
  CHECK(corrected);
}

TEST_CASE("extinguish: empty tank aborts before ejecting") {
  ExtinguishProcedure proc(ugv_config());
  ProcedureContext ctx = ctx_at(0.0, 0.0);  // dry tank
  proc.step(0.1, {det_at(39.5, 29.5)}, ctx);
  for (int i = 0; i < 6 && !proc.terminal(); ++i)
    proc.step(0.1, {det_at(39.5, 29.5)}, ctx);
  CHECK(proc.phase() == ProcedurePhase::Aborted);
}

TEST_CASE("blanket: nominal seven-phase sequence orders unroll before drop") {
  ExtinguishConfig cfg;
  cfg.variant = ProcedureVariant::UavBlanket;
  cfg.zone = {39.5, 29.5, 8, 8};
  ExtinguishProcedure proc(cfg);

  ProcedureContext ctx = ctx_at(0.0, 1.0);
  ctx.pose = {{0, 0, 3.0}, 0.0};
  ctx.height_above_ground = 3.0;

  // Scripted perception: the fire reads centered while hovering above it,
  // drops out once the robot backs off more than 0.5 m or passes 0.5 m
  // beyond it going forward.
  double x = 0.0;
  bool saw_unroll = false, saw_drop = false;
  double unroll_time = -1, drop_time = -1;
  for (int i = 0; i < 4000 && !proc.terminal(); ++i) {
    ctx.time = i * 0.1;
    std::vector<FireDetection2D> dets;
    if (std::abs(x) < 0.5) dets.push_back(det_at(39.5, 29.5));
    const auto cmd = proc.step(0.1, dets, ctx);
    x += cmd.velocity.x * 0.1;
    ctx.pose.position.x = x;
    ctx.pose.position.z += cmd.velocity.z * 0.1;
    ctx.height_above_ground = ctx.pose.position.z;
    if (cmd.blanket == fire::BlanketRelease::Unroll) {
      saw_unroll = true;
      unroll_time = ctx.time;
      CHECK(!saw_drop);
    }
    if (cmd.blanket == fire::BlanketRelease::Drop) {
      saw_drop = true;
      drop_time = ctx.time;
      CHECK(saw_unroll);
    }
  }
  CHECK(proc.phase() == ProcedurePhase::Succeeded);
  CHECK(saw_unroll);
  CHECK(saw_drop);
  CHECK(unroll_time < drop_time);
  // Descend happened before the deployment.
  const auto phases = proc.events().of_kind("phase");
  REQUIRE(!phases.empty());
  std::string order;
  for (const auto& e : phases) order += e.detail + ";";
  CHECK(order.find("Above->Descend") != std::string::npos);
  CHECK(order.find("Descend->BackUntilLost") != std::string::npos);
  CHECK(order.find("Unroll->ForwardOverFire") != std::string::npos);
  CHECK(order.find("DropWhenLost->Ascend") != std::string::npos);
  CHECK(order.find("Ascend->Succeeded") != std::string::npos);
}

TEST_CASE("blanket: never re-detecting on the forward pass aborts without drop") {
  ExtinguishConfig cfg;
  cfg.variant = ProcedureVariant::UavBlanket;
  cfg.zone = {39.5, 29.5, 8, 8};
  cfg.forward_distance_budget = 3.0;
  ExtinguishProcedure proc(cfg);

  ProcedureContext ctx = ctx_at(0.0, 1.0);
  ctx.pose = {{0, 0, 3.0}, 0.0};
  ctx.height_above_ground = 3.0;
  double x = 0.0;
  bool dropped = false;
  int seen_phase_forward = 0;
  for (int i = 0; i < 4000 && !proc.terminal(); ++i) {
    ctx.time = i * 0.1;
    std::vector<FireDetection2D> dets;
    // Fire visible only while hovering/backing; never on the forward pass.
    const bool before_unroll =
        proc.phase() == ProcedurePhase::Above ||
        proc.phase() == ProcedurePhase::Descend ||
        proc.phase() == ProcedurePhase::Confirming;
    if (before_unroll && std::abs(x) < 0.5)
      dets.push_back(det_at(39.5, 29.5));
    if (proc.phase() == ProcedurePhase::ForwardOverFire) ++seen_phase_forward;
    const auto cmd = proc.step(0.1, dets, ctx);
    x += cmd.velocity.x * 0.1;
    ctx.pose.position.x = x;
    ctx.pose.position.z += cmd.velocity.z * 0.1;
    ctx.height_above_ground = ctx.pose.position.z;
    if (cmd.blanket == fire::BlanketRelease::Drop) dropped = true;
  }
  CHECK(proc.phase() == ProcedurePhase::Aborted);
  CHECK(seen_phase_forward > 0);
  CHECK(!dropped);
}

TEST_CASE("closed-loop centering: centroid reaches the zone within 10 s") {
  // Real renderer in the loop: UGV pan&tilt servo over a live image.
  std::vector<Vec3> pts;
  sim::sample_box(pts, {-8, -8, 0}, {8, 8, 0.05}, 0.1);
  sim::World world(world::PointMap(pts), 0.2, 5, {});
  sim::RobotState ugv;
  ugv.id = "ugv";
  ugv.kind = sim::RobotKind::Ugv;
  ugv.pose = {{0, 0, 0}, 0.0};
  world.add_robot(ugv);
  sim::FireSource fire_src;
  fire_src.kind = sim::FireKind::IndoorFloor;
  fire_src.position = {1.9, 0.55, 1.0};  // off-center but inside the FOV
  fire_src.facing_yaw = kPi;
  world.add_fire(fire_src);

  sim::ThermalConfig tc;
  tc.mount = sim::ThermalMount::PanTilt;
  ExtinguishConfig cfg = ugv_config();
  ExtinguishProcedure proc(cfg);

  bool reached = false;
  for (int i = 0; i < 100 && !reached; ++i) {  // 10 s at 10 Hz
    const auto cam = sim::thermal_camera_pose(world.robot(0), tc);
    const auto img = sim::simulate_thermal(world, cam, tc, i * 0.1);
    const auto dets = fire::segment_fire(img, 60.0, 4);
    ProcedureContext ctx = ctx_at(i * 0.1, 3.0);
    ctx.pan = world.robot(0).pan_tilt.pan;
    ctx.tilt = world.robot(0).pan_tilt.tilt;
    const auto cmd = proc.step(0.1, dets, ctx);
    sim::RobotCommand rc;
    rc.pan_rate = cmd.pan_rate;
    rc.tilt_rate = cmd.tilt_rate;
    for (int k = 0; k < 2; ++k)
      world.step(0.05, std::span<const sim::RobotCommand>(&rc, 1));
    if (!dets.empty() && cfg.zone.contains(dets[0].u, dets[0].v))
      reached = true;
  }
  CHECK(reached);
}

TEST_CASE("procedures always reach a terminal state within the time budget") {
  // Adversarial detection streams must not livelock the state machine.
  Rng rng(99);
  for (const auto variant :
       {ProcedureVariant::UgvWater, ProcedureVariant::UavFacadeWater,
        ProcedureVariant::UavIndoorWater, ProcedureVariant::UavBlanket}) {
    ExtinguishConfig cfg;
    cfg.variant = variant;
    cfg.zone = {39.5, 29.5, 10, 10};
    cfg.time_budget = 60.0;
    ExtinguishProcedure proc(cfg);
    ProcedureContext ctx = ctx_at(0.0, 0.5);
    ctx.pose = {{0, 0, 2.0}, 0};
    ctx.height_above_ground = 2.0;
    int steps = 0;
    while (!proc.terminal() && steps < 7000) {
      std::vector<FireDetection2D> dets;
      if (rng.uniform() < 0.5)
        dets.push_back(det_at(rng.uniform(0, 79), rng.uniform(0, 59)));
      ctx.time = steps * 0.1;
      proc.step(0.1, dets, ctx);
      ++steps;
    }
    CHECK(proc.terminal());
    CHECK(steps * 0.1 <= cfg.time_budget + 1.0);
  }
}
