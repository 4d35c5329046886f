#include "firenav/mission/agent.hpp"

#include <chrono>
#include <cmath>
#include <sstream>

namespace firenav::mission {

namespace {

constexpr int kLidarEvery = 2;    // 10 Hz at dt = 0.05
constexpr int kGpsEvery = 4;      // 5 Hz
constexpr int kThermalEvery = 2;  // 10 Hz
constexpr int kBtEvery = 2;       // 10 Hz
constexpr int kLocalPlanEvery = 4;  // 5 Hz

std::vector<Vec3> parse_waypoint_list(const std::string& text) {
  std::vector<Vec3> out;
  std::stringstream ss(text);
  std::string triple;
  while (std::getline(ss, triple, '|')) {
    std::stringstream ts(triple);
    std::string coord;
    Vec3 p;
    int i = 0;
    while (std::getline(ts, coord, ',') && i < 3) {
      const double v = std::stod(coord);
      if (i == 0) p.x = v;
      if (i == 1) p.y = v;
      if (i == 2) p.z = v;
      ++i;
    }
    if (i == 3) out.push_back(p);
  }
  return out;
}

double clamp_mag(double v, double lim) {
  return v > lim ? lim : (v < -lim ? -lim : v);
}

}  // namespace

SharedFields build_shared_fields(const sim::World& world, double sigma,
                                 double truncation, double distance_clamp) {
  return SharedFields{
      world::LikelihoodField::build(world.grid(), sigma, truncation),
      world::DistanceField::build(world.grid(), distance_clamp)};
}

RobotAgent::RobotAgent(sim::World& world, int robot_index, sim::RobotSpec spec,
                       const SharedFields& fields, uint64_t seed)
    : world_(world),
      robot_index_(robot_index),
      spec_(std::move(spec)),
      fields_(fields),
      lidar_rng_(seed ^ 0x11a5ULL),
      gps_rng_(seed ^ 0x29b7ULL),
      odom_rng_(seed ^ 0x3d31ULL),
      compass_rng_(seed ^ 0x4ef3ULL),
      altimeter_rng_(seed ^ 0x5c0dULL),
      filter_(spec_.mcl, seed ^ 0x6ab1ULL) {
  const Pose init = truth().pose;
  const double z_spread = spec_.kind == sim::RobotKind::Ugv ? 0.0 : 0.05;
  filter_.initialize(init, {0.1, 0.1, z_spread, 0.05});
  estimate_ = filter_.estimate();
  prev_truth_ = init;
  latest_compass_ = init.yaw;
  latest_altimeter_ = init.position.z;
}

void RobotAgent::load_mission() {
  if (spec_.mission_file.empty()) return;
  tree_ = bt::parse_tree(spec_.mission_file);
}

void RobotAgent::sense(double dt) {
  const sim::RobotState& r = truth();

  // Odometry every step feeds the prediction.
  const sim::OdomIncrement inc = sim::simulate_odometry(
      prev_truth_, r.pose, spec_.rig.odom, dt, odom_rng_);
  filter_.predict({inc.dx, inc.dy, inc.dz, inc.dyaw});
  prev_truth_ = r.pose;

  latest_compass_ =
      sim::simulate_compass(r.pose, spec_.rig.compass_noise, compass_rng_);
  latest_altimeter_ =
      sim::simulate_altimeter(r.pose, spec_.rig.altimeter_noise,
                              altimeter_rng_);

  if (step_count_ % kLidarEvery == 0)
    cloud_body_ = sim::simulate_lidar(world_, r.pose, spec_.rig.lidar,
                                      lidar_rng_);
  if (step_count_ % kGpsEvery == 0)
    latest_gps_ = sim::simulate_gps(r.pose, spec_.rig.gps, world_.time(),
                                    gps_rng_);

  if (filter_.should_update() && !cloud_body_.empty()) {
    filter_.update(cloud_body_, fields_.likelihood, 0.0, 0.0,
                   spec_.mcl.use_gps ? latest_gps_ : std::nullopt,
                   latest_altimeter_, latest_compass_);
    for (const auto& e : filter_.events().events())
      world_.events().emit(world_.time(), spec_.id, e.kind, e.detail);
    filter_.events().clear();
  }
  estimate_ = filter_.estimate();
}

std::vector<Vec3> RobotAgent::cloud_in_map() const {
  std::vector<Vec3> out;
  out.reserve(cloud_body_.size());
  for (const auto& p : cloud_body_)
    out.push_back(body_to_map(estimate_.pose, p));
  return out;
}

void RobotAgent::update_perception() {
  bool need = false;
  for (const auto& t : tasks_)
    if (t.status == bt::TaskStatus::Active &&
        (t.kind == "FireDetection3D" || t.kind == "FireExtinguish"))
      need = true;
  if (!need) {
    have_primary_ = have_nadir_ = false;
    det_primary_.clear();
    det_nadir_.clear();
    return;
  }

  // The camera senses reality, so the image renders from the true pose;
  // the attached pose is the estimated one, which is all the robot can
  // know when it back-projects detections into the map.
  sim::RobotState est_state = truth();
  est_state.pose = estimate_.pose;

  const auto cam = sim::thermal_camera_pose(truth(), spec_.rig.thermal);
  image_primary_ =
      sim::simulate_thermal(world_, cam, spec_.rig.thermal, world_.time());
  image_primary_.pose = sim::thermal_camera_pose(est_state, spec_.rig.thermal);
  det_primary_ = fire::segment_fire(image_primary_, spec_.detect_threshold,
                                    spec_.min_blob_pixels);
  have_primary_ = true;

  if (spec_.rig.thermal_nadir) {
    const auto nadir_cam =
        sim::thermal_camera_pose(truth(), *spec_.rig.thermal_nadir);
    image_nadir_ = sim::simulate_thermal(world_, nadir_cam,
                                         *spec_.rig.thermal_nadir,
                                         world_.time());
    image_nadir_.pose =
        sim::thermal_camera_pose(est_state, *spec_.rig.thermal_nadir);
    det_nadir_ = fire::segment_fire(image_nadir_, spec_.detect_threshold,
                                    spec_.min_blob_pixels);
    have_nadir_ = true;
  }
}

const std::vector<fire::FireDetection2D>& RobotAgent::detections_for(
    const std::string& camera) const {
  if (camera == "nadir" && spec_.rig.thermal_nadir) return det_nadir_;
  return det_primary_;
}

const fire::ThermalImage* RobotAgent::image_for(
    const std::string& camera) const {
  if (camera == "nadir" && spec_.rig.thermal_nadir)
    return have_nadir_ ? &image_nadir_ : nullptr;
  return have_primary_ ? &image_primary_ : nullptr;
}

sim::RobotCommand RobotAgent::tick(double dt) {
  sense(dt);

  const bool started = world_.time() + 1e-9 >= spec_.start_time;
  if (step_count_ % kThermalEvery == 0) update_perception();

  if (tree_ && started && !mission_done_ && step_count_ % kBtEvery == 0) {
    bt::TickContext ctx;
    ctx.blackboard = &blackboard_;
    ctx.tasks = this;
    ctx.log = &world_.events();
    ctx.time = world_.time();
    ctx.robot = spec_.id;
    const bt::NodeStatus s = tree_->tick(ctx);
    if (s != bt::NodeStatus::Running) {
      mission_done_ = true;
      mission_status_ = s;
      world_.events().emit(world_.time(), spec_.id, "mission_end",
                           bt::to_string(s));
    }
  }

  sim::RobotCommand cmd = update_tasks(dt);
  ++step_count_;

  const bool ejecting = cmd.eject_water;
  if (ejecting != was_ejecting_) {
    world_.events().emit(world_.time(), spec_.id,
                         ejecting ? "eject_start" : "eject_stop", "");
    was_ejecting_ = ejecting;
  }
  return cmd;
}

sim::RobotCommand RobotAgent::update_tasks(double dt) {
  for (auto& task : tasks_) {
    if (task.status != bt::TaskStatus::Active) continue;
    task.task_time += dt;
    if (task.kind == "GoToGoal") update_goto(task, dt);
    else if (task.kind == "TakeOff") update_takeoff(task, dt);
    else if (task.kind == "Land") update_land(task, dt);
    else if (task.kind == "FireDetection3D") update_detection(task, dt);
    else if (task.kind == "FireExtinguish") update_extinguish(task, dt);
  }

  // Highest-priority active motion source wins.
  const ActiveTask* chosen = nullptr;
  auto rank = [](const std::string& kind) {
    if (kind == "FireExtinguish") return 3;
    if (kind == "GoToGoal") return 2;
    if (kind == "TakeOff" || kind == "Land") return 1;
    return 0;
  };
  for (const auto& task : tasks_) {
    if (task.status != bt::TaskStatus::Active || rank(task.kind) == 0)
      continue;
    if (!chosen || rank(task.kind) > rank(chosen->kind)) chosen = &task;
  }
  return chosen ? chosen->held_command : sim::RobotCommand{};
}

int RobotAgent::start(const std::string& task, const bt::ResolvedParams& params,
                      bt::TickContext& ctx) {
  ActiveTask at;
  at.handle = next_handle_++;
  at.kind = task;
  at.params = params;

  if (task == "TakeOff") {
    at.target_height = params.number_or("height", 3.0);
    const bool uav = spec_.kind == sim::RobotKind::Uav;
    const bool on_ground = truth().pose.position.z < 0.2;
    if (!uav || !on_ground) at.status = bt::TaskStatus::Canceled;
  } else if (task == "Land") {
    const bool uav = spec_.kind == sim::RobotKind::Uav;
    if (!uav || truth().pose.position.z < 0.15)
      at.status = bt::TaskStatus::Canceled;  // ground robot / already landed
  } else if (task == "GoToGoal") {
    if (params.strings.count("path")) {
      at.goals = parse_waypoint_list(params.strings.at("path"));
    } else {
      at.goals.push_back({params.number_or("x", 0.0),
                          params.number_or("y", 0.0),
                          params.number_or("z", 0.0)});
    }
    if (params.numbers.count("yaw")) {
      at.final_yaw = params.numbers.at("yaw");
      at.hold_yaw = spec_.kind == sim::RobotKind::Uav;
    }
    if (at.goals.empty()) at.status = bt::TaskStatus::Canceled;
  } else if (task == "FireDetection3D") {
    at.duration = params.number_or("duration", 60.0);
    at.camera = params.string_or("camera", "primary");
    ctx.blackboard->set("fd_found", false);
    ctx.emit("blackboard_write", "fd_found=false");
  } else if (task == "FireExtinguish") {
    fire::ExtinguishConfig cfg = spec_.extinguish;
    const std::string variant = params.string_or(
        "variant", spec_.kind == sim::RobotKind::Ugv ? "ugv" : "facade");
    if (variant == "ugv") cfg.variant = fire::ProcedureVariant::UgvWater;
    else if (variant == "facade") cfg.variant = fire::ProcedureVariant::UavFacadeWater;
    else if (variant == "indoor") cfg.variant = fire::ProcedureVariant::UavIndoorWater;
    else if (variant == "blanket") cfg.variant = fire::ProcedureVariant::UavBlanket;
    at.camera = variant == "blanket" ? "nadir" : "primary";
    const sim::ThermalConfig& tc =
        at.camera == "nadir" && spec_.rig.thermal_nadir
            ? *spec_.rig.thermal_nadir
            : spec_.rig.thermal;
    // Lock-on zone centered where the stream crosses the image: nozzle and
    // camera are co-axial in this model, so that is the principal point.
    // Its extent is the angular slack that keeps the stream on the target
    // disc at attack distance, less the cross-sweep amplitude.
    cfg.zone.cu = (tc.width - 1) / 2.0;
    cfg.zone.cv = (tc.height - 1) / 2.0;
    const double fx = sim::thermal_intrinsics(tc).fx;
    const double sweep = cfg.variant == fire::ProcedureVariant::UgvWater
                             ? cfg.cross_amplitude
                             : 0.0;
    const double allowed = std::max(
        0.025,
        std::atan2(cfg.target_radius, cfg.attack_distance) - sweep - 0.02);
    cfg.zone.half_u = cfg.zone.half_v =
        std::max(2.0, fx * std::tan(allowed));
    at.procedure = std::make_unique<fire::ExtinguishProcedure>(cfg);
  } else {
    ctx.emit("bt_error", "unknown task: " + task);
    at.status = bt::TaskStatus::Aborted;
  }

  if (at.status != bt::TaskStatus::Active)
    ctx.emit("task_status", task + " " + bt::to_string(at.status) +
                                " (at start)");
  tasks_.push_back(std::move(at));
  return tasks_.back().handle;
}

bt::TaskStatus RobotAgent::poll(int handle) {
  for (const auto& t : tasks_)
    if (t.handle == handle) return t.status;
  return bt::TaskStatus::Aborted;
}

void RobotAgent::preempt(int handle) {
  for (auto& t : tasks_)
    if (t.handle == handle && t.status == bt::TaskStatus::Active) {
      t.status = bt::TaskStatus::Preempted;
      t.held_command = {};
    }
}

std::optional<Vec3> RobotAgent::plan_start() const {
  // Snap an estimate stuck inside inflated space to nearby free space.
  const Vec3 pos = estimate_.pose.position;
  if (fields_.distance.at_point(pos) >= spec_.planner.inflation_radius)
    return pos;
  const double res = world_.grid().resolution();
  for (int ring = 1; ring <= 5; ++ring) {
    for (int dz = -ring; dz <= ring; ++dz)
      for (int dy = -ring; dy <= ring; ++dy)
        for (int dx = -ring; dx <= ring; ++dx) {
          if (std::max({std::abs(dx), std::abs(dy), std::abs(dz)}) != ring)
            continue;
          const Vec3 cand{pos.x + dx * res, pos.y + dy * res,
                          pos.z + dz * res};
          if (fields_.distance.at_point(cand) >=
              spec_.planner.inflation_radius)
            return cand;
        }
  }
  return std::nullopt;
}

void RobotAgent::update_goto(ActiveTask& task, double dt) {
  const double timeout = task.params.number_or("timeout", 300.0);
  if (task.task_time > timeout) {
    task.status = bt::TaskStatus::Aborted;
    task.held_command = {};
    return;
  }

  const Vec3 goal = task.goals[task.goal_index];
  const bool ugv = spec_.kind == sim::RobotKind::Ugv;
  const Vec3 pos = estimate_.pose.position;
  const double dist_to_goal =
      ugv ? Vec3{goal.x - pos.x, goal.y - pos.y, 0.0}.norm()
          : (goal - pos).norm();

  if (!task.have_global) {
    const auto start = plan_start();
    if (!start) {
      task.status = bt::TaskStatus::Canceled;
      return;
    }
    try {
      task.global_path = plan::plan(world_.grid(), fields_.distance, *start,
                                    goal, spec_.planner);
      task.have_global = true;
      task.have_local = false;
    } catch (const std::runtime_error&) {
      // No path to the waypoint.
      task.status = task.global_replans == 0 ? bt::TaskStatus::Canceled
                                             : bt::TaskStatus::Aborted;
      task.held_command = {};
      return;
    }
  }

  if (task.aligning || dist_to_goal <= spec_.planner.goal_tolerance) {
    if (task.goal_index + 1 < task.goals.size()) {
      ++task.goal_index;
      task.have_global = false;
      return;
    }
    if (task.final_yaw && !task.hold_yaw) {
      task.aligning = true;
      const double err = wrap_angle(*task.final_yaw - estimate_.pose.yaw);
      if (std::abs(err) > 0.08) {
        sim::RobotCommand cmd;
        cmd.yaw_rate = clamp_mag(1.5 * err, 0.6);
        task.held_command = cmd;
        return;
      }
    }
    task.status = bt::TaskStatus::Succeeded;
    task.held_command = {};
    return;
  }

  // Local replanning at its own rate over the latest cloud.
  if (!task.have_local || step_count_ % kLocalPlanEvery == 0) {
    const auto cloud = cloud_in_map();
    const auto t0 = std::chrono::steady_clock::now();
    try {
      plan::LocalPlannerConfig lcfg = spec_.local;
      lcfg.planner = spec_.planner;
      task.local_path =
          plan::plan_local(cloud, task.global_path, estimate_.pose, lcfg);
      task.have_local = true;
      task.blocked_time = 0.0;
    } catch (const std::runtime_error& e) {
      if (task.blocked_time == 0.0)
        world_.events().emit(world_.time(), spec_.id, "local_plan_blocked",
                             e.what());
      task.have_local = false;
      task.blocked_time += dt * kLocalPlanEvery;
      if (task.blocked_time > 5.0) {
        // Re-plan globally from here; give up after repeated failures.
        task.have_global = false;
        task.blocked_time = 0.0;
        if (++task.global_replans > 3) {
          task.status = bt::TaskStatus::Aborted;
          task.held_command = {};
          return;
        }
      }
    }
    const auto t1 = std::chrono::steady_clock::now();
    local_plan_ms_.push_back(
        std::chrono::duration<double, std::milli>(t1 - t0).count());
  }

  if (!task.have_local) {
    task.held_command = {};  // hold position
    return;
  }

  sim::RobotCommand cmd;
  if (ugv) {
    const auto uc = track::pure_pursuit(task.local_path.waypoints,
                                        estimate_.pose, spec_.pure_pursuit);
    cmd.velocity.x = uc.v;
    cmd.yaw_rate = uc.omega;
  } else {
    // Saturated proportional toward a point one look-ahead along the local
    // path (falls back to the local goal).
    Vec3 target = task.local_path.waypoints.back();
    double along = 0.0;
    for (std::size_t i = 0; i + 1 < task.local_path.waypoints.size(); ++i) {
      const Vec3 a = task.local_path.waypoints[i];
      const Vec3 b = task.local_path.waypoints[i + 1];
      const double len = (b - a).norm();
      if (along + len >= 1.0) {
        target = a + (b - a) * ((1.0 - along) / len);
        break;
      }
      along += len;
    }
    double desired_yaw = estimate_.pose.yaw;
    if (task.hold_yaw && task.final_yaw) {
      desired_yaw = *task.final_yaw;
    } else {
      const Vec3 d = target - pos;
      if (d.norm_xy() > 0.3) desired_yaw = std::atan2(d.y, d.x);
    }
    const auto uc = track::saturated_proportional(target, estimate_.pose,
                                                  desired_yaw,
                                                  spec_.proportional);
    cmd.velocity = uc.velocity;
    cmd.yaw_rate = uc.yaw_rate;
  }
  task.held_command = cmd;
}

void RobotAgent::update_takeoff(ActiveTask& task, double dt) {
  (void)dt;
  if (task.task_time > 60.0) {
    task.status = bt::TaskStatus::Aborted;
    task.held_command = {};
    return;
  }
  const double z = estimate_.pose.position.z;
  if (z >= task.target_height - 0.15) {
    task.status = bt::TaskStatus::Succeeded;
    task.held_command = {};
    return;
  }
  sim::RobotCommand cmd;
  cmd.velocity.z = clamp_mag(1.2 * (task.target_height - z),
                             spec_.proportional.max_speed_z);
  task.held_command = cmd;
}

void RobotAgent::update_land(ActiveTask& task, double dt) {
  (void)dt;
  if (task.task_time > 60.0) {
    task.status = bt::TaskStatus::Aborted;
    task.held_command = {};
    return;
  }
  if (truth().pose.position.z <= 0.1) {
    task.status = bt::TaskStatus::Succeeded;
    task.held_command = {};
    return;
  }
  sim::RobotCommand cmd;
  cmd.velocity.z = -0.5;
  task.held_command = cmd;
}

void RobotAgent::update_detection(ActiveTask& task, double dt) {
  (void)dt;
  if (step_count_ % kThermalEvery != 0) return;
  if (task.task_time > task.duration) {
    task.status = bt::TaskStatus::Aborted;
    return;
  }
  const auto& dets = detections_for(task.camera);
  const fire::ThermalImage* img = image_for(task.camera);
  if (dets.empty() || !img) return;

  const fire::FireDetection2D& det = dets.front();
  fire::RangeConfig rcfg = spec_.range;
  rcfg.nadir = task.camera == "nadir" ||
               spec_.rig.thermal.mount == sim::ThermalMount::Nadir;
  try {
    const auto range =
        fire::estimate_range(det, *img, cloud_in_map(), world_.grid(), rcfg);
    const auto meas = fire::back_project(det, *img, range);
    task.track.fuse(meas.position, meas.covariance);
    std::ostringstream detail;
    detail.precision(3);
    detail << std::fixed << "u=" << det.u << " v=" << det.v
           << " px=" << det.pixel_count << " x=" << meas.position.x
           << " y=" << meas.position.y << " z=" << meas.position.z;
    world_.events().emit(world_.time(), spec_.id, "detection", detail.str());
  } catch (const std::runtime_error&) {
    return;  // no range this frame; keep exploring
  }

  if (fire::confirmed(task.track, spec_.confirm)) {
    const Vec3 mean = task.track.mean();
    blackboard_.set("fd_found", true);
    blackboard_.set("fd_x", mean.x);
    blackboard_.set("fd_y", mean.y);
    blackboard_.set("fd_z", mean.z);
    std::ostringstream detail;
    detail.precision(3);
    detail << std::fixed << "fd=(" << mean.x << "," << mean.y << ","
           << mean.z << ")";
    world_.events().emit(world_.time(), spec_.id, "blackboard_write",
                         detail.str());
    task.status = bt::TaskStatus::Succeeded;
  }
}

void RobotAgent::update_extinguish(ActiveTask& task, double dt) {
  if (step_count_ % kThermalEvery != 0) return;
  const double step_dt = dt * kThermalEvery;

  fire::ProcedureContext ctx;
  ctx.pose = estimate_.pose;
  ctx.pan = truth().pan_tilt.pan;
  ctx.tilt = truth().pan_tilt.tilt;
  ctx.water_remaining = truth().water_remaining;
  ctx.height_above_ground = estimate_.pose.position.z;
  ctx.time = world_.time();

  const auto& dets = detections_for(task.camera);
  const fire::ProcedureCommand pc = task.procedure->step(step_dt, dets, ctx);

  // Forward new procedure events into the mission log.
  const auto& events = task.procedure->events().events();
  for (; task.procedure_events_seen < events.size();
       ++task.procedure_events_seen) {
    const auto& e = events[task.procedure_events_seen];
    world_.events().emit(e.time, spec_.id, e.kind, e.detail);
  }

  sim::RobotCommand cmd;
  cmd.velocity = pc.velocity;
  cmd.yaw_rate = pc.yaw_rate;
  cmd.pan_rate = pc.pan_rate;
  cmd.tilt_rate = pc.tilt_rate;
  cmd.eject_water = pc.eject;
  if (pc.blanket) {
    cmd.blanket_op = *pc.blanket == fire::BlanketRelease::Unroll
                         ? sim::BlanketOp::Unroll
                         : sim::BlanketOp::Drop;
  }
  task.held_command = cmd;

  if (task.procedure->terminal()) {
    task.status = task.procedure->phase() == fire::ProcedurePhase::Succeeded
                      ? bt::TaskStatus::Succeeded
                      : bt::TaskStatus::Aborted;
    task.held_command = {};
  }
}

}  // namespace firenav::mission
