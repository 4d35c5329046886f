#pragma once

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "firenav/bt/bt.hpp"
#include "firenav/bt/parser.hpp"
#include "firenav/fire/estimator.hpp"
#include "firenav/fire/extinguish.hpp"
#include "firenav/mcl/mcl.hpp"
#include "firenav/plan/local_planner.hpp"
#include "firenav/sim/scenario.hpp"
#include "firenav/sim/sensors.hpp"
#include "firenav/sim/world.hpp"

namespace firenav::mission {

/// Precomputed map products shared by every robot of a run.
struct SharedFields {
  world::LikelihoodField likelihood;
  world::DistanceField distance;
};

SharedFields build_shared_fields(const sim::World& world, double sigma,
                                 double truncation, double distance_clamp);

/// Closed-loop stack of one robot: sensor simulation feeding MCL, the
/// behavior tree ticking atomic tasks, tasks driving planners, trackers and
/// extinguishing procedures, all reduced to one actuation command per step.
class RobotAgent : public bt::TaskRuntime {
 public:
  RobotAgent(sim::World& world, int robot_index, sim::RobotSpec spec,
             const SharedFields& fields, uint64_t seed);

  /// Parses and installs the mission tree (no-op when the spec names none).
  void load_mission();

  /// One simulation step: sense, localize, tick the tree at its own rate,
  /// advance active tasks. Returns this step's actuation command.
  sim::RobotCommand tick(double dt);

  bool mission_loaded() const { return tree_ != nullptr; }
  bool mission_done() const { return mission_done_; }
  bt::NodeStatus mission_status() const { return mission_status_; }
  const std::string& id() const { return spec_.id; }
  const mcl::PoseEstimate& estimate() const { return estimate_; }
  const bt::Blackboard& blackboard() const { return blackboard_; }
  const std::vector<double>& local_plan_millis() const {
    return local_plan_ms_;
  }

  // bt::TaskRuntime
  int start(const std::string& task, const bt::ResolvedParams& params,
            bt::TickContext& ctx) override;
  bt::TaskStatus poll(int handle) override;
  void preempt(int handle) override;

 private:
  struct ActiveTask {
    int handle = 0;
    std::string kind;
    bt::ResolvedParams params;
    bt::TaskStatus status = bt::TaskStatus::Active;
    double task_time = 0.0;

    // GoToGoal
    std::vector<Vec3> goals;
    std::size_t goal_index = 0;
    std::optional<double> final_yaw;
    bool hold_yaw = false;
    plan::Path global_path;
    bool have_global = false;
    plan::Path local_path;
    bool have_local = false;
    double blocked_time = 0.0;
    int global_replans = 0;
    bool aligning = false;

    // TakeOff / Land
    double target_height = 0.0;

    // FireDetection3D
    fire::FireEstimate3D track;
    double duration = 0.0;
    std::string camera;

    // FireExtinguish
    std::unique_ptr<fire::ExtinguishProcedure> procedure;
    std::size_t procedure_events_seen = 0;
    sim::RobotCommand held_command;
  };

  const sim::RobotState& truth() const { return world_.robot(robot_index_); }
  void sense(double dt);
  void update_perception();
  sim::RobotCommand update_tasks(double dt);

  void update_goto(ActiveTask& task, double dt);
  void update_takeoff(ActiveTask& task, double dt);
  void update_land(ActiveTask& task, double dt);
  void update_detection(ActiveTask& task, double dt);
  void update_extinguish(ActiveTask& task, double dt);

  const std::vector<fire::FireDetection2D>& detections_for(
      const std::string& camera) const;
  const fire::ThermalImage* image_for(const std::string& camera) const;
  std::vector<Vec3> cloud_in_map() const;
  std::optional<Vec3> plan_start() const;

  sim::World& world_;
  int robot_index_;
  sim::RobotSpec spec_;
  const SharedFields& fields_;

  Rng lidar_rng_, gps_rng_, odom_rng_, compass_rng_, altimeter_rng_;
  mcl::MclFilter filter_;
  mcl::PoseEstimate estimate_;
  Pose prev_truth_;
  bool first_tick_ = true;
  long step_count_ = 0;

  std::vector<Vec3> cloud_body_;
  double latest_compass_ = 0.0;
  double latest_altimeter_ = 0.0;
  std::optional<Vec3> latest_gps_;

  fire::ThermalImage image_primary_;
  fire::ThermalImage image_nadir_;
  std::vector<fire::FireDetection2D> det_primary_;
  std::vector<fire::FireDetection2D> det_nadir_;
  bool have_primary_ = false;
  bool have_nadir_ = false;

  std::unique_ptr<bt::BtNode> tree_;
  bt::Blackboard blackboard_;
  bool mission_done_ = false;
  bt::NodeStatus mission_status_ = bt::NodeStatus::Running;

  std::vector<ActiveTask> tasks_;
  int next_handle_ = 0;
  bool was_ejecting_ = false;

  std::vector<double> local_plan_ms_;
};

}  // namespace firenav::mission
