#pragma once

#include <memory>
#include <span>
#include <vector>

#include "firenav/core/events.hpp"
#include "firenav/core/rng.hpp"
#include "firenav/sim/types.hpp"
#include "firenav/world/point_map.hpp"
#include "firenav/world/voxel_grid.hpp"

namespace firenav::sim {

struct WorldConfig {
  double dt = 0.05;            // fixed integration step
  double ugv_max_speed = 0.7;  // m/s, ground platform limit
  double uav_max_speed = 4.0;
  double stream_reach = 2.0;      // straight water stream length
  double stream_jitter = 0.01745;  // rad (1 degree), per-axis aim noise
  double pump_flow = 1.0 / 60.0;   // liters per second
  double blanket_length = 1.8;     // along robot heading
  double blanket_width = 1.2;
  double blanket_forward_travel = 0.0;  // drop-offset along heading
  Vec3 wind;  // constant disturbance applied to UAVs
  double pan_limit = 2.6;
  double tilt_limit = 1.2;
};

/// Deterministic simulated arena: ground-truth robots, fires, static
/// geometry, and the water/blanket effect models. All mutation goes through
/// step()/apply-style members; sensor simulation lives in sensors.hpp as
/// pure functions of a snapshot.
class World {
 public:
  World(world::PointMap map, double grid_resolution, uint64_t seed,
        WorldConfig config = {});

  double time() const { return time_; }
  const WorldConfig& config() const { return config_; }
  WorldConfig& config() { return config_; }

  const world::PointMap& map() const { return map_; }
  const world::VoxelGrid& grid() const { return grid_; }

  int add_robot(RobotState robot);
  int add_fire(FireSource fire);

  std::span<const RobotState> robots() const { return robots_; }
  std::span<const FireSource> fires() const { return fires_; }
  RobotState& robot(int idx) { return robots_[idx]; }
  const RobotState& robot(int idx) const { return robots_[idx]; }
  FireSource& fire(int idx) { return fires_[idx]; }

  EventLog& events() { return events_; }
  const EventLog& events() const { return events_; }

  /// Advances the world by dt under one command per robot (same order as
  /// robots()). Kinematics are first-order; motion into occupied voxels
  /// stops at contact and emits a "collision" event.
  void step(double dt, std::span<const RobotCommand> commands);

  /// Water stream effect for one robot over dt; returns liters on target.
  /// Exposed for direct testing; step() calls it when eject_water is set.
  double apply_water(int robot_idx, double dt);

  /// Blanket state transition. Throws std::runtime_error("blanket not
  /// unrolled") on Drop before Unroll.
  void apply_blanket_op(int robot_idx, BlanketOp op);

  /// Aim direction of the extinguisher/thermal mount for a robot.
  Vec3 aim_direction(const RobotState& r) const;
  Vec3 nozzle_position(const RobotState& r) const;

  Rng& rng() { return rng_; }
  uint64_t seed() const { return seed_; }

 private:
  void integrate_robot(RobotState& r, const RobotCommand& cmd, double dt);

  world::PointMap map_;
  world::VoxelGrid grid_;
  WorldConfig config_;
  double time_ = 0.0;
  std::vector<RobotState> robots_;
  std::vector<FireSource> fires_;
  EventLog events_;
  uint64_t seed_;
  Rng rng_;
  std::vector<Rng> water_rngs_;  // one per robot, order-independent streams
};

/// Area fraction of a fire disc covered by an axis-of-heading rectangle
/// dropped flat on the ground. Pure helper, supersampled.
double disc_rectangle_coverage(const Vec3& disc_center, double disc_radius,
                               const Vec3& rect_center, double rect_len,
                               double rect_wid, double rect_yaw);

}  // namespace firenav::sim
