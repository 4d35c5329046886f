#include "firenav/sim/world.hpp"

#include <cmath>
#include <stdexcept>

#include "firenav/world/raycast.hpp"

namespace firenav::sim {

namespace {
// Collision probe sits above the pose reference so ground-plane voxels do
// not trap robots driving on them.
constexpr double kCollisionProbeHeight = 0.3;
constexpr double kNozzleHeightUgv = 0.55;
constexpr double kNozzleHeightUav = 0.0;
}  // namespace

World::World(world::PointMap map, double grid_resolution, uint64_t seed,
             WorldConfig config)
    : map_(std::move(map)),
      grid_(world::VoxelGrid::build(map_, grid_resolution)),
      config_(config),
      seed_(seed),
      rng_(seed) {}

int World::add_robot(RobotState robot) {
  robots_.push_back(std::move(robot));
  water_rngs_.push_back(
      Rng(seed_ ^ (0xabcd1234u + 17u * robots_.size())));
  return static_cast<int>(robots_.size()) - 1;
}

int World::add_fire(FireSource fire) {
  fires_.push_back(std::move(fire));
  return static_cast<int>(fires_.size()) - 1;
}

Vec3 World::aim_direction(const RobotState& r) const {
  if (r.kind == RobotKind::Ugv)
    return direction_from_yaw_pitch(r.pose.yaw + r.pan_tilt.pan,
                                    r.pan_tilt.tilt);
  return direction_from_yaw_pitch(r.pose.yaw, 0.0);
}

Vec3 World::nozzle_position(const RobotState& r) const {
  const double h =
      r.kind == RobotKind::Ugv ? kNozzleHeightUgv : kNozzleHeightUav;
  return r.pose.position + Vec3{0.0, 0.0, h};
}

void World::integrate_robot(RobotState& r, const RobotCommand& cmd,
                            double dt) {
  r.velocity_cmd = cmd.velocity;
  r.yaw_rate_cmd = cmd.yaw_rate;

  const double c = std::cos(r.pose.yaw), s = std::sin(r.pose.yaw);
  Vec3 v_map{cmd.velocity.x * c - cmd.velocity.y * s,
             cmd.velocity.x * s + cmd.velocity.y * c, cmd.velocity.z};

  if (r.kind == RobotKind::Ugv) {
    v_map.z = 0.0;
    const double speed = v_map.norm_xy();
    if (speed > config_.ugv_max_speed)
      v_map = v_map * (config_.ugv_max_speed / speed);
  } else {
    const double speed = v_map.norm();
    if (speed > config_.uav_max_speed)
      v_map = v_map * (config_.uav_max_speed / speed);
    v_map += config_.wind;
  }

  const Vec3 start = r.pose.position;
  const Vec3 target = start + v_map * dt;
  const double dist = (target - start).norm();
  Vec3 final_pos = target;
  if (dist > 1e-12) {
    // Walk the motion segment in sub-resolution steps; stop at contact.
    const int n =
        std::max(1, static_cast<int>(std::ceil(dist / (grid_.resolution() / 4.0))));
    Vec3 ok = start;
    bool collided = false;
    for (int i = 1; i <= n; ++i) {
      const double f = static_cast<double>(i) / n;
      Vec3 p = start + (target - start) * f;
      Vec3 probe = p + Vec3{0.0, 0.0, kCollisionProbeHeight};
      if (grid_.occupied_at(probe)) {
        collided = true;
        break;
      }
      ok = p;
    }
    final_pos = ok;
    if (collided) {
      ++r.collisions;
      events_.emit(time_, r.id, "collision", "motion stopped at contact");
    }
  }

  if (r.kind == RobotKind::Ugv) final_pos.z = 0.0;  // ground constraint
  if (r.kind == RobotKind::Uav && final_pos.z < 0.0) final_pos.z = 0.0;

  r.distance_traveled += (final_pos - r.pose.position).norm();
  r.pose.position = final_pos;
  r.pose.yaw = wrap_angle(r.pose.yaw + cmd.yaw_rate * dt);

  if (r.kind == RobotKind::Ugv) {
    auto clamp = [](double v, double lim) {
      return v > lim ? lim : (v < -lim ? -lim : v);
    };
    r.pan_tilt.pan =
        clamp(r.pan_tilt.pan + cmd.pan_rate * dt, config_.pan_limit);
    r.pan_tilt.tilt =
        clamp(r.pan_tilt.tilt + cmd.tilt_rate * dt, config_.tilt_limit);
  }
}

void World::step(double dt, std::span<const RobotCommand> commands) {
  if (dt <= 0.0) throw std::invalid_argument("dt must be > 0");
  if (commands.size() != robots_.size())
    throw std::invalid_argument("one command per robot required");

  for (std::size_t i = 0; i < robots_.size(); ++i) {
    integrate_robot(robots_[i], commands[i], dt);
    if (commands[i].blanket_op)
      apply_blanket_op(static_cast<int>(i), *commands[i].blanket_op);
    if (commands[i].eject_water) apply_water(static_cast<int>(i), dt);
  }
  time_ += dt;
}

double World::apply_water(int robot_idx, double dt) {
  RobotState& r = robots_[robot_idx];
  const double amount = std::min(config_.pump_flow * dt, r.water_remaining);
  if (amount <= 0.0) return 0.0;  // empty tank ejects nothing
  r.water_remaining -= amount;
  r.water_dispensed += amount;

  Vec3 dir = aim_direction(r);
  Rng& wr = water_rngs_[robot_idx];
  // Small aim jitter about two axes perpendicular to the stream.
  const double a1 = wr.gaussian(0.0, config_.stream_jitter);
  const double a2 = wr.gaussian(0.0, config_.stream_jitter);
  Vec3 up{0.0, 0.0, 1.0};
  Vec3 side = dir.cross(up);
  if (side.norm() < 1e-6) side = Vec3{1.0, 0.0, 0.0};
  side = side.normalized();
  const Vec3 vert = side.cross(dir).normalized();
  dir = (dir + side * a1 + vert * a2).normalized();

  const Vec3 nozzle = nozzle_position(r);

#ifdef FIRENAV_WATER_DEBUG
  {
    static int dbg_count = 0;
    if (dbg_count++ % 20 == 0) {
      std::fprintf(stderr,
                   "[water] t=%.1f nozzle (%.2f,%.2f,%.2f) dir (%.3f,%.3f,%.3f)"
                   " pan %.3f tilt %.3f yaw %.3f\n",
                   time_, nozzle.x, nozzle.y, nozzle.z, dir.x, dir.y, dir.z,
                   r.pan_tilt.pan, r.pan_tilt.tilt, r.pose.yaw);
    }
  }
#endif

  // Nearest fire disc pierced by the stream segment.
  int best = -1;
  double best_t = config_.stream_reach;
  for (std::size_t f = 0; f < fires_.size(); ++f) {
    const FireSource& fire = fires_[f];
    const Vec3 n = fire.normal();
    const double denom = dir.dot(n);
    if (std::abs(denom) < 1e-9) continue;
    const double t = (fire.position - nozzle).dot(n) / denom;
    if (t < 0.0 || t > best_t) continue;
    const Vec3 q = nozzle + dir * t;
    if ((q - fire.position).norm() <= fire.radius) {
      best = static_cast<int>(f);
      best_t = t;
    }
  }
#ifdef FIRENAV_WATER_DEBUG
  if (best < 0 && !fires_.empty()) {
    static int miss_count = 0;
    if (miss_count++ % 20 == 0) {
      const Vec3 q = nozzle + dir * config_.stream_reach;
      std::fprintf(stderr, "[water] miss; stream end (%.2f,%.2f,%.2f) fire0 "
                   "(%.2f,%.2f,%.2f)\n", q.x, q.y, q.z, fires_[0].position.x,
                   fires_[0].position.y, fires_[0].position.z);
    }
  }
#endif
  if (best < 0) return 0.0;

  // Walls block the stream; the half-cell slack keeps the plate's own
  // mounting wall from eclipsing it.
  const auto wall =
      world::raycast(grid_, nozzle, dir, best_t - 1.5 * grid_.resolution());
#ifdef FIRENAV_WATER_DEBUG
  if (wall) {
    static int blk_count = 0;
    if (blk_count++ % 20 == 0)
      std::fprintf(stderr, "[water] blocked at %.2f of %.2f\n", *wall, best_t);
  }
#endif
  if (wall) return 0.0;

  fires_[best].water_received += amount;
  return amount;
}

void World::apply_blanket_op(int robot_idx, BlanketOp op) {
  RobotState& r = robots_[robot_idx];
  if (r.blanket == BlanketState::Absent)
    throw std::runtime_error("robot carries no blanket");
  if (op == BlanketOp::Unroll) {
    if (r.blanket != BlanketState::Stowed)
      throw std::runtime_error("blanket not stowed");
    r.blanket = BlanketState::Unrolled;
    events_.emit(time_, r.id, "blanket_unroll", "");
    return;
  }
  if (r.blanket != BlanketState::Unrolled)
    throw std::runtime_error("blanket not unrolled");
  r.blanket = BlanketState::Dropped;

  const double yaw = r.pose.yaw;
  const Vec3 center =
      r.pose.position +
      Vec3{std::cos(yaw), std::sin(yaw), 0.0} * config_.blanket_forward_travel;
  for (auto& fire : fires_) {
    if (fire.kind != FireKind::OutdoorGround) continue;
    const double cov = disc_rectangle_coverage(
        fire.position, fire.radius, center, config_.blanket_length,
        config_.blanket_width, yaw);
    fire.blanket_coverage = std::max(fire.blanket_coverage, cov);
  }
  events_.emit(time_, r.id, "blanket_drop", "");
}

double disc_rectangle_coverage(const Vec3& disc_center, double disc_radius,
                               const Vec3& rect_center, double rect_len,
                               double rect_wid, double rect_yaw) {
  const int n = 400;
  const double c = std::cos(rect_yaw), s = std::sin(rect_yaw);
  long inside_disc = 0, inside_both = 0;
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      const double px =
          disc_center.x + disc_radius * (2.0 * (i + 0.5) / n - 1.0);
      const double py =
          disc_center.y + disc_radius * (2.0 * (j + 0.5) / n - 1.0);
      const double dx = px - disc_center.x, dy = py - disc_center.y;
      if (dx * dx + dy * dy > disc_radius * disc_radius) continue;
      ++inside_disc;
      const double rx = px - rect_center.x, ry = py - rect_center.y;
      const double lx = rx * c + ry * s;   // along heading
      const double ly = -rx * s + ry * c;  // across heading
      if (std::abs(lx) <= rect_len / 2.0 && std::abs(ly) <= rect_wid / 2.0)
        ++inside_both;
    }
  }
  return inside_disc > 0
             ? static_cast<double>(inside_both) / static_cast<double>(inside_disc)
             : 0.0;
}

}  // namespace firenav::sim
