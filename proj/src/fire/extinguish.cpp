#include "firenav/fire/extinguish.hpp"

#include <algorithm>
#include <cmath>

namespace firenav::fire {

namespace {
double clamp_mag(double v, double lim) {
  return v > lim ? lim : (v < -lim ? -lim : v);
}
}  // namespace

const char* phase_name(ProcedurePhase phase) {
  switch (phase) {
    case ProcedurePhase::Confirming: return "Confirming";
    case ProcedurePhase::Centering: return "Centering";
    case ProcedurePhase::Extinguishing: return "Extinguishing";
    case ProcedurePhase::Above: return "Above";
    case ProcedurePhase::Descend: return "Descend";
    case ProcedurePhase::BackUntilLost: return "BackUntilLost";
    case ProcedurePhase::Unroll: return "Unroll";
    case ProcedurePhase::ForwardOverFire: return "ForwardOverFire";
    case ProcedurePhase::DropWhenLost: return "DropWhenLost";
    case ProcedurePhase::Ascend: return "Ascend";
    case ProcedurePhase::Succeeded: return "Succeeded";
    case ProcedurePhase::Aborted: return "Aborted";
  }
  return "?";
}

ExtinguishProcedure::ExtinguishProcedure(ExtinguishConfig cfg) : cfg_(cfg) {}

void ExtinguishProcedure::transition(ProcedurePhase next,
                                     const ProcedureContext& ctx) {
  events_.emit(ctx.time, "", "phase",
               std::string(phase_name(phase_)) + "->" + phase_name(next));
  phase_ = next;
  phase_time_ = 0.0;
}

ProcedureCommand ExtinguishProcedure::step(
    double dt, const std::vector<FireDetection2D>& detections,
    const ProcedureContext& ctx) {
  if (terminal()) return {};
  elapsed_ += dt;
  phase_time_ += dt;
  if (elapsed_ > cfg_.time_budget) {
    transition(ProcedurePhase::Aborted, ctx);
    return {};
  }
  switch (phase_) {
    case ProcedurePhase::Confirming:
      return confirm_step(dt, detections, ctx);
    case ProcedurePhase::Centering:
      return center_step(dt, detections, ctx);
    case ProcedurePhase::Extinguishing:
      return extinguish_step(dt, detections, ctx);
    default:
      return blanket_step(dt, detections, ctx);
  }
}

ProcedureCommand ExtinguishProcedure::confirm_step(
    double dt, const std::vector<FireDetection2D>& dets,
    const ProcedureContext& ctx) {
  (void)dt;
  if (!dets.empty()) {
    transition(cfg_.variant == ProcedureVariant::UavBlanket
                   ? ProcedurePhase::Above
                   : ProcedurePhase::Centering,
               ctx);
    return {};
  }

  if (!scan_initialized_) {
    scan_initialized_ = true;
    scan_anchor_ = ctx.pose;
    scan_setpoints_.clear();
    switch (cfg_.variant) {
      case ProcedureVariant::UgvWater: {
        // Serpentine pan sweep over three tilt rows, base stationary.
        const double tilts[3] = {0.0, 0.12, -0.12};
        bool flip = false;
        for (double tilt : tilts) {
          std::vector<double> pans;
          for (double pan = -cfg_.scan_pan_limit; pan <= cfg_.scan_pan_limit + 1e-9;
               pan += cfg_.scan_pan_step)
            pans.push_back(pan);
          if (flip) std::reverse(pans.begin(), pans.end());
          flip = !flip;
          for (double pan : pans) scan_setpoints_.push_back({pan, tilt});
        }
        break;
      }
      case ProcedureVariant::UavFacadeWater: {
        // Square parallel to the facade, in local y (lateral) and z.
        const double a = cfg_.square_half_side;
        scan_setpoints_ = {{a, 0.0},  {a, a * 0.6},  {-a, a * 0.6},
                           {-a, 0.0}, {-a, -a * 0.6}, {a, -a * 0.6},
                           {0.0, 0.0}};
        break;
      }
      case ProcedureVariant::UavIndoorWater: {
        // Yaw rotations in place.
        for (double y = 0.0; y <= cfg_.yaw_scan_limit + 1e-9;
             y += cfg_.yaw_scan_step)
          scan_setpoints_.push_back({y, 0.0});
        for (double y = cfg_.yaw_scan_limit; y >= -cfg_.yaw_scan_limit - 1e-9;
             y -= cfg_.yaw_scan_step)
          scan_setpoints_.push_back({y, 0.0});
        scan_setpoints_.push_back({0.0, 0.0});
        break;
      }
      case ProcedureVariant::UavBlanket: {
        // Square in a plane parallel to the ground.
        const double a = cfg_.square_half_side;
        scan_setpoints_ = {{a, 0.0},  {a, a},  {-a, a}, {-a, 0.0},
                           {-a, -a}, {a, -a}, {0.0, 0.0}};
        break;
      }
    }
    scan_index_ = 0;
    scan_hold_ = 0.0;
  }

  if (scan_index_ >= scan_setpoints_.size()) {
    transition(ProcedurePhase::Aborted, ctx);
    return {};
  }

  const auto [a, b] = scan_setpoints_[scan_index_];
  ProcedureCommand cmd;
  bool reached = false;
  switch (cfg_.variant) {
    case ProcedureVariant::UgvWater: {
      const double pan_err = a - ctx.pan;
      const double tilt_err = b - ctx.tilt;
      cmd.pan_rate = clamp_mag(2.0 * pan_err, 0.8);
      cmd.tilt_rate = clamp_mag(2.0 * tilt_err, 0.8);
      reached = std::abs(pan_err) < 0.03 && std::abs(tilt_err) < 0.03;
      break;
    }
    case ProcedureVariant::UavFacadeWater: {
      const Vec3 local = map_to_body(scan_anchor_, ctx.pose.position);
      const double ey = a - local.y, ez = b - local.z;
      cmd.velocity.y = clamp_mag(1.0 * ey, cfg_.square_speed);
      cmd.velocity.z = clamp_mag(1.0 * ez, cfg_.square_speed);
      const double yaw_err = wrap_angle(scan_anchor_.yaw - ctx.pose.yaw);
      cmd.yaw_rate = clamp_mag(1.0 * yaw_err, 0.5);
      reached = std::abs(ey) < 0.15 && std::abs(ez) < 0.15;
      break;
    }
    case ProcedureVariant::UavIndoorWater: {
      const double err = wrap_angle(scan_anchor_.yaw + a - ctx.pose.yaw);
      cmd.yaw_rate = clamp_mag(1.0 * err, 0.4);
      reached = std::abs(err) < 0.04;
      break;
    }
    case ProcedureVariant::UavBlanket: {
      const Vec3 local = map_to_body(scan_anchor_, ctx.pose.position);
      const double ex = a - local.x, ey = b - local.y;
      cmd.velocity.x = clamp_mag(1.0 * ex, cfg_.square_speed);
      cmd.velocity.y = clamp_mag(1.0 * ey, cfg_.square_speed);
      reached = std::abs(ex) < 0.15 && std::abs(ey) < 0.15;
      break;
    }
  }
  if (reached) {
    scan_hold_ += dt;
    if (scan_hold_ >= cfg_.scan_hold_time) {
      ++scan_index_;
      scan_hold_ = 0.0;
    }
  }
  return cmd;
}

ProcedureCommand ExtinguishProcedure::centering_command(
    const FireDetection2D& det) const {
  const double eu = det.u - cfg_.zone.cu;
  const double ev = det.v - cfg_.zone.cv;
  ProcedureCommand cmd;
  switch (cfg_.variant) {
    case ProcedureVariant::UgvWater:
      cmd.pan_rate = clamp_mag(-cfg_.center_gain * eu, cfg_.max_center_speed);
      cmd.tilt_rate = clamp_mag(-cfg_.center_gain * ev, cfg_.max_center_speed);
      break;
    case ProcedureVariant::UavFacadeWater:
      cmd.velocity.y = clamp_mag(-cfg_.center_gain * eu, cfg_.max_center_speed);
      cmd.velocity.z = clamp_mag(-cfg_.center_gain * ev, cfg_.max_center_speed);
      break;
    case ProcedureVariant::UavIndoorWater:
      cmd.yaw_rate = clamp_mag(-cfg_.center_gain * eu, cfg_.max_center_speed);
      break;
    case ProcedureVariant::UavBlanket:
      cmd.velocity.y = clamp_mag(-cfg_.center_gain * eu, cfg_.max_center_speed);
      cmd.velocity.x = clamp_mag(-cfg_.center_gain * ev, cfg_.max_center_speed);
      break;
  }
  return cmd;
}

ProcedureCommand ExtinguishProcedure::center_step(
    double dt, const std::vector<FireDetection2D>& dets,
    const ProcedureContext& ctx) {
  if (dets.empty()) {
    dwell_ = 0.0;
    lost_ += dt;
    if (lost_ > cfg_.lost_timeout) {
      lost_ = 0.0;
      scan_initialized_ = false;  // restart the scan pattern
      transition(ProcedurePhase::Confirming, ctx);
    }
    return {};
  }
  lost_ = 0.0;
  const FireDetection2D& det = dets.front();
  if (cfg_.zone.contains(det.u, det.v)) {
    dwell_ += dt;
    if (dwell_ >= cfg_.dwell_time) {
      if (ctx.water_remaining <= 0.0) {
        transition(ProcedurePhase::Aborted, ctx);
        return {};
      }
      lock_pan_ = ctx.pan;
      lock_tilt_ = ctx.tilt;
      eject_elapsed_ = 0.0;
      transition(ProcedurePhase::Extinguishing, ctx);
      return {};
    }
  } else {
    dwell_ = 0.0;
  }
  return centering_command(det);
}

ProcedureCommand ExtinguishProcedure::extinguish_step(
    double dt, const std::vector<FireDetection2D>& dets,
    const ProcedureContext& ctx) {
  if (ctx.water_remaining <= 0.0 && eject_elapsed_ <= 0.0) {
    transition(ProcedurePhase::Aborted, ctx);
    return {};
  }
  eject_elapsed_ += dt;
  if (eject_elapsed_ >= cfg_.eject_duration || ctx.water_remaining <= 0.0) {
    transition(ProcedurePhase::Succeeded, ctx);
    return {};
  }

  ProcedureCommand cmd;
  cmd.eject = true;
  if (cfg_.variant == ProcedureVariant::UgvWater) {
    // Cross-shaped sweep around the lock: pan lobes then tilt lobes.
    const int lobe =
        static_cast<int>(eject_elapsed_ / cfg_.cross_lobe_time) % 4;
    double pan_target = lock_pan_, tilt_target = lock_tilt_;
    switch (lobe) {
      case 0: pan_target += cfg_.cross_amplitude; break;
      case 1: pan_target -= cfg_.cross_amplitude; break;
      case 2: tilt_target += cfg_.cross_amplitude; break;
      case 3: tilt_target -= cfg_.cross_amplitude; break;
    }
    cmd.pan_rate = clamp_mag(2.0 * (pan_target - ctx.pan), 0.5);
    cmd.tilt_rate = clamp_mag(2.0 * (tilt_target - ctx.tilt), 0.5);
  } else if (!dets.empty()) {
    // The servo keeps regulating during the ejection.
    const ProcedureCommand center = centering_command(dets.front());
    cmd.velocity = center.velocity;
    cmd.yaw_rate = center.yaw_rate;
  }
  return cmd;
}

ProcedureCommand ExtinguishProcedure::blanket_step(
    double dt, const std::vector<FireDetection2D>& dets,
    const ProcedureContext& ctx) {
  ProcedureCommand cmd;
  const bool seen = !dets.empty();
  switch (phase_) {
    case ProcedurePhase::Above: {
      if (!seen) {
        lost_ += dt;
        if (lost_ > cfg_.lost_timeout) {
          lost_ = 0.0;
          scan_initialized_ = false;
          transition(ProcedurePhase::Confirming, ctx);
        }
        return {};
      }
      lost_ = 0.0;
      const FireDetection2D& det = dets.front();
      if (cfg_.zone.contains(det.u, det.v)) {
        dwell_ += dt;
        if (dwell_ >= cfg_.dwell_time) {
          transition(ProcedurePhase::Descend, ctx);
          return {};
        }
      } else {
        dwell_ = 0.0;
      }
      return centering_command(det);
    }
    case ProcedurePhase::Descend: {
      if (ctx.height_above_ground <= cfg_.descend_height + 0.05) {
        transition(ProcedurePhase::BackUntilLost, ctx);
        return {};
      }
      if (seen) {
        cmd = centering_command(dets.front());
      }
      cmd.velocity.z = clamp_mag(
          cfg_.ascend_gain * (cfg_.descend_height - ctx.height_above_ground),
          0.4);
      return cmd;
    }
    case ProcedurePhase::BackUntilLost: {
      if (!seen) {
        lost_ += dt;
        if (lost_ > 0.3) {
          transition(ProcedurePhase::Unroll, ctx);
          return {};
        }
      } else {
        lost_ = 0.0;
      }
      cmd.velocity.x = -cfg_.back_speed;
      return cmd;
    }
    case ProcedurePhase::Unroll: {
      cmd.blanket = BlanketRelease::Unroll;
      forward_traveled_ = 0.0;
      refound_fire_ = false;
      transition(ProcedurePhase::ForwardOverFire, ctx);
      return cmd;
    }
    case ProcedurePhase::ForwardOverFire: {
      forward_traveled_ += cfg_.forward_speed * dt;
      if (seen) refound_fire_ = true;
      if (refound_fire_ && !seen) {
        // Past the fire: the camera just lost it again.
        transition(ProcedurePhase::DropWhenLost, ctx);
        return {};
      }
      if (forward_traveled_ > cfg_.forward_distance_budget) {
        transition(ProcedurePhase::Aborted, ctx);  // never re-detected
        return {};
      }
      cmd.velocity.x = cfg_.forward_speed;
      return cmd;
    }
    case ProcedurePhase::DropWhenLost: {
      cmd.blanket = BlanketRelease::Drop;
      entry_z_ = ctx.pose.position.z;
      transition(ProcedurePhase::Ascend, ctx);
      return cmd;
    }
    case ProcedurePhase::Ascend: {
      const double target = entry_z_ + cfg_.ascend_height;
      if (ctx.pose.position.z >= target - 0.1) {
        transition(ProcedurePhase::Succeeded, ctx);
        return {};
      }
      cmd.velocity.z =
          clamp_mag(cfg_.ascend_gain * (target - ctx.pose.position.z), 1.0);
      return cmd;
    }
    default:
      return {};
  }
}

}  // namespace firenav::fire
