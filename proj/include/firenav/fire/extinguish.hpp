#pragma once

#include <optional>
#include <string>
#include <vector>

#include "firenav/core/events.hpp"
#include "firenav/fire/detect.hpp"

namespace firenav::fire {

enum class ProcedureVariant { UgvWater, UavFacadeWater, UavIndoorWater, UavBlanket };

enum class ProcedurePhase {
  Confirming,
  Centering,
  Extinguishing,
  // Blanket sequence.
  Above,
  Descend,
  BackUntilLost,
  Unroll,
  ForwardOverFire,
  DropWhenLost,
  Ascend,
  // Terminal.
  Succeeded,
  Aborted,
};

const char* phase_name(ProcedurePhase phase);

/// Image-plane region the detected centroid must occupy for the stream to
/// hit; centered where the water ray crosses the image at attack distance.
struct LockOnZone {
  double cu = 0.0;
  double cv = 0.0;
  double half_u = 10.0;
  double half_v = 10.0;

  bool contains(double u, double v) const {
    return std::abs(u - cu) <= half_u && std::abs(v - cv) <= half_v;
  }
};

struct ExtinguishConfig {
  ProcedureVariant variant = ProcedureVariant::UgvWater;
  LockOnZone zone;
  /// Nominal stand-off when the ejection starts; the zone is sized from it
  /// so a locked-on stream stays inside the target disc.
  double attack_distance = 1.6;
  double target_radius = 0.25;

  double center_gain = 0.02;  // command per pixel of error
  double max_center_speed = 0.4;
  double dwell_time = 0.5;     // in-zone time before ejection
  double lost_timeout = 2.0;   // detection dropout before re-confirming
  double eject_duration = 60.0;
  double time_budget = 240.0;  // hard bound to a terminal phase

  // UGV cross-shaped sweep while ejecting.
  double cross_amplitude = 0.0873;  // +/- 5 degrees
  double cross_lobe_time = 4.0;

  // Confirm-scan geometry.
  double scan_pan_limit = 1.0;
  double scan_pan_step = 0.25;
  double scan_hold_time = 0.4;
  double square_half_side = 1.0;  // facade / ground confirm square
  double square_speed = 0.4;
  double yaw_scan_limit = 0.6;
  double yaw_scan_step = 0.3;

  // Blanket sequence.
  double descend_height = 1.5;
  double back_speed = 0.3;
  double forward_speed = 0.3;
  double forward_distance_budget = 6.0;
  double ascend_gain = 1.0;
  double ascend_height = 3.0;
};

/// Magnet / actuation side effects a step may request.
enum class BlanketRelease { Unroll, Drop };

struct ProcedureCommand {
  Vec3 velocity;  // body frame
  double yaw_rate = 0.0;
  double pan_rate = 0.0;
  double tilt_rate = 0.0;
  bool eject = false;
  std::optional<BlanketRelease> blanket;
};

/// Robot snapshot a procedure step needs.
struct ProcedureContext {
  Pose pose;
  double pan = 0.0;
  double tilt = 0.0;
  double water_remaining = 0.0;
  double height_above_ground = 0.0;
  double time = 0.0;
};

/// One extinguishing behavior instance: confirming, centering and
/// extinguishing as an explicit state machine driving a visual-servo
/// controller; the blanket variant runs the seven-phase deployment.
class ExtinguishProcedure {
 public:
  explicit ExtinguishProcedure(ExtinguishConfig cfg);

  ProcedurePhase phase() const { return phase_; }
  bool terminal() const {
    return phase_ == ProcedurePhase::Succeeded ||
           phase_ == ProcedurePhase::Aborted;
  }

  /// Advances the state machine by dt with the current detections (empty =
  /// nothing seen this frame) and returns the actuation for this tick.
  ProcedureCommand step(double dt,
                        const std::vector<FireDetection2D>& detections,
                        const ProcedureContext& ctx);

  const EventLog& events() const { return events_; }

 private:
  ProcedureCommand confirm_step(double dt,
                                const std::vector<FireDetection2D>& dets,
                                const ProcedureContext& ctx);
  ProcedureCommand center_step(double dt,
                               const std::vector<FireDetection2D>& dets,
                               const ProcedureContext& ctx);
  ProcedureCommand extinguish_step(double dt,
                                   const std::vector<FireDetection2D>& dets,
                                   const ProcedureContext& ctx);
  ProcedureCommand blanket_step(double dt,
                                const std::vector<FireDetection2D>& dets,
                                const ProcedureContext& ctx);

  void transition(ProcedurePhase next, const ProcedureContext& ctx);
  ProcedureCommand centering_command(const FireDetection2D& det) const;

  ExtinguishConfig cfg_;
  ProcedurePhase phase_ = ProcedurePhase::Confirming;
  EventLog events_;

  double elapsed_ = 0.0;
  double phase_time_ = 0.0;
  // Confirm scan bookkeeping.
  std::vector<std::pair<double, double>> scan_setpoints_;  // pan/tilt or dy/dz
  std::size_t scan_index_ = 0;
  double scan_hold_ = 0.0;
  bool scan_initialized_ = false;
  Pose scan_anchor_;
  // Centering / extinguishing bookkeeping.
  double dwell_ = 0.0;
  double lost_ = 0.0;
  double eject_elapsed_ = 0.0;
  double lock_pan_ = 0.0;
  double lock_tilt_ = 0.0;
  // Blanket bookkeeping.
  double forward_traveled_ = 0.0;
  bool refound_fire_ = false;
  double entry_z_ = 0.0;
};

}  // namespace firenav::fire
