#pragma once

#include <optional>
#include <span>
#include <vector>

#include "firenav/core/events.hpp"
#include "firenav/core/geometry.hpp"
#include "firenav/core/rng.hpp"
#include "firenav/world/likelihood_field.hpp"

namespace firenav::mcl {

struct Particle {
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;
  double psi = 0.0;  // wrapped to (-pi, pi]
  double weight = 0.0;
};

struct MclConfig {
  int particle_count = 1000;

  // Std dev of each odometry increment is this fraction of the increment.
  double increment_noise_fraction = 0.1;

  // Fixed zero-centered prediction noises, applied every predict step to
  // absorb odometry outliers.
  double sigma_nx = 0.02;
  double sigma_ny = 0.02;
  double sigma_nz = 0.01;
  double sigma_npsi = 0.005;

  // Weight fusion w = alpha * w_map + (1 - alpha) * w_gps.
  double alpha = 1.0;
  double gps_sigma = 0.5;
  bool use_gps = false;

  // Sensor evaluation runs only after moving this far.
  double update_translation_threshold = 0.1;  // meters
  double update_rotation_threshold = 0.05;    // radians

  // Re-sampling injection.
  bool use_altimeter = true;
  bool use_yaw = true;
  double resample_sigma_z = 0.05;
  double resample_sigma_yaw = 0.02;

  // Uniform-stride cloud subsampling bound per update.
  int max_cloud_points = 500;
};

struct PoseEstimate {
  Pose pose;
  double cov_xx = 0.0, cov_yy = 0.0, cov_zz = 0.0;
  double cov_xy = 0.0;
  double yaw_var = 0.0;
};

struct Spread {
  double x = 0.0, y = 0.0, z = 0.0, yaw = 0.0;
};

struct Increment {
  double dx = 0.0, dy = 0.0, dz = 0.0, dyaw = 0.0;
};

/// Multi-sensor Monte Carlo localization over a precomputed likelihood
/// field. Prediction follows the noisy body-frame increment model; cloud
/// and GPS weights are fused as a weighted average; altimeter and compass
/// enter through the re-sampling stage.
class MclFilter {
 public:
  MclFilter(MclConfig config, uint64_t seed);

  void initialize(const Pose& pose, const Spread& spread);

  /// Installs explicit hypotheses (weights are used as given). The count
  /// becomes the filter's particle count.
  void set_particles(std::vector<Particle> particles);

  bool initialized() const { return initialized_; }

  /// Propagates every particle by the body-frame increment rotated into the
  /// particle's own heading, with increment-proportional plus fixed noise.
  void predict(const Increment& delta);

  /// True when accumulated motion passed either update threshold.
  bool should_update() const;

  /// Full correction cycle: cloud weight, optional GPS weight, fusion,
  /// normalization, re-sampling with altimeter/compass injection. Resets
  /// the accumulated-motion counters.
  void update(std::span<const Vec3> cloud, const world::LikelihoodField& field,
              double roll, double pitch, std::optional<Vec3> gps,
              double altimeter_z, double compass_yaw);

  // The individual stages, exposed for direct testing.
  std::vector<double> cloud_weights(std::span<const Vec3> cloud,
                                    const world::LikelihoodField& field,
                                    double roll, double pitch) const;
  std::vector<double> gps_weights(const Vec3& gps) const;
  /// w = alpha * w_map + (1-alpha) * w_gps, normalized to sum 1. An empty
  /// w_gps applies w_map alone. Returns false (and resets weights uniform)
  /// when every fused weight is zero.
  bool combine_and_normalize(const std::vector<double>& w_map,
                             const std::vector<double>& w_gps);
  void resample(double altimeter_z, double compass_yaw);

  PoseEstimate estimate() const;

  const std::vector<Particle>& particles() const { return particles_; }
  const MclConfig& config() const { return config_; }
  EventLog& events() { return events_; }

  double accumulated_translation() const { return accumulated_translation_; }
  double accumulated_rotation() const { return accumulated_rotation_; }

 private:
  MclConfig config_;
  Rng rng_;
  std::vector<Particle> particles_;
  bool initialized_ = false;
  double accumulated_translation_ = 0.0;
  double accumulated_rotation_ = 0.0;
  EventLog events_;
};

/// Uniform-stride subsample keeping at most max_points (deterministic).
std::vector<Vec3> subsample_cloud(std::span<const Vec3> cloud, int max_points);

}  // namespace firenav::mcl
