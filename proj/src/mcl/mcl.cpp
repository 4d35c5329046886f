#include "firenav/mcl/mcl.hpp"

#include <cmath>
#include <stdexcept>

namespace firenav::mcl {

namespace {
constexpr double kSqrt2Pi = 2.50662827463100050242;
}

MclFilter::MclFilter(MclConfig config, uint64_t seed)
    : config_(config), rng_(seed) {
  if (config_.particle_count < 1)
    throw std::invalid_argument("particle_count must be >= 1");
  if (config_.alpha < 0.0 || config_.alpha > 1.0)
    throw std::invalid_argument("alpha must be in [0, 1]");
  if (config_.update_translation_threshold <= 0.0 ||
      config_.update_rotation_threshold <= 0.0)
    throw std::invalid_argument("update thresholds must be > 0");
}

void MclFilter::initialize(const Pose& pose, const Spread& spread) {
  particles_.assign(config_.particle_count, Particle{});
  const double w = 1.0 / config_.particle_count;
  for (auto& p : particles_) {
    p.x = rng_.gaussian(pose.position.x, spread.x);
    p.y = rng_.gaussian(pose.position.y, spread.y);
    p.z = rng_.gaussian(pose.position.z, spread.z);
    p.psi = wrap_angle(rng_.gaussian(pose.yaw, spread.yaw));
    p.weight = w;
  }
  accumulated_translation_ = 0.0;
  accumulated_rotation_ = 0.0;
  initialized_ = true;
}

void MclFilter::set_particles(std::vector<Particle> particles) {
  if (particles.empty())
    throw std::invalid_argument("particle set must be non-empty");
  particles_ = std::move(particles);
  config_.particle_count = static_cast<int>(particles_.size());
  accumulated_translation_ = 0.0;
  accumulated_rotation_ = 0.0;
  initialized_ = true;
}

void MclFilter::predict(const Increment& delta) {
  if (!initialized_) throw std::logic_error("filter not initialized");
  const double k = config_.increment_noise_fraction;
  for (auto& p : particles_) {
    // Increments are sampled in the body frame, then rotated by the
    // particle's own heading.
    const double dx = rng_.gaussian(delta.dx, k * std::abs(delta.dx));
    const double dy = rng_.gaussian(delta.dy, k * std::abs(delta.dy));
    const double dz = rng_.gaussian(delta.dz, k * std::abs(delta.dz));
    const double dpsi = rng_.gaussian(delta.dyaw, k * std::abs(delta.dyaw));
    const double c = std::cos(p.psi), s = std::sin(p.psi);
    p.x += rng_.gaussian(0.0, config_.sigma_nx) + dx * c - dy * s;
    p.y += rng_.gaussian(0.0, config_.sigma_ny) + dx * s + dy * c;
    p.z += rng_.gaussian(0.0, config_.sigma_nz) + dz;
    p.psi = wrap_angle(p.psi + rng_.gaussian(0.0, config_.sigma_npsi) + dpsi);
  }
  accumulated_translation_ +=
      std::sqrt(delta.dx * delta.dx + delta.dy * delta.dy + delta.dz * delta.dz);
  accumulated_rotation_ += std::abs(delta.dyaw);
}

bool MclFilter::should_update() const {
  return accumulated_translation_ >= config_.update_translation_threshold ||
         accumulated_rotation_ >= config_.update_rotation_threshold;
}

std::vector<Vec3> subsample_cloud(std::span<const Vec3> cloud,
                                  int max_points) {
  std::vector<Vec3> out;
  const std::size_t n = cloud.size();
  if (n == 0 || max_points <= 0) return out;
  if (n <= static_cast<std::size_t>(max_points)) {
    out.assign(cloud.begin(), cloud.end());
    return out;
  }
  out.reserve(max_points);
  const double stride = static_cast<double>(n) / max_points;
  for (int i = 0; i < max_points; ++i)
    out.push_back(cloud[static_cast<std::size_t>(i * stride)]);
  return out;
}

std::vector<double> MclFilter::cloud_weights(
    std::span<const Vec3> cloud, const world::LikelihoodField& field,
    double roll, double pitch) const {
  // Roll/pitch compensation is applied to the cloud once, outside the
  // particle loop.
  const std::vector<Vec3> sub = subsample_cloud(cloud, config_.max_cloud_points);
  std::vector<Vec3> leveled;
  leveled.reserve(sub.size());
  const double cr = std::cos(roll), sr = std::sin(roll);
  const double cp = std::cos(pitch), sp = std::sin(pitch);
  for (const auto& v : sub) {
    // R_y(pitch) * R_x(roll) * v
    const double y1 = v.y * cr - v.z * sr;
    const double z1 = v.y * sr + v.z * cr;
    leveled.push_back(
        {v.x * cp + z1 * sp, y1, -v.x * sp + z1 * cp});
  }

  const double inv_m = 1.0 / static_cast<double>(leveled.size());
  std::vector<double> w(particles_.size(), 0.0);
  for (std::size_t i = 0; i < particles_.size(); ++i) {
    const Particle& p = particles_[i];
    const double c = std::cos(p.psi), s = std::sin(p.psi);
    double sum = 0.0;
    for (const auto& v : leveled) {
      const Vec3 m{p.x + v.x * c - v.y * s, p.y + v.x * s + v.y * c,
                   p.z + v.z};
      sum += field.query(m);
    }
    w[i] = sum * inv_m;
  }
  return w;
}

std::vector<double> MclFilter::gps_weights(const Vec3& gps) const {
  // The altitude contribution of the fix is dismissed.
  const double sigma = config_.gps_sigma;
  const double peak = 1.0 / (kSqrt2Pi * sigma);
  const double inv_two_sigma_sq = 1.0 / (2.0 * sigma * sigma);
  std::vector<double> w(particles_.size(), 0.0);
  for (std::size_t i = 0; i < particles_.size(); ++i) {
    const double dx = particles_[i].x - gps.x;
    const double dy = particles_[i].y - gps.y;
    w[i] = peak * std::exp(-(dx * dx + dy * dy) * inv_two_sigma_sq);
  }
  return w;
}

bool MclFilter::combine_and_normalize(const std::vector<double>& w_map,
                                      const std::vector<double>& w_gps) {
  const double alpha = w_gps.empty() ? 1.0 : config_.alpha;
  double total = 0.0;
  for (std::size_t i = 0; i < particles_.size(); ++i) {
    const double wg = w_gps.empty() ? 0.0 : w_gps[i];
    particles_[i].weight = alpha * w_map[i] + (1.0 - alpha) * wg;
    total += particles_[i].weight;
  }
  if (total <= 0.0) {
    const double uniform = 1.0 / particles_.size();
    for (auto& p : particles_) p.weight = uniform;
    events_.emit(0.0, "", "mcl_divergence",
                 "all fused weights zero; weights reset uniform");
    return false;
  }
  for (auto& p : particles_) p.weight /= total;
  return true;
}

void MclFilter::resample(double altimeter_z, double compass_yaw) {
  // Low-variance (systematic) re-sampling.
  const std::size_t n = particles_.size();
  std::vector<Particle> next;
  next.reserve(n);
  const double step = 1.0 / static_cast<double>(n);
  double target = rng_.uniform() * step;
  double cum = particles_[0].weight;
  std::size_t idx = 0;
  for (std::size_t i = 0; i < n; ++i) {
    while (cum < target && idx + 1 < n) {
      ++idx;
      cum += particles_[idx].weight;
    }
    next.push_back(particles_[idx]);
    target += step;
  }

  const double w = 1.0 / static_cast<double>(n);
  for (auto& p : next) {
    if (config_.use_altimeter)
      p.z = rng_.gaussian(altimeter_z, config_.resample_sigma_z);
    if (config_.use_yaw)
      p.psi = wrap_angle(
          rng_.gaussian(compass_yaw, config_.resample_sigma_yaw));
    p.weight = w;
  }
  particles_ = std::move(next);
}

void MclFilter::update(std::span<const Vec3> cloud,
                       const world::LikelihoodField& field, double roll,
                       double pitch, std::optional<Vec3> gps,
                       double altimeter_z, double compass_yaw) {
  if (!initialized_) throw std::logic_error("filter not initialized");
  if (cloud.empty()) {
    events_.emit(0.0, "", "mcl_warning", "empty cloud; update skipped");
    return;
  }
  const std::vector<double> w_map = cloud_weights(cloud, field, roll, pitch);
  std::vector<double> w_gps;
  if (config_.use_gps && gps) w_gps = gps_weights(*gps);
  combine_and_normalize(w_map, w_gps);
  resample(altimeter_z, compass_yaw);
  accumulated_translation_ = 0.0;
  accumulated_rotation_ = 0.0;
}

PoseEstimate MclFilter::estimate() const {
  if (!initialized_) throw std::logic_error("filter not initialized");
  PoseEstimate est;
  double sw = 0.0, mx = 0.0, my = 0.0, mz = 0.0, cs = 0.0, sn = 0.0;
  for (const auto& p : particles_) {
    sw += p.weight;
    mx += p.weight * p.x;
    my += p.weight * p.y;
    mz += p.weight * p.z;
    cs += p.weight * std::cos(p.psi);
    sn += p.weight * std::sin(p.psi);
  }
  if (sw <= 0.0) sw = 1.0;
  mx /= sw;
  my /= sw;
  mz /= sw;
  const double yaw = std::atan2(sn, cs);
  est.pose.position = {mx, my, mz};
  est.pose.yaw = wrap_angle(yaw);

  double cxx = 0.0, cyy = 0.0, czz = 0.0, cxy = 0.0, cpsi = 0.0;
  for (const auto& p : particles_) {
    const double dx = p.x - mx, dy = p.y - my, dz = p.z - mz;
    const double dpsi = wrap_angle(p.psi - yaw);
    cxx += p.weight * dx * dx;
    cyy += p.weight * dy * dy;
    czz += p.weight * dz * dz;
    cxy += p.weight * dx * dy;
    cpsi += p.weight * dpsi * dpsi;
  }
  est.cov_xx = cxx / sw;
  est.cov_yy = cyy / sw;
  est.cov_zz = czz / sw;
  est.cov_xy = cxy / sw;
  est.yaw_var = cpsi / sw;
  return est;
}

}  // namespace firenav::mcl
