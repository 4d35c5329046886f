#include <doctest.h>

#include <cmath>

#include "firenav/mcl/mcl.hpp"
#include "firenav/world/voxel_grid.hpp"
#include "oracles.hpp"

using namespace firenav;
using mcl::Increment;
using mcl::MclConfig;
using mcl::MclFilter;
using mcl::Spread;

namespace {

constexpr double kPi = 3.14159265358979323846;

MclConfig quiet_config(int n = 100) {
  MclConfig cfg;
  cfg.particle_count = n;
  cfg.increment_noise_fraction = 0.0;
  cfg.sigma_nx = cfg.sigma_ny = cfg.sigma_nz = cfg.sigma_npsi = 0.0;
  cfg.use_altimeter = false;
  cfg.use_yaw = false;
  return cfg;
}

world::LikelihoodField tiny_field(world::VoxelGrid& grid_out) {
  world::VoxelGrid grid(0.2, {30, 30, 10}, {0, 0, 0});
  grid.set_occupied({10, 10, 5});
  grid.set_occupied({20, 14, 5});
  grid.set_occupied({14, 22, 5});
  grid_out = grid;
  return world::LikelihoodField::build(grid, 0.2, 50.0);
}

}  // namespace

TEST_CASE("initialize: zero spread concentrates all particles") {
  MclFilter f(quiet_config(), 5);
  const Pose pose{{1.0, 2.0, 0.5}, 0.7};
  f.initialize(pose, {0, 0, 0, 0});
  for (const auto& p : f.particles()) {
    CHECK(p.x == pose.position.x);
    CHECK(p.y == pose.position.y);
    CHECK(p.z == pose.position.z);
    CHECK(p.psi == pose.yaw);
    CHECK(p.weight == doctest::Approx(1.0 / 100));
  }
  const auto est = f.estimate();
  CHECK(est.pose.position.x == doctest::Approx(pose.position.x));
  CHECK(est.pose.yaw == doctest::Approx(pose.yaw));
}

TEST_CASE("initialize: sampled spreads match the request within 5%") {
  MclConfig cfg = quiet_config(10000);
  MclFilter f(cfg, 5);
  f.initialize({{0, 0, 0}, 0}, {1.0, 1.0, 0.1, 0.1});
  double sx = 0, sy = 0, sz = 0, syaw = 0;
  for (const auto& p : f.particles()) {
    sx += p.x * p.x;
    sy += p.y * p.y;
    sz += p.z * p.z;
    syaw += p.psi * p.psi;
  }
  const int n = cfg.particle_count;
  CHECK(std::sqrt(sx / n) == doctest::Approx(1.0).epsilon(0.05));
  CHECK(std::sqrt(sy / n) == doctest::Approx(1.0).epsilon(0.05));
  CHECK(std::sqrt(sz / n) == doctest::Approx(0.1).epsilon(0.05));
  CHECK(std::sqrt(syaw / n) == doctest::Approx(0.1).epsilon(0.05));
}

TEST_CASE("predict: noiseless increments follow the heading rotation") {
  MclFilter f(quiet_config(10), 5);

  SUBCASE("yaw 0 moves along x") {
    f.initialize({{0, 0, 0}, 0}, {0, 0, 0, 0});
    f.predict({1.0, 0.0, 0.0, 0.0});
    for (const auto& p : f.particles()) {
      CHECK(p.x == doctest::Approx(1.0));
      CHECK(p.y == doctest::Approx(0.0));
    }
  }
  SUBCASE("yaw pi/2 rotates the body increment into +y") {
    f.initialize({{0, 0, 0}, kPi / 2}, {0, 0, 0, 0});
    f.predict({1.0, 0.0, 0.0, 0.0});
    for (const auto& p : f.particles()) {
      CHECK(p.x == doctest::Approx(0.0).epsilon(1e-9));
      CHECK(p.y == doctest::Approx(1.0));
    }
  }
}

TEST_CASE("predict: fixed noise keeps dispersing with zero increments") {
  MclConfig cfg = quiet_config(4000);
  cfg.sigma_nx = cfg.sigma_ny = 0.02;
  cfg.sigma_nz = 0.01;
  cfg.sigma_npsi = 0.005;
  MclFilter f(cfg, 5);
  f.initialize({{0, 0, 0}, 0}, {0, 0, 0, 0});

  auto var_x = [&]() {
    double s = 0;
    for (const auto& p : f.particles()) s += p.x * p.x;
    return s / f.particles().size();
  };
  double prev = var_x();
  for (int i = 0; i < 5; ++i) {
    f.predict({0, 0, 0, 0});
    const double v = var_x();
    CHECK(v > prev);
    prev = v;
  }
}

TEST_CASE("should_update: thresholds are inclusive and independent") {
  MclConfig cfg = quiet_config();
  cfg.update_translation_threshold = 0.1;
  cfg.update_rotation_threshold = 0.05;
  MclFilter f(cfg, 5);
  f.initialize({{0, 0, 0}, 0}, {0, 0, 0, 0});
  CHECK(!f.should_update());

  SUBCASE("translation exactly at the threshold fires") {
    f.predict({0.1, 0, 0, 0});
    CHECK(f.should_update());
  }
  SUBCASE("rotation alone fires") {
    f.predict({0, 0, 0, 0.06});
    CHECK(f.should_update());
  }
  SUBCASE("below both thresholds stays quiet") {
    f.predict({0.04, 0, 0, 0.01});
    CHECK(!f.should_update());
  }
}

TEST_CASE("cloud weights: peak at truth, zero far away, hand-check") {
  world::VoxelGrid grid(0.2, {1, 1, 1}, {0, 0, 0});
  const auto field = tiny_field(grid);
  MclFilter f(quiet_config(2), 5);

  SUBCASE("particle at truth with surface-perfect cloud scores the peak") {
    f.initialize({{1.0, 1.0, 0.0}, 0.0}, {0, 0, 0, 0});
    // Cloud points that, transformed by the particle, land exactly on the
    // occupied cell centers.
    const Vec3 c1 = grid.center_of({10, 10, 5});
    const Vec3 c2 = grid.center_of({20, 14, 5});
    const std::vector<Vec3> cloud = {c1 - Vec3{1, 1, 0}, c2 - Vec3{1, 1, 0}};
    const auto w = f.cloud_weights(cloud, field, 0, 0);
    CHECK(w[0] == doctest::Approx(field.peak()).epsilon(1e-9));
  }

  SUBCASE("particle far beyond the truncation radius scores zero") {
    world::VoxelGrid g2(0.2, {60, 60, 10}, {0, 0, 0});
    g2.set_occupied({5, 5, 5});
    const auto trunc = world::LikelihoodField::build(g2, 0.2, 0.6);
    f.initialize({{10.0, 10.0, 1.0}, 0.0}, {0, 0, 0, 0});
    const std::vector<Vec3> cloud = {{0.5, 0.5, 0.0}, {0.2, -0.3, 0.1}};
    const auto w = f.cloud_weights(cloud, trunc, 0, 0);
    CHECK(w[0] == 0.0);
  }

  SUBCASE("two particles, three points, equals the averaged grid values") {
    MclConfig cfg = quiet_config(2);
    MclFilter f2(cfg, 5);
    f2.initialize({{1.0, 1.2, 0.6}, 0.3}, {0, 0, 0, 0});
    const std::vector<Vec3> cloud = {{0.8, 0.2, 0.3}, {1.5, -0.4, 0.5},
                                     {2.2, 1.1, 0.2}};
    const auto w = f2.cloud_weights(cloud, field, 0, 0);
    // Hand computation: transform each point by the particle pose, read the
    // field, average.
    for (const auto& particle : f2.particles()) {
      double expect = 0.0;
      const double c = std::cos(particle.psi), s = std::sin(particle.psi);
      for (const auto& v : cloud) {
        const Vec3 m{particle.x + v.x * c - v.y * s,
                     particle.y + v.x * s + v.y * c, particle.z + v.z};
        expect += field.query(m);
      }
      expect /= cloud.size();
      CHECK(w[0] == doctest::Approx(expect).epsilon(1e-12));
      break;  // both particles identical here
    }
  }
}

TEST_CASE("cloud weights: one outlier point moves the sum weight by at most peak/M") {
  world::VoxelGrid grid(0.2, {1, 1, 1}, {0, 0, 0});
  const auto field = tiny_field(grid);
  MclFilter f(quiet_config(1), 5);
  f.initialize({{1.0, 1.0, 0.5}, 0.0}, {0, 0, 0, 0});

  std::vector<Vec3> cloud;
  for (int i = 0; i < 50; ++i)
    cloud.push_back(grid.center_of({10, 10, 5}) - Vec3{1.0, 1.0, 0.5});
  const double w_clean = f.cloud_weights(cloud, field, 0, 0)[0];
  cloud.back() = {100.0, 100.0, 100.0};  // wild outlier
  const double w_dirty = f.cloud_weights(cloud, field, 0, 0)[0];
  CHECK(std::abs(w_clean - w_dirty) <= field.peak() / cloud.size() + 1e-12);
}

TEST_CASE("gps weights: peak, XY-only distance, analytic falloff") {
  MclConfig cfg = quiet_config(3);
  cfg.gps_sigma = 0.5;
  MclFilter f(cfg, 5);
  f.initialize({{2.0, 3.0, 1.0}, 0}, {0, 0, 0, 0});
  const double peak = 1.0 / (std::sqrt(2 * kPi) * 0.5);

  SUBCASE("exact match reads the peak") {
    const auto w = f.gps_weights({2.0, 3.0, 99.0});
    CHECK(w[0] == doctest::Approx(peak));
  }
  SUBCASE("altitude differences are dismissed") {
    auto particles_low = f.gps_weights({2.0, 3.0, -5.0});
    auto particles_high = f.gps_weights({2.0, 3.0, 12.0});
    CHECK(particles_low[0] == particles_high[0]);
  }
  SUBCASE("one sigma of XY distance decays by exp(-1/2)") {
    const auto w = f.gps_weights({2.5, 3.0, 1.0});
    CHECK(w[0] == doctest::Approx(peak * std::exp(-0.5)));
  }
}

TEST_CASE("combine_and_normalize: alpha routing and degenerate reset") {
  MclConfig cfg = quiet_config(3);
  MclFilter f(cfg, 5);
  f.initialize({{0, 0, 0}, 0}, {0, 0, 0, 0});
  const std::vector<double> w_map = {0.9, 0.5, 0.1};
  const std::vector<double> w_gps = {0.1, 0.5, 0.9};

  SUBCASE("alpha 1 preserves the map ranking") {
    MclConfig c1 = cfg;
    c1.alpha = 1.0;
    MclFilter f1(c1, 5);
    f1.initialize({{0, 0, 0}, 0}, {0, 0, 0, 0});
    f1.combine_and_normalize(w_map, w_gps);
    const auto& p = f1.particles();
    CHECK(p[0].weight > p[1].weight);
    CHECK(p[1].weight > p[2].weight);
    double sum = 0;
    for (const auto& q : p) sum += q.weight;
    CHECK(sum == doctest::Approx(1.0).epsilon(1e-9));
  }
  SUBCASE("alpha 0 preserves the gps ranking") {
    MclConfig c0 = cfg;
    c0.alpha = 0.0;
    MclFilter f0(c0, 5);
    f0.initialize({{0, 0, 0}, 0}, {0, 0, 0, 0});
    f0.combine_and_normalize(w_map, w_gps);
    const auto& p = f0.particles();
    CHECK(p[2].weight > p[1].weight);
    CHECK(p[1].weight > p[0].weight);
  }
  SUBCASE("all-zero weights reset uniform and emit a divergence event") {
    const std::vector<double> zeros = {0, 0, 0};
    CHECK(!f.combine_and_normalize(zeros, {}));
    for (const auto& p : f.particles())
      CHECK(p.weight == doctest::Approx(1.0 / 3));
    CHECK(!f.events().of_kind("mcl_divergence").empty());
  }
}

TEST_CASE("combine: zero-weight GPS term leaves the estimate GPS-invariant") {
  MclConfig cfg = quiet_config(200);
  cfg.alpha = 1.0;
  cfg.use_gps = true;
  world::VoxelGrid grid(0.2, {1, 1, 1}, {0, 0, 0});
  const auto field = tiny_field(grid);
  const std::vector<Vec3> cloud = {{1.0, 1.0, 1.0}, {2.0, 0.5, 1.0}};

  auto run = [&](const Vec3& gps) {
    MclFilter f(cfg, 77);
    f.initialize({{1.0, 1.0, 0.5}, 0.1}, {0.2, 0.2, 0.1, 0.05});
    f.predict({0.2, 0, 0, 0});
    f.update(cloud, field, 0, 0, gps, 0.5, 0.1);
    return f.estimate();
  };
  const auto a = run({1.0, 1.0, 0.5});
  const auto b = run({500.0, -300.0, 9.0});  // wild outlier
  CHECK(a.pose.position.x == b.pose.position.x);
  CHECK(a.pose.position.y == b.pose.position.y);
  CHECK(a.pose.yaw == b.pose.yaw);
}

TEST_CASE("resample: weight-1 particle dominates; injections recenter z/yaw") {
  SUBCASE("single heavy particle is copied N times") {
    MclConfig cfg = quiet_config(50);
    MclFilter f(cfg, 5);
    f.initialize({{0, 0, 0}, 0}, {1.0, 1.0, 0.5, 0.5});
    std::vector<double> w(50, 0.0);
    w[17] = 1.0;
    const auto heavy = f.particles()[17];
    f.combine_and_normalize(w, {});
    f.resample(0.0, 0.0);
    for (const auto& p : f.particles()) {
      CHECK(p.x == heavy.x);
      CHECK(p.y == heavy.y);
      CHECK(p.z == heavy.z);  // altimeter off in quiet config
      CHECK(p.weight == doctest::Approx(1.0 / 50));
    }
  }
  SUBCASE("yaw redraw centers on the compass") {
    MclConfig cfg = quiet_config(10000);
    cfg.use_yaw = true;
    cfg.resample_sigma_yaw = 0.05;
    MclFilter f(cfg, 5);
    f.initialize({{0, 0, 0}, 2.0}, {0.1, 0.1, 0.1, 0.5});
    f.resample(0.0, -1.2);
    double cs = 0, sn = 0;
    for (const auto& p : f.particles()) {
      cs += std::cos(p.psi);
      sn += std::sin(p.psi);
    }
    const double mean = std::atan2(sn, cs);
    CHECK(mean == doctest::Approx(-1.2).epsilon(0.01));
  }
  SUBCASE("ground profile pins z to the altimeter") {
    MclConfig cfg = quiet_config(100);
    cfg.use_altimeter = true;
    cfg.resample_sigma_z = 0.0;  // UGV: dispersion in Z set very small
    MclFilter f(cfg, 5);
    f.initialize({{0, 0, 1.0}, 0}, {0.1, 0.1, 0.4, 0.1});
    f.resample(0.0, 0.0);
    for (const auto& p : f.particles()) CHECK(p.z == 0.0);
  }
}

TEST_CASE("estimate: weighted mean and circular yaw mean") {
  MclFilter f(quiet_config(2), 5);

  SUBCASE("single effective particle reports its pose") {
    f.set_particles({{1.5, -2.0, 0.7, 0.4, 1.0},
                     {9.0, 9.0, 9.0, 1.0, 0.0}});
    const auto est = f.estimate();
    CHECK(est.pose.position.x == doctest::Approx(1.5));
    CHECK(est.pose.position.y == doctest::Approx(-2.0));
    CHECK(est.pose.yaw == doctest::Approx(0.4));
  }

  SUBCASE("two equal particles at x 0 and 2 average to 1") {
    f.set_particles({{0.0, 0.0, 0.0, 0.0, 0.5},
                     {2.0, 0.0, 0.0, 0.0, 0.5}});
    const auto est = f.estimate();
    CHECK(est.pose.position.x == doctest::Approx(1.0));
    CHECK(est.cov_xx == doctest::Approx(1.0));  // sample variance
  }

  SUBCASE("yaws +3.1 and -3.1 average to pi, not zero") {
    f.set_particles({{0.0, 0.0, 0.0, 3.1, 0.5},
                     {0.0, 0.0, 0.0, -3.1, 0.5}});
    const auto est = f.estimate();
    CHECK(std::abs(est.pose.yaw) == doctest::Approx(kPi).epsilon(1e-9));
  }
}

TEST_CASE("degenerate filter: all noise off tracks ground truth exactly") {
  world::VoxelGrid grid(0.2, {1, 1, 1}, {0, 0, 0});
  const auto field = tiny_field(grid);
  MclConfig cfg = quiet_config(50);
  cfg.use_altimeter = false;
  cfg.use_yaw = false;
  MclFilter f(cfg, 5);

  Pose truth{{1.0, 1.0, 0.5}, 0.2};
  f.initialize(truth, {0, 0, 0, 0});
  const std::vector<Vec3> cloud = {{1.0, 0.5, 0.5}, {0.5, -0.5, 0.2}};
  for (int i = 0; i < 20; ++i) {
    const Increment inc{0.08, 0.02, 0.01, 0.03};
    const double c = std::cos(truth.yaw), s = std::sin(truth.yaw);
    truth.position.x += inc.dx * c - inc.dy * s;
    truth.position.y += inc.dx * s + inc.dy * c;
    truth.position.z += inc.dz;
    truth.yaw = wrap_angle(truth.yaw + inc.dyaw);
    f.predict(inc);
    if (f.should_update()) f.update(cloud, field, 0, 0, std::nullopt, 0, 0);
    const auto est = f.estimate();
    CHECK(est.pose.position.x == doctest::Approx(truth.position.x).epsilon(1e-9));
    CHECK(est.pose.position.y == doctest::Approx(truth.position.y).epsilon(1e-9));
    CHECK(est.pose.position.z == doctest::Approx(truth.position.z).epsilon(1e-9));
    CHECK(wrap_angle(est.pose.yaw - truth.yaw) ==
          doctest::Approx(0.0).epsilon(1e-9));
  }
}

TEST_CASE("invariants: particle count constant, weights sum to one") {
  world::VoxelGrid grid(0.2, {1, 1, 1}, {0, 0, 0});
  const auto field = tiny_field(grid);
  MclConfig cfg;
  cfg.particle_count = 300;
  MclFilter f(cfg, 9);
  f.initialize({{1, 1, 0.5}, 0}, {0.3, 0.3, 0.1, 0.1});
  const std::vector<Vec3> cloud = {{1.0, 0.5, 0.5}, {0.5, -0.5, 0.2},
                                   {2.0, 1.0, 0.4}};
  Rng rng(31);
  for (int i = 0; i < 30; ++i) {
    f.predict({rng.uniform(0, 0.1), rng.uniform(-0.05, 0.05), 0.0,
               rng.uniform(-0.05, 0.05)});
    if (f.should_update())
      f.update(cloud, field, 0, 0, std::nullopt, 0.5, 0.0);
    CHECK(f.particles().size() == 300);
    double sum = 0.0;
    for (const auto& p : f.particles()) sum += p.weight;
    CHECK(sum == doctest::Approx(1.0).epsilon(1e-9));
  }
}

TEST_CASE("subsample_cloud: uniform stride, deterministic, bounded") {
  std::vector<Vec3> cloud;
  for (int i = 0; i < 1837; ++i)
    cloud.push_back({static_cast<double>(i), 0.0, 0.0});
  const auto a = mcl::subsample_cloud(cloud, 500);
  const auto b = mcl::subsample_cloud(cloud, 500);
  CHECK(a.size() == 500);
  REQUIRE(a.size() == b.size());
  for (std::size_t i = 0; i < a.size(); ++i) CHECK(a[i].x == b[i].x);
  const auto small = mcl::subsample_cloud(cloud, 5000);
  CHECK(small.size() == cloud.size());
}

TEST_CASE("empty cloud: update skipped with a warning event") {
  world::VoxelGrid grid(0.2, {1, 1, 1}, {0, 0, 0});
  const auto field = tiny_field(grid);
  MclFilter f(quiet_config(10), 5);
  f.initialize({{1, 1, 0}, 0}, {0, 0, 0, 0});
  const auto before = f.particles();
  f.update({}, field, 0, 0, std::nullopt, 0, 0);
  const auto& after = f.particles();
  for (std::size_t i = 0; i < before.size(); ++i) {
    CHECK(before[i].x == after[i].x);
    CHECK(before[i].weight == after[i].weight);
  }
  CHECK(!f.events().of_kind("mcl_warning").empty());
}
