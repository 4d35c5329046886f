#pragma once

#include <cstdint>
#include <random>

namespace firenav {

/// Deterministic random source. Gaussian draws use Box-Muller on top of the
/// raw 64-bit stream instead of std::normal_distribution, whose output is
/// implementation defined; identical seeds must reproduce identical traces.
class Rng {
 public:
  explicit Rng(uint64_t seed) : gen_(seed) {}

  /// Uniform in [0, 1).
  double uniform() {
    return (gen_() >> 11) * (1.0 / 9007199254740992.0);  // 2^53
  }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  /// Standard normal draw.
  double gaussian() {
    double u1 = uniform();
    while (u1 <= 0.0) u1 = uniform();
    const double u2 = uniform();
    constexpr double kTwoPi = 6.28318530717958647692;
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(kTwoPi * u2);
  }

  double gaussian(double mean, double sigma) {
    return sigma > 0.0 ? mean + sigma * gaussian() : mean;
  }

  /// Uniform integer in [0, n).
  uint64_t integer(uint64_t n) { return n > 0 ? gen_() % n : 0; }

  /// Derives an independent stream; used to give every simulated sensor its
  /// own sequence so evaluation order cannot change results.
  Rng fork(uint64_t stream) {
    const uint64_t mix = gen_() ^ (0x9e3779b97f4a7c15ULL * (stream + 1));
    return Rng(mix);
  }

 private:
  std::mt19937_64 gen_;
};

}  // namespace firenav
