#pragma once

#include <cstdint>
#include <random>

namespace sbsos {

/// Seeded random source with hand-rolled transforms. std:: distributions are
/// implementation-defined, so replay across standard libraries would break;
/// the raw mt19937_64 stream is specified and these transforms are ours.
class Rng {
 public:
  explicit Rng(uint64_t seed) : engine_(seed) {}

  /// Uniform in [0, 1).
  double uniform() {
    return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
  }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  /// Uniform integer in [lo, hi] inclusive.
  int uniform_int(int lo, int hi) {
    return lo + static_cast<int>(uniform() * (static_cast<double>(hi) - lo + 1));
  }

  /// Gaussian via Box-Muller.
  double normal(double sigma = 1.0);

  /// Circular von Mises sample with mean 0 (Best-Fisher rejection sampler).
  double von_mises(double kappa);

  uint64_t raw() { return engine_(); }

 private:
  std::mt19937_64 engine_;
};

}  // namespace sbsos
