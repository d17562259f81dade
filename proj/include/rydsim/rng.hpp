#pragma once

// Deterministic random streams for Monte Carlo sampling.
//
// std::mt19937_64 is bit-exact across platforms, but the std distributions
// are not; Gaussians are therefore generated with an explicit Box-Muller
// transform so that a given seed yields the same shot on every build.
// Experiments seed one stream per shot (base seed + shot index), which makes
// results independent of how shots are distributed over worker threads.

#include <cstdint>
#include <random>

namespace rydsim {

class NoiseRng {
 public:
  explicit NoiseRng(std::uint64_t seed) : eng_(seed) {}

  /// Uniform double in [0, 1) with 53 random bits.
  double uniform() {
    return static_cast<double>(eng_() >> 11) * 0x1.0p-53;
  }

  /// Standard normal via Box-Muller (pairs cached).
  double normal() {
    if (haveSpare_) {
      haveSpare_ = false;
      return spare_;
    }
    double u1 = 1.0 - uniform();  // (0, 1], keeps log finite
    double u2 = uniform();
    double r = std::sqrt(-2.0 * std::log(u1));
    double a = 6.283185307179586476925286766559 * u2;
    spare_ = r * std::sin(a);
    haveSpare_ = true;
    return r * std::cos(a);
  }

  double normal(double mean, double sigma) { return mean + sigma * normal(); }

  /// Normal truncated to (0, inf) by rejection (used for power factors).
  double truncated_normal_positive(double mean, double sigma) {
    for (;;) {
      double x = normal(mean, sigma);
      if (x > 0.0) return x;
    }
  }

 private:
  std::mt19937_64 eng_;
  bool haveSpare_ = false;
  double spare_ = 0.0;
};

} // namespace rydsim
