#pragma once

#include "spot/core.hpp"

#include <cstdint>
#include <random>

namespace spot {

// Seedable generator with hand-rolled distributions. std distributions
// are implementation-defined, which would break byte-identical replay
// across standard libraries; these are pinned.
class Rng {
 public:
  explicit Rng(uint64_t seed = 0) : engine_(seed) {}

  uint64_t bits() { return engine_(); }

  // Uniform in [0, 1).
  double uniform() { return (engine_() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  // Marsaglia polar method, one value per call (pair cache).
  double gaussian() {
    if (has_spare_) {
      has_spare_ = false;
      return spare_;
    }
    double u, v, s;
    do {
      u = 2.0 * uniform() - 1.0;
      v = 2.0 * uniform() - 1.0;
      s = u * u + v * v;
    } while (s >= 1.0 || s == 0.0);
    const double m = std::sqrt(-2.0 * std::log(s) / s);
    spare_ = v * m;
    has_spare_ = true;
    return u * m;
  }

  Vec3 uniform_in_box(const AABB &box) {
    return Vec3(uniform(box.lo.x(), box.hi.x()), uniform(box.lo.y(), box.hi.y()),
                uniform(box.lo.z(), box.hi.z()));
  }

  // Uniform over the unit ball.
  Vec3 uniform_in_ball() {
    Vec3 dir(gaussian(), gaussian(), gaussian());
    double n = dir.norm();
    while (n < 1e-12) {
      dir = Vec3(gaussian(), gaussian(), gaussian());
      n = dir.norm();
    }
    return dir / n * std::cbrt(uniform());
  }

  // Derive an independent stream, e.g. one per trial.
  static uint64_t mix(uint64_t seed, uint64_t stream) {
    uint64_t z = seed + 0x9e3779b97f4a7c15ull * (stream + 1);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
  }

 private:
  std::mt19937_64 engine_;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

}  // namespace spot
