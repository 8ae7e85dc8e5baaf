#pragma once

#include <cmath>
#include <cstdint>
#include <random>

#include "nlwave/types.hpp"

namespace nlwave {

/// Deterministic random source. Draws are hand-rolled on top of mt19937_64 so
/// that streams are identical across standard-library implementations
/// (std::normal_distribution is not portable).
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : gen_(seed) {}

  /// Uniform on [0, 1).
  Real uniform() { return static_cast<Real>(gen_() >> 11) * 0x1.0p-53; }

  /// Uniform on [lo, hi).
  Real uniform(Real lo, Real hi) { return lo + (hi - lo) * uniform(); }

  /// Standard normal via Box-Muller.
  Real normal() {
    if (have_spare_) {
      have_spare_ = false;
      return spare_;
    }
    Real u1 = uniform();
    while (u1 <= 0.0) u1 = uniform();
    const Real u2 = uniform();
    const Real r = std::sqrt(-2.0 * std::log(u1));
    const Real theta = 2.0 * M_PI * u2;
    spare_ = r * std::sin(theta);
    have_spare_ = true;
    return r * std::cos(theta);
  }

  Vector normal_vector(Index n) {
    Vector v(n);
    for (Index i = 0; i < n; ++i) v[i] = normal();
    return v;
  }

  std::uint64_t next_u64() { return gen_(); }

 private:
  std::mt19937_64 gen_;
  bool have_spare_ = false;
  Real spare_ = 0.0;
};

}  // namespace nlwave
