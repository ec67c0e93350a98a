#pragma once

#include <cmath>
#include <cstdint>
#include <random>

#include "cubepose/geometry.hpp"

namespace cubepose {

// Stateless mixer used to derive independent per-trial seeds from one master
// seed. Identical output on every platform.
inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

// Uniform double in [0, 1). std::uniform_real_distribution is
// implementation-defined, so outputs would differ across standard libraries;
// this construction is bit-stable everywhere.
inline double uniform01(std::mt19937_64& gen) {
  return static_cast<double>(gen() >> 11) * 0x1.0p-53;
}

inline double uniform_range(std::mt19937_64& gen, double lo, double hi) {
  return lo + (hi - lo) * uniform01(gen);
}

// Uniform direction on the unit sphere (Marsaglia rejection).
inline Vec3 uniform_unit_vector(std::mt19937_64& gen) {
  for (;;) {
    const double a = uniform_range(gen, -1.0, 1.0);
    const double b = uniform_range(gen, -1.0, 1.0);
    const double s = a * a + b * b;
    if (s >= 1.0 || s == 0.0) continue;
    const double f = 2.0 * std::sqrt(1.0 - s);
    return Vec3{a * f, b * f, 1.0 - 2.0 * s};
  }
}

// Uniform point in the axis-aligned box [lo, hi]^3 componentwise.
inline Vec3 uniform_in_box(std::mt19937_64& gen, const Vec3& lo, const Vec3& hi) {
  return Vec3{uniform_range(gen, lo.x, hi.x), uniform_range(gen, lo.y, hi.y),
              uniform_range(gen, lo.z, hi.z)};
}

// Uniform point in the solid ball of the given radius.
inline Vec3 uniform_in_ball(std::mt19937_64& gen, double radius) {
  const Vec3 dir = uniform_unit_vector(gen);
  return dir * (radius * std::cbrt(uniform01(gen)));
}

inline Rotation random_rotation(std::mt19937_64& gen) {
  const Vec3 axis = uniform_unit_vector(gen);
  const double angle = uniform_range(gen, 0.0, kPi);
  return axis_angle_to_rotation(AxisAngle{axis * angle});
}

}  // namespace cubepose
