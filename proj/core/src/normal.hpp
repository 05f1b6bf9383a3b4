#pragma once

#include <cmath>
#include <numbers>
#include <random>

namespace qaia::detail {

// std::normal_distribution output differs between standard libraries; this
// keeps seeded instances and trajectories identical across toolchains.
inline double standard_normal(std::mt19937_64& rng) {
  constexpr double kScale = 0x1.0p-53;
  const double u1 = (static_cast<double>(rng() >> 11) + 0.5) * kScale;  // (0, 1)
  const double u2 = static_cast<double>(rng() >> 11) * kScale;
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

}  // namespace qaia::detail
