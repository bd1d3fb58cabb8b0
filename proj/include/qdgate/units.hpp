#pragma once

#include <complex>
#include <cmath>
#include <numbers>

namespace qdgate {

// Energies are in meV, times in ps, rates in 1/ps, phases in radians.

/// Reduced Planck constant in meV·ps.
inline constexpr double kHbar = 0.6582119569;

inline constexpr double kPi = std::numbers::pi;

using Complex = std::complex<double>;
inline constexpr Complex kI{0.0, 1.0};

/// Wraps an angle into (-pi, pi].
inline double wrap_phase(double phi) {
  double w = std::remainder(phi, 2.0 * kPi);
  if (w <= -kPi) w += 2.0 * kPi;
  return w;
}

/// Distance between two angles on the circle, in [0, pi].
inline double phase_distance(double a, double b) { return std::abs(wrap_phase(a - b)); }

}  // namespace qdgate
