#pragma once

namespace critwave {

/// C^1 cutoff profile: 1 on s <= 1, 0 on s >= 2, 1 - 3 x^2 + 2 x^3 with x = s - 1 between.
inline double smooth_cutoff(double s) {
  if (s <= 1.0) return 1.0;
  if (s >= 2.0) return 0.0;
  const double x = s - 1.0;
  return 1.0 - 3.0 * x * x + 2.0 * x * x * x;
}

/// Derivative of smooth_cutoff.
inline double smooth_cutoff_derivative(double s) {
  if (s <= 1.0 || s >= 2.0) return 0.0;
  const double x = s - 1.0;
  return -6.0 * x + 6.0 * x * x;
}

}  // namespace critwave
