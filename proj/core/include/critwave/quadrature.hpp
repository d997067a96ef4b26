#pragma once

#include <functional>
#include <span>

namespace critwave {

using ScalarFn = std::function<double(double)>;

/// Adaptive Gauss-Kronrod integration of f over [a, b]; b may be +infinity.
double integrate(const ScalarFn& f, double a, double b, double rel_tol = 1e-13);

/// Integral over [0, +inf) split at the given interior points (sorted, positive).
/// Splitting at the length scales present in f keeps the adaptive rule from
/// stepping over narrow features.
double integrate_half_line(const ScalarFn& f, std::span<const double> splits,
                           double rel_tol = 1e-13);

/// Closed form of  int_{r0}^{r1} r^a (1 + r^2/c)^(-b) dr  via incomplete beta
/// functions. r1 may be +infinity. Requires a > -1 and 2b > a + 1.
double power_moment(double a, double b, double c, double r0, double r1);

}  // namespace critwave
