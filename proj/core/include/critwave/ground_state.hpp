#pragma once

#include <functional>
#include <vector>

namespace critwave {

/// Parameters selecting one member  iota * lambda^{-(N-2)/2} W(x / lambda)
/// of the ground-state family.
struct GroundStateParams {
  int dimension = 3;
  double scale = 1.0;
  int sign = +1;
};

void validate(const GroundStateParams& params);

/// Closed-form radial ground state  W(r) = (1 + r^2/(N(N-2)))^{-(N-2)/2},
/// rescaled and signed according to params.
double eval_w(double r, const GroundStateParams& params = {});

/// Radial derivative d/dr of eval_w.
double eval_w_dr(double r, const GroundStateParams& params = {});

struct WConstants {
  double grad_norm_sq;       ///< int |grad W|^2 dx
  double energy_w;           ///< E(W, 0) = grad_norm_sq / N
  double potential_w;        ///< int W^{2N/(N-2)} dx
  double sobolev_threshold;  ///< (N/(N-2))^{(N-2)/2} * grad_norm_sq
};

/// Ground-state constants for N in {3, 4, 5}. Computed once per dimension by
/// adaptive quadrature on [0, R_cut] plus a closed-form tail, then cached.
const WConstants& w_constants(int dimension);

/// Surface area of the unit sphere in R^N.
double sphere_area(int dimension);

/// int_{r0 <= |x| <= r1} |grad W_lambda|^2 dx in closed form (N = params.dimension).
/// r1 may be +infinity. Scale invariant: depends on r/lambda only.
double w_gradient_shell(double r0, double r1, const GroundStateParams& params = {});

/// int_{r0 <= |x| <= r1} |W_lambda|^{2N/(N-2)} dx in closed form.
double w_potential_shell(double r0, double r1, const GroundStateParams& params = {});

/// int_{R^N} |W_lambda|^p dx in closed form (p (N-2) > N for convergence).
double w_power_integral(double p, const GroundStateParams& params = {});

/// Radial profile given by value and derivative callables, with the length
/// scales of its features (used to split quadrature intervals).
struct RadialProfile {
  std::function<double(double)> value;
  std::function<double(double)> derivative;
  std::vector<double> scales;

  static RadialProfile zero();
  static RadialProfile ground_state(const GroundStateParams& params = {});
  /// amplitude * exp(-(r - center)^2 / width^2)
  static RadialProfile gaussian(double amplitude, double center, double width);

  double operator()(double r) const { return value(r); }
};

RadialProfile operator+(const RadialProfile& a, const RadialProfile& b);
RadialProfile operator*(double c, const RadialProfile& a);

}  // namespace critwave
