#include "critwave/ground_state.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <mutex>
#include <numbers>

#include "critwave/error.hpp"
#include "critwave/quadrature.hpp"

namespace critwave {
namespace {

double w_constant_c(int n) { return static_cast<double>(n * (n - 2)); }

// Cut point between the adaptive quadrature and the closed-form tail.
constexpr double kTailCut = 10.0;

}  // namespace

void validate(const GroundStateParams& params) {
  if (params.dimension < 3 || params.dimension > 5) {
    throw Error(Errc::invalid_parameter, "dimension must be 3, 4 or 5");
  }
  if (!(params.scale > 0.0) || !std::isfinite(params.scale)) {
    throw Error(Errc::invalid_parameter, "scale must be positive");
  }
  if (params.sign != 1 && params.sign != -1) {
    throw Error(Errc::invalid_parameter, "sign must be +1 or -1");
  }
}

double eval_w(double r, const GroundStateParams& params) {
  validate(params);
  if (r < 0.0) throw Error(Errc::invalid_parameter, "eval_w: r must be non-negative");
  const int n = params.dimension;
  const double lambda = params.scale;
  const double half = 0.5 * (n - 2);
  const double s = r / lambda;
  return params.sign * std::pow(lambda, -half) *
         std::pow(1.0 + s * s / w_constant_c(n), -half);
}

double eval_w_dr(double r, const GroundStateParams& params) {
  validate(params);
  if (r < 0.0) throw Error(Errc::invalid_parameter, "eval_w_dr: r must be non-negative");
  const int n = params.dimension;
  const double lambda = params.scale;
  const double half = 0.5 * (n - 2);
  const double c = w_constant_c(n);
  const double s = r / lambda;
  // d/ds (1 + s^2/c)^{-half} = -half * (2s/c) (1 + s^2/c)^{-half-1}
  const double dws = -half * (2.0 * s / c) * std::pow(1.0 + s * s / c, -half - 1.0);
  return params.sign * std::pow(lambda, -half) * dws / lambda;
}

double sphere_area(int dimension) {
  const double n = dimension;
  return 2.0 * std::pow(std::numbers::pi, 0.5 * n) / std::tgamma(0.5 * n);
}

const WConstants& w_constants(int dimension) {
  if (dimension < 3 || dimension > 5) {
    throw Error(Errc::invalid_parameter, "w_constants: dimension must be 3, 4 or 5");
  }
  static std::array<WConstants, 3> cache{};
  static std::array<std::once_flag, 3> once;
  const auto slot = static_cast<std::size_t>(dimension - 3);
  std::call_once(once[slot], [dimension, slot] {
    const GroundStateParams params{dimension, 1.0, 1};
    const double n = dimension;
    const double area = sphere_area(dimension);
    const double c = w_constant_c(dimension);
    const double crit = 2.0 * n / (n - 2.0);

    const double grad_core = integrate(
        [&](double r) {
          const double dw = eval_w_dr(r, params);
          return std::pow(r, n - 1.0) * dw * dw;
        },
        0.0, kTailCut);
    const double pot_core = integrate(
        [&](double r) { return std::pow(r, n - 1.0) * std::pow(eval_w(r, params), crit); },
        0.0, kTailCut);

    // Tails: r^{N-1} W'^2 = ((N-2)/c)^2 r^{N+1} (1+r^2/c)^{-N};
    //        r^{N-1} W^{2N/(N-2)} = r^{N-1} (1+r^2/c)^{-N}.
    const double k = (n - 2.0) / c;
    const double inf = std::numeric_limits<double>::infinity();
    const double grad_tail = k * k * power_moment(n + 1.0, n, c, kTailCut, inf);
    const double pot_tail = power_moment(n - 1.0, n, c, kTailCut, inf);

    WConstants w{};
    w.grad_norm_sq = area * (grad_core + grad_tail);
    w.potential_w = area * (pot_core + pot_tail);
    w.energy_w = w.grad_norm_sq / n;
    w.sobolev_threshold = std::pow(n / (n - 2.0), 0.5 * (n - 2.0)) * w.grad_norm_sq;
    cache[slot] = w;
  });
  return cache[slot];
}

double w_gradient_shell(double r0, double r1, const GroundStateParams& params) {
  validate(params);
  if (r0 < 0.0 || r1 < r0) throw Error(Errc::invalid_parameter, "bad shell radii");
  const double n = params.dimension;
  const double c = w_constant_c(params.dimension);
  const double k = (n - 2.0) / c;
  const double lambda = params.scale;
  return sphere_area(params.dimension) * k * k *
         power_moment(n + 1.0, n, c, r0 / lambda, r1 / lambda);
}

double w_potential_shell(double r0, double r1, const GroundStateParams& params) {
  validate(params);
  if (r0 < 0.0 || r1 < r0) throw Error(Errc::invalid_parameter, "bad shell radii");
  const double n = params.dimension;
  const double c = w_constant_c(params.dimension);
  const double lambda = params.scale;
  return sphere_area(params.dimension) *
         power_moment(n - 1.0, n, c, r0 / lambda, r1 / lambda);
}

double w_power_integral(double p, const GroundStateParams& params) {
  validate(params);
  const double n = params.dimension;
  const double c = w_constant_c(params.dimension);
  const double lambda = params.scale;
  const double b = 0.5 * p * (n - 2.0);
  // int |lambda^{-(N-2)/2} W(x/lambda)|^p dx = lambda^{N - p(N-2)/2} int W^p.
  return std::pow(lambda, n - b) * sphere_area(params.dimension) *
         power_moment(n - 1.0, b, c, 0.0, std::numeric_limits<double>::infinity());
}

RadialProfile RadialProfile::zero() {
  return {[](double) { return 0.0; }, [](double) { return 0.0; }, {}};
}

RadialProfile RadialProfile::ground_state(const GroundStateParams& params) {
  validate(params);
  return {[params](double r) { return eval_w(r, params); },
          [params](double r) { return eval_w_dr(r, params); },
          {params.scale, 10.0 * params.scale, 100.0 * params.scale}};
}

RadialProfile RadialProfile::gaussian(double amplitude, double center, double width) {
  if (!(width > 0.0)) throw Error(Errc::invalid_parameter, "gaussian width must be positive");
  auto value = [=](double r) {
    const double z = (r - center) / width;
    return amplitude * std::exp(-z * z);
  };
  auto derivative = [=](double r) {
    const double z = (r - center) / width;
    return -2.0 * z / width * amplitude * std::exp(-z * z);
  };
  std::vector<double> scales;
  for (double k : {-6.0, -3.0, -1.0, 0.0, 1.0, 3.0, 6.0}) {
    const double s = center + k * width;
    if (s > 0.0) scales.push_back(s);
  }
  return {value, derivative, scales};
}

RadialProfile operator+(const RadialProfile& a, const RadialProfile& b) {
  std::vector<double> scales = a.scales;
  scales.insert(scales.end(), b.scales.begin(), b.scales.end());
  std::sort(scales.begin(), scales.end());
  return {[va = a.value, vb = b.value](double r) { return va(r) + vb(r); },
          [da = a.derivative, db = b.derivative](double r) { return da(r) + db(r); },
          scales};
}

RadialProfile operator*(double c, const RadialProfile& a) {
  return {[c, v = a.value](double r) { return c * v(r); },
          [c, d = a.derivative](double r) { return c * d(r); }, a.scales};
}

}  // namespace critwave
