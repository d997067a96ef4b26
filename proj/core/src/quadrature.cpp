#include "critwave/quadrature.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/special_functions/beta.hpp>

#include <cmath>
#include <limits>
#include <vector>

#include "critwave/error.hpp"

namespace critwave {

const char* to_string(Errc code) noexcept {
  switch (code) {
    case Errc::invalid_parameter: return "invalid-parameter";
    case Errc::out_of_domain: return "out-of-domain";
    case Errc::invalid_data: return "invalid-data";
    case Errc::invalid_band: return "invalid-band";
    case Errc::degenerate_input: return "degenerate-input";
    case Errc::invalid_config: return "invalid-config";
    case Errc::invalid_input: return "invalid-input";
    case Errc::fit_unavailable: return "fit-unavailable";
    case Errc::io_error: return "io-error";
  }
  return "unknown";
}

double integrate(const ScalarFn& f, double a, double b, double rel_tol) {
  using boost::math::quadrature::gauss_kronrod;
  if (a == b) return 0.0;
  double error = 0.0;
  return gauss_kronrod<double, 31>::integrate(f, a, b, 12, rel_tol, &error);
}

double integrate_half_line(const ScalarFn& f, std::span<const double> splits,
                           double rel_tol) {
  std::vector<double> edges{0.0};
  for (double s : splits) {
    if (s > edges.back()) edges.push_back(s);
  }
  double total = 0.0;
  for (std::size_t i = 0; i + 1 < edges.size(); ++i) {
    total += integrate(f, edges[i], edges[i + 1], rel_tol);
  }
  total += integrate(f, edges.back(), std::numeric_limits<double>::infinity(), rel_tol);
  return total;
}

double power_moment(double a, double b, double c, double r0, double r1) {
  const double p = 0.5 * (a + 1.0);
  const double q = b - p;
  if (!(p > 0.0) || !(q > 0.0) || !(c > 0.0)) {
    throw Error(Errc::invalid_parameter, "power_moment: divergent parameters");
  }
  if (r0 < 0.0 || r1 < r0) {
    throw Error(Errc::invalid_parameter, "power_moment: bad interval");
  }
  const double prefactor = 0.5 * std::pow(c, p);
  // x(r) = t / (1 + t) with t = r^2 / c; use the complement 1 - x = 1/(1+t)
  // for the tail to keep precision at large r.
  auto x_of = [c](double r) {
    const double t = r * r / c;
    return t / (1.0 + t);
  };
  const double x0 = x_of(r0);
  if (std::isinf(r1)) {
    return prefactor * boost::math::betac(p, q, x0);
  }
  const double x1 = x_of(r1);
  if (x0 > 0.5) {
    return prefactor * (boost::math::betac(p, q, x0) - boost::math::betac(p, q, x1));
  }
  return prefactor * (boost::math::beta(p, q, x1) - boost::math::beta(p, q, x0));
}

}  // namespace critwave
