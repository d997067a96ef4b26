#include "critwave/analysis.hpp"

#include <algorithm>
#include <functional>
#include <cmath>
#include <numbers>

#include "critwave/cutoff.hpp"
#include "critwave/dalembert.hpp"
#include "critwave/energy.hpp"
#include "critwave/error.hpp"
#include "critwave/ground_state.hpp"
#include "critwave/solver.hpp"

namespace critwave {

namespace {

constexpr double kFourPi = 4.0 * std::numbers::pi;

double grad_w_sq() { return w_constants(3).grad_norm_sq; }

// inf { rho in [0, r_max] : f(rho) >= level } for nondecreasing f.
std::optional<double> bisect_infimum(const std::function<double(double)>& f, double r_max, double level) {
  if (f(r_max) < level) return std::nullopt;
  if (f(0.0) >= level) return 0.0;
  double lo = 0.0, hi = r_max;
  for (int it = 0; it < 200 && hi - lo > 1e-14 * std::max(1.0, hi); ++it) {
    const double mid = 0.5 * (lo + hi);
    if (f(mid) >= level) hi = mid;
    else lo = mid;
  }
  return hi;
}

// Nodal d h / d r on a possibly graded mesh (second order).
std::vector<double> nodal_derivative(const FieldState& field) {
  const auto r = field.mesh->nodes();
  const auto& h = field.h;
  const std::size_t n = h.size();
  std::vector<double> d(n);
  auto three = [&](std::size_t a, std::size_t b, std::size_t c, std::size_t at) {
    // derivative at r[at] of the quadratic through (a, b, c)
    const double x = r[at];
    const double la = ((x - r[b]) + (x - r[c])) / ((r[a] - r[b]) * (r[a] - r[c]));
    const double lb = ((x - r[a]) + (x - r[c])) / ((r[b] - r[a]) * (r[b] - r[c]));
    const double lc = ((x - r[a]) + (x - r[b])) / ((r[c] - r[a]) * (r[c] - r[b]));
    return la * h[a] + lb * h[b] + lc * h[c];
  };
  d[0] = three(0, 1, 2, 0);
  for (std::size_t i = 1; i + 1 < n; ++i) d[i] = three(i - 1, i, i + 1, i);
  d[n - 1] = three(n - 3, n - 2, n - 1, n - 1);
  return d;
}

double trapezoid(std::span<const double> r, const std::function<double(std::size_t)>& f) {
  double total = 0.0;
  double prev = f(0);
  for (std::size_t i = 0; i + 1 < r.size(); ++i) {
    const double next = f(i + 1);
    total += 0.5 * (r[i + 1] - r[i]) * (prev + next);
    prev = next;
  }
  return total;
}

// Three-point derivative of samples y(t) at index k (one-sided at the ends).
double time_derivative(std::span<const double> t, std::span<const double> y, std::size_t k) {
  const std::size_t n = t.size();
  std::size_t a, b, c;
  if (k == 0) { a = 0; b = 1; c = 2; }
  else if (k + 1 == n) { a = n - 3; b = n - 2; c = n - 1; }
  else { a = k - 1; b = k; c = k + 1; }
  const double x = t[k];
  const double la = ((x - t[b]) + (x - t[c])) / ((t[a] - t[b]) * (t[a] - t[c]));
  const double lb = ((x - t[a]) + (x - t[c])) / ((t[b] - t[a]) * (t[b] - t[c]));
  const double lc = ((x - t[a]) + (x - t[b])) / ((t[c] - t[a]) * (t[c] - t[b]));
  return la * y[a] + lb * y[b] + lc * y[c];
}

FieldState reversed(const FieldState& s) {
  FieldState out = s;
  for (double& v : out.p) v = -v;
  return out;
}

}  // namespace

double SingularSplit::cone_radius(std::size_t k) const { return (t_est - a.at(k).t) + margin; }

SingularSplit singular_part(std::span<const FieldState> frames, double t_est, const SplitOptions& options) {
  if (frames.empty()) throw Error(Errc::invalid_input, "singular_part: no frames");
  std::size_t k0 = frames.size();
  for (std::size_t k = 0; k < frames.size(); ++k) {
    if (frames[k].t < t_est && (!options.t0 || frames[k].t <= *options.t0 + 1e-12)) k0 = k;
  }
  const double last_gap = frames.size() > 1 ? frames.back().t - frames[frames.size() - 2].t : 0.0;
  if (k0 == frames.size() || t_est > frames.back().t + last_gap) {
    throw Error(Errc::invalid_input, "singular_part: T_est not bracketed by snapshots");
  }
  const FieldState& u0 = frames[k0];
  if (!u0.mesh->is_uniform()) throw Error(Errc::invalid_input, "singular_part: uniform mesh required");
  const double hx = u0.mesh->h();

  SingularSplit split;
  split.t_est = t_est;
  split.t0 = u0.t;
  split.margin = options.margin >= 0.0 ? options.margin : 2.0 * hx + 2.0 * options.cfl * hx;
  const double r_c = (t_est - u0.t) + split.margin;

  FieldState v0 = u0;
  const auto r = u0.mesh->nodes();
  for (std::size_t i = 0; i < v0.size(); ++i) {
    const double chi = 1.0 - smooth_cutoff(2.0 * r[i] / r_c);
    v0.h[i] *= chi;
    v0.p[i] *= chi;
  }

  std::size_t first = 0;
  while (first < k0 && frames[first].t < options.t_begin) ++first;

  // Backwards in time: evolve the time-reversed data forward. If the cut-off
  // data blow up before reaching an earlier frame, the split stops there.
  std::vector<FieldState> vs;
  vs.push_back(v0);
  FieldState w = reversed(v0);
  w.t = 0.0;
  Stepper stepper(options.nonlinear);
  std::size_t earliest = k0;
  for (std::size_t k = k0; k-- > first;) {
    const double target = u0.t - frames[k].t;
    bool ok = true;
    while (ok && w.t < target) {
      double dt = adaptive_dt(w, options.cfl);
      if (dt < options.dt_min) {
        ok = false;
        break;
      }
      if (w.t + dt >= target - 1e-12 * std::max(1.0, target)) dt = target - w.t;
      ok = stepper.advance(w, dt) && w.sup_norm() <= options.blowup_threshold;
    }
    if (!ok) {
      split.truncated = true;
      break;
    }
    w.t = target;
    FieldState v = reversed(w);
    v.t = frames[k].t;
    vs.push_back(std::move(v));
    earliest = k;
  }
  std::reverse(vs.begin(), vs.end());
  split.first_frame = earliest;

  for (std::size_t k = earliest; k <= k0; ++k) {
    FieldState v = std::move(vs[k - earliest]);
    v.mesh = frames[k].mesh;
    FieldState a = combine(1.0, frames[k], -1.0, v);
    a.t = frames[k].t;
    split.a.push_back(std::move(a));
    split.v.push_back(std::move(v));
  }
  return split;
}

double lambda1_default_level() { return w_gradient_shell(0.0, 1.0); }

ConcentrationRadii concentration_radii(const FieldState& field, const FieldState* singular,
                                       const RadiiThresholds& thresholds) {
  const double g = grad_w_sq();
  const CumulativeEnergy cu(field);
  const CumulativeEnergy ca(singular ? *singular : field);
  const double r_max = field.mesh->r_max();
  ConcentrationRadii out;
  out.mu = bisect_infimum([&](double x) { return ca.gradient(x) + ca.kinetic(x); }, r_max,
                          thresholds.mu_fraction * g);
  const double total = cu.gradient(r_max) + cu.kinetic(r_max);
  const double nu_level = thresholds.nu_fraction * g;
  if (total > nu_level) {
    out.nu = bisect_infimum([&](double x) { return cu.gradient(x) + cu.kinetic(x); }, r_max, total - nu_level);
  }
  const double level = thresholds.lambda1_level >= 0.0 ? thresholds.lambda1_level : lambda1_default_level();
  out.lambda1 = bisect_infimum([&](double x) { return ca.gradient(x); }, r_max, level);
  return out;
}

double sign_projection(const FieldState& a, double lambda) {
  const GroundStateParams w{3, lambda, +1};
  return gradient_pairing(a, [&](double r) { return eval_w_dr(r, w); });
}

double d_functional(const FieldState& field) {
  const EnergyReport e = energy(field);
  return 8.0 * e.kinetic_sq + 4.0 * (e.gradient_sq - grad_w_sq());
}

double g_r(const FieldState& field, double radius) {
  const auto r = field.mesh->nodes();
  return 2.0 * kFourPi *
         trapezoid(r, [&](std::size_t i) { return field.h[i] * field.p[i] * smooth_cutoff(r[i] / radius); });
}

double weighted_tail(const FieldState& field, double radius) {
  if (radius >= field.mesh->r_max()) return 0.0;
  const EnergyReport e = energy(field, Region::exterior(std::max(radius, 0.0)));
  return e.hardy_sq + e.potential + e.gradient_sq + e.kinetic_sq;
}

std::pair<double, double> virial_values(const FieldState& field) {
  const auto r = field.mesh->nodes();
  const auto dh = nodal_derivative(field);
  const double z1 = kFourPi * trapezoid(r, [&](std::size_t i) { return field.h[i] * field.p[i]; });
  const double z2 =
      kFourPi * trapezoid(r, [&](std::size_t i) { return (r[i] * dh[i] - field.h[i]) * field.p[i]; });
  return {z1, z2};
}

VirialSeries virial_series(std::span<const FieldState> frames, std::span<const FieldState> regular,
                           bool nonlinear) {
  if (frames.size() < 3) throw Error(Errc::invalid_input, "virial_series: need at least 3 frames");
  if (!regular.empty() && regular.size() != frames.size()) {
    throw Error(Errc::invalid_input, "virial_series: regular part must match frames");
  }
  const double nl = nonlinear ? 1.0 : 0.0;
  VirialSeries out;
  const std::size_t n = frames.size();
  std::vector<double> t(n), z1(n), z2(n), zz(n);
  for (std::size_t k = 0; k < n; ++k) {
    VirialPoint pt;
    pt.t = frames[k].t;
    auto [a1, a2] = virial_values(frames[k]);
    const EnergyReport e = energy(frames[k]);
    pt.rhs1 = e.kinetic_sq - e.gradient_sq + nl * e.potential;
    pt.rhs2 = -1.5 * e.kinetic_sq + 0.5 * (e.gradient_sq - nl * e.potential);
    if (!regular.empty()) {
      auto [b1, b2] = virial_values(regular[k]);
      a1 -= b1;
      a2 -= b2;
      const EnergyReport ev = energy(regular[k]);
      pt.rhs1 -= ev.kinetic_sq - ev.gradient_sq + nl * ev.potential;
      pt.rhs2 -= -1.5 * ev.kinetic_sq + 0.5 * (ev.gradient_sq - nl * ev.potential);
    }
    pt.z1 = a1;
    pt.z2 = a2;
    pt.Z = 0.5 * a1 + a2;
    pt.rhsZ = 0.5 * pt.rhs1 + pt.rhs2;
    t[k] = pt.t;
    z1[k] = pt.z1;
    z2[k] = pt.z2;
    zz[k] = pt.Z;
    out.points.push_back(pt);
  }
  for (std::size_t k = 0; k < n; ++k) {
    auto& pt = out.points[k];
    pt.dz1 = time_derivative(t, z1, k);
    pt.dz2 = time_derivative(t, z2, k);
    pt.dZ = time_derivative(t, zz, k);
    if (k == 0 || k + 1 == n) continue;
    out.max_defect1 = std::max(out.max_defect1, pt.defect1());
    out.max_defect2 = std::max(out.max_defect2, pt.defect2());
    out.max_defectZ = std::max(out.max_defectZ, pt.defectZ());
  }
  return out;
}

double g_r_rate(const FieldState& field, double radius, bool nonlinear) {
  const auto r = field.mesh->nodes();
  const auto& h = field.h;
  const std::size_t n = h.size();
  if (n < 3) throw Error(Errc::invalid_data, "g_r_rate: mesh too small");
  auto second = [&](std::size_t a) {
    // second derivative of the quadratic through nodes a, a+1, a+2
    const double d1 = (h[a + 1] - h[a]) / (r[a + 1] - r[a]);
    const double d2 = (h[a + 2] - h[a + 1]) / (r[a + 2] - r[a + 1]);
    return 2.0 * (d2 - d1) / (r[a + 2] - r[a]);
  };
  auto integrand = [&](std::size_t i) {
    if (i == 0) return 0.0;
    double htt = second(std::min(i - 1, n - 3));
    if (nonlinear) {
      const double u = h[i] / r[i];
      htt += r[i] * u * u * u * u * u;
    }
    return (field.p[i] * field.p[i] + h[i] * htt) * smooth_cutoff(r[i] / radius);
  };
  return 2.0 * kFourPi * trapezoid(r, integrand);
}

GrSeries g_r_series(std::span<const FieldState> frames, double radius, bool nonlinear) {
  if (frames.size() < 3) throw Error(Errc::invalid_input, "g_r_series: need at least 3 frames");
  const double nl = nonlinear ? 1.0 : 0.0;
  GrSeries out;
  out.radius = radius;
  out.max_excess = -std::numeric_limits<double>::infinity();
  const std::size_t n = frames.size();
  std::vector<double> t(n), g(n), rhs(n);
  for (std::size_t k = 0; k < n; ++k) {
    GrPoint pt;
    pt.t = t[k] = frames[k].t;
    pt.g = g[k] = g_r(frames[k], radius);
    pt.dg = g_r_rate(frames[k], radius, nonlinear);
    const EnergyReport e = energy(frames[k]);
    pt.d = 8.0 * e.kinetic_sq + 4.0 * (e.gradient_sq - grad_w_sq());
    rhs[k] = 2.0 * e.kinetic_sq - 2.0 * e.gradient_sq + 2.0 * nl * e.potential;
    pt.tail = weighted_tail(frames[k], radius);
    pt.bound = kGrBoundConstant * pt.tail;
    out.points.push_back(pt);
  }
  for (std::size_t k = 0; k < n; ++k) {
    auto& pt = out.points[k];
    pt.dg_fd = time_derivative(t, g, k);
    pt.a_r = pt.dg - rhs[k];
    out.max_excess = std::max(out.max_excess, std::abs(pt.a_r) - pt.bound);
    if (k == 0 || k + 1 == n) continue;
    out.max_fd_defect = std::max(out.max_fd_defect, std::abs(pt.dg_fd - pt.dg));
  }
  return out;
}

double rho_tail(std::span<const FieldState> frames, double radius) {
  double sup = 0.0;
  for (const auto& f : frames) sup = std::max(sup, weighted_tail(f, radius));
  return sup;
}

std::vector<double> cone_energy(std::span<const FieldState> frames, double t_est, double k) {
  std::vector<double> out;
  out.reserve(frames.size());
  for (const auto& f : frames) {
    if (f.t >= t_est) {
      out.push_back(0.0);
      continue;
    }
    const CumulativeEnergy c(f);
    const double radius = k * (t_est - f.t);
    out.push_back(c.gradient(radius) + c.kinetic(radius));
  }
  return out;
}

FitResult fit_exponent(std::span<const double> times, std::span<const double> lambdas, double t_est) {
  if (times.size() != lambdas.size()) throw Error(Errc::invalid_input, "fit_exponent: size mismatch");
  std::vector<double> x, y;
  for (std::size_t i = 0; i < times.size(); ++i) {
    if (times[i] < t_est && lambdas[i] > 0.0 && std::isfinite(lambdas[i])) {
      x.push_back(std::log(t_est - times[i]));
      y.push_back(std::log(lambdas[i]));
    }
  }
  if (x.size() < 10) throw Error(Errc::fit_unavailable, "fit_exponent: fewer than 10 usable samples");
  const double n = static_cast<double>(x.size());
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= n;
  my /= n;
  double sxx = 0.0, sxy = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
    syy += (y[i] - my) * (y[i] - my);
  }
  if (!(sxx > 1e-20 * n)) throw Error(Errc::fit_unavailable, "fit_exponent: degenerate time range");
  FitResult fit;
  fit.points = x.size();
  fit.slope = sxy / sxx;
  fit.nu_hat = fit.slope - 1.0;
  fit.intercept = my - fit.slope * mx;
  double ss_res = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double e = y[i] - (fit.intercept + fit.slope * x[i]);
    ss_res += e * e;
  }
  fit.r_squared = syy > 0.0 ? 1.0 - ss_res / syy : 1.0;
  fit.concentrating = fit.slope > 1e-3;
  return fit;
}

double normal01(std::mt19937_64& rng) {
  const double u1 = 1.0 - uniform01(rng);
  const double u2 = uniform01(rng);
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

DiagnosticsRow diagnostics_row(const FieldState& u, const FieldState* regular,
                               const DiagnosticsOptions& options, bool nonlinear) {
  (void)nonlinear;
  DiagnosticsRow row;
  row.t = u.t;
  const EnergyReport e = energy(u);
  row.energy = e.total_energy;
  row.sup_u = u.sup_norm();
  std::optional<FieldState> a;
  if (regular) a = combine(1.0, u, -1.0, *regular);
  const FieldState& sing = a ? *a : u;
  const ConcentrationRadii radii = concentration_radii(u, &sing);
  row.mu = radii.mu;
  row.nu = radii.nu;
  row.lambda1 = radii.lambda1;
  if (radii.lambda1 && *radii.lambda1 > 0.0) row.f = sign_projection(sing, *radii.lambda1);
  auto [z1, z2] = virial_values(u);
  if (regular) {
    auto [w1, w2] = virial_values(*regular);
    z1 -= w1;
    z2 -= w2;
  }
  row.z1 = z1;
  row.z2 = z2;
  row.Z = 0.5 * z1 + z2;
  row.d = 8.0 * e.kinetic_sq + 4.0 * (e.gradient_sq - grad_w_sq());
  for (double radius : options.g_radii) row.g.push_back(g_r(u, radius));
  const CumulativeEnergy c(u);
  for (double radius : options.ball_radii) row.ball.push_back(0.5 * (c.gradient(radius) + c.kinetic(radius)));
  for (double radius : options.rho_radii) row.rho.push_back(weighted_tail(u, radius));
  return row;
}

DiagnosticsSeries diagnostics_series(std::span<const FieldState> frames,
                                     std::span<const FieldState* const> regular,
                                     const DiagnosticsOptions& options, bool nonlinear) {
  DiagnosticsSeries series;
  series.options = options;
  std::vector<double> running(options.rho_radii.size(), 0.0);
  for (std::size_t k = 0; k < frames.size(); ++k) {
    const FieldState* v = k < regular.size() ? regular[k] : nullptr;
    DiagnosticsRow row = diagnostics_row(frames[k], v, options, nonlinear);
    for (std::size_t j = 0; j < running.size(); ++j) {
      running[j] = std::max(running[j], row.rho[j]);
      row.rho[j] = running[j];
    }
    series.rows.push_back(std::move(row));
  }
  return series;
}

}  // namespace critwave
