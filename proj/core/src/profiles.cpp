#include "critwave/profiles.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <numbers>

#include "critwave/energy.hpp"
#include "critwave/error.hpp"
#include "critwave/ground_state.hpp"
#include "critwave/quadrature.hpp"

namespace critwave {

namespace {

double grad_w_sq() { return w_constants(3).grad_norm_sq; }

struct Bracket {
  double lambda;
  double value;
};

// Maximizes |f| over log lambda in [lo, hi] by golden section.
Bracket golden_max(const std::function<double(double)>& f, double lo, double hi) {
  const double invphi = 0.5 * (std::sqrt(5.0) - 1.0);
  double a = std::log(lo), b = std::log(hi);
  double c = b - invphi * (b - a), d = a + invphi * (b - a);
  double fc = std::abs(f(std::exp(c))), fd = std::abs(f(std::exp(d)));
  while (b - a > 1e-9) {
    if (fc > fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - invphi * (b - a);
      fc = std::abs(f(std::exp(c)));
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + invphi * (b - a);
      fd = std::abs(f(std::exp(d)));
    }
  }
  const double lambda = std::exp(0.5 * (a + b));
  return {lambda, f(lambda)};
}

bool separated(double lambda, const std::vector<double>& taken, double factor) {
  for (double s : taken) {
    const double ratio = lambda > s ? lambda / s : s / lambda;
    if (ratio < factor) return false;
  }
  return true;
}

}  // namespace

double correlate_scale(const FieldState& a, double lambda) {
  const GroundStateParams w{3, lambda, +1};
  return gradient_pairing(a, [&](double r) { return eval_w_dr(r, w); }) / grad_w_sq();
}

FieldState sample_w(const MeshPtr& mesh, double lambda, int iota) {
  const GroundStateParams w{3, lambda, iota};
  return FieldState::from_functions(mesh, [&](double r) { return eval_w(r, w); }, [](double) { return 0.0; });
}

ProfileDecomposition extract(const FieldState& a, const ExtractConfig& config) {
  a.validate();
  if (!(config.separation_factor > 1.0) || config.seeds_per_decade < 1) {
    throw Error(Errc::invalid_parameter, "extract: invalid configuration");
  }
  const MeshPtr& mesh = a.mesh;
  const double lam_lo = config.lambda_min > 0.0 ? config.lambda_min : 4.0 * mesh->min_spacing();
  const double lam_hi = config.lambda_max > 0.0 ? config.lambda_max : 0.25 * mesh->r_max();
  if (!(lam_hi > lam_lo)) throw Error(Errc::invalid_parameter, "extract: empty scale range");

  std::vector<double> seeds;
  const double step = std::pow(10.0, 1.0 / config.seeds_per_decade);
  for (double s = lam_lo; s <= lam_hi * (1.0 + 1e-12); s *= step) seeds.push_back(s);

  ProfileDecomposition out;
  FieldState residual = a;
  std::vector<double> taken;     // accepted scales
  std::vector<double> excluded;  // rejected snaps
  std::vector<Profile> picks;

  while (true) {
    std::vector<double> blocked = taken;
    blocked.insert(blocked.end(), excluded.begin(), excluded.end());
    double best = 0.0, best_lambda = 0.0;
    for (double s : seeds) {
      if (!separated(s, blocked, config.separation_factor)) continue;
      const double c = correlate_scale(residual, s);
      if (std::abs(c) > std::abs(best)) {
        best = c;
        best_lambda = s;
      }
    }
    if (best_lambda == 0.0) break;
    const Bracket refined = golden_max([&](double l) { return correlate_scale(residual, l); },
                                       std::max(lam_lo, best_lambda / step),
                                       std::min(lam_hi, best_lambda * step));
    out.correlation_history.push_back(refined.value);
    if (std::abs(refined.value) < config.correlation_floor) break;
    if (picks.size() == config.max_profiles) {
      out.over_budget = true;
      break;
    }
    const double mag = std::abs(refined.value);
    if (mag < config.snap_low || mag > config.snap_high ||
        !separated(refined.lambda, taken, config.separation_factor)) {
      excluded.push_back(refined.lambda);
      continue;
    }
    const int iota = refined.value > 0.0 ? 1 : -1;
    picks.push_back({iota, refined.lambda, refined.value});
    taken.push_back(refined.lambda);
    residual = combine(1.0, residual, -1.0, sample_w(mesh, refined.lambda, iota));
  }

  // Backfitting: re-fit each scale against a minus the other profiles.
  const double half_sep = std::sqrt(config.separation_factor);
  for (int sweep = 0; sweep < config.refine_sweeps && picks.size() > 1; ++sweep) {
    for (std::size_t j = 0; j < picks.size(); ++j) {
      FieldState target = combine(1.0, residual, 1.0, sample_w(mesh, picks[j].lambda, picks[j].iota));
      const double lo = std::max(lam_lo, picks[j].lambda / half_sep);
      const double hi = std::min(lam_hi, picks[j].lambda * half_sep);
      const Bracket refined = golden_max([&](double l) { return correlate_scale(target, l); }, lo, hi);
      if (refined.value * picks[j].iota <= 0.0) continue;
      // a move may not leave the snap window or drift onto a rejected or taken scale
      const double mag = std::abs(refined.value);
      if (mag < config.snap_low || mag > config.snap_high) continue;
      if (!separated(refined.lambda, excluded, config.separation_factor)) continue;
      std::vector<double> others;
      for (std::size_t k = 0; k < picks.size(); ++k) {
        if (k != j) others.push_back(picks[k].lambda);
      }
      if (!separated(refined.lambda, others, config.separation_factor)) continue;
      picks[j].lambda = refined.lambda;
      picks[j].raw_coefficient = refined.value;
      residual = combine(1.0, target, -1.0, sample_w(mesh, refined.lambda, picks[j].iota));
    }
  }

  std::sort(picks.begin(), picks.end(), [](const Profile& x, const Profile& y) { return x.lambda > y.lambda; });
  out.profiles = std::move(picks);
  const EnergyReport ea = energy(a);
  const EnergyReport er = energy(residual);
  out.total_grad_sq = ea.gradient_sq;
  out.residual_grad_sq = er.gradient_sq;
  out.residual_kin_sq = er.kinetic_sq;
  out.residual = std::move(residual);
  out.pythagorean_defect = pythagorean_check(a, out).grad_defect;
  return out;
}

PythagoreanDefects pythagorean_check(const FieldState& a, const ProfileDecomposition& decomposition) {
  const MeshPtr& mesh = a.mesh;
  const FieldState& res = decomposition.residual.mesh ? decomposition.residual : a;
  const EnergyReport ea = energy(a);
  const EnergyReport er = energy(res);
  std::vector<FieldState> ws;
  double grad_sum = 0.0, energy_sum = 0.0;
  for (const auto& p : decomposition.profiles) {
    ws.push_back(sample_w(mesh, p.lambda, p.iota));
    const EnergyReport e = energy(ws.back());
    grad_sum += e.gradient_sq;
    energy_sum += e.total_energy;
  }
  PythagoreanDefects out;
  out.grad_defect = std::abs(ea.gradient_sq - grad_sum - er.gradient_sq);
  out.kinetic_defect = std::abs(ea.kinetic_sq - er.kinetic_sq);
  out.energy_defect = std::abs(ea.total_energy - energy_sum - er.total_energy);
  for (std::size_t j = 0; j < ws.size(); ++j) {
    for (std::size_t k = j + 1; k < ws.size(); ++k) out.cross_term_bound += 2.0 * std::abs(gradient_inner(ws[j], ws[k]));
    out.cross_term_bound += 2.0 * std::abs(gradient_inner(ws[j], res));
  }
  return out;
}

double scale_pairing(double s) {
  if (!(s > 0.0)) throw Error(Errc::invalid_parameter, "scale_pairing: s must be positive");
  if (s < 1.0) s = 1.0 / s;
  const GroundStateParams ws{3, s, +1};
  std::vector<double> sorted;
  for (double x = 0.1; x < 10.0 * s; x *= std::sqrt(10.0)) sorted.push_back(x);
  sorted.push_back(s);
  std::sort(sorted.begin(), sorted.end());
  const double integral = integrate_half_line(
      [&](double r) { return r * r * eval_w_dr(r) * eval_w_dr(r, ws); }, sorted, 1e-12);
  return 4.0 * std::numbers::pi * integral / grad_w_sq();
}

std::vector<std::vector<double>> orthogonality_matrix(const ProfileDecomposition& decomposition) {
  const auto& p = decomposition.profiles;
  if (p.size() < 2) return {};
  std::vector<std::vector<double>> m(p.size(), std::vector<double>(p.size(), 1.0));
  for (std::size_t j = 0; j < p.size(); ++j) {
    for (std::size_t k = j + 1; k < p.size(); ++k) {
      m[j][k] = m[k][j] = scale_pairing(p[j].lambda / p[k].lambda);
    }
  }
  return m;
}

}  // namespace critwave
