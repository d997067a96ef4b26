#include "critwave/energy.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "critwave/error.hpp"
#include "critwave/quadrature.hpp"

namespace critwave {
namespace {

constexpr double kFourPi = 4.0 * std::numbers::pi;

double pow6(double x) {
  const double x2 = x * x;
  return x2 * x2 * x2;
}

std::pair<double, double> clip_region(const Region& region, double r_max) {
  const double a = region.r0;
  double b = region.r1;
  if (a < 0.0 || (region.kind != Region::Kind::full && region.kind != Region::Kind::exterior &&
                  !(b >= a))) {
    throw Error(Errc::out_of_domain, "invalid region radii");
  }
  if (region.kind == Region::Kind::full || region.kind == Region::Kind::exterior) b = r_max;
  const double slack = 1e-12 * r_max;
  if (a > r_max + slack || b > r_max + slack) {
    throw Error(Errc::out_of_domain, "region extends beyond the mesh");
  }
  return {std::min(a, r_max), std::min(b, r_max)};
}

}  // namespace

CumulativeEnergy::CumulativeEnergy(const FieldState& field)
    : mesh_(field.mesh), h_(field.h), p_(field.p) {
  field.validate();
  const std::size_t n = mesh_->size();
  grad_.assign(n, 0.0);
  kin_.assign(n, 0.0);
  pot_.assign(n, 0.0);
  hardy_.assign(n, 0.0);
  origin_u_ = field.u(0);
  auto hardy_density = [&](std::size_t i) {
    if (i == 0) return origin_u_ * origin_u_;
    const double u = h_[i] / mesh_->r(i);
    return u * u;
  };
  auto pot_density = [&](std::size_t i) {
    if (i == 0) return 0.0;
    const double r = mesh_->r(i);
    const double u = h_[i] / r;
    return r * r * pow6(u);
  };
  for (std::size_t i = 0; i + 1 < n; ++i) {
    const double dr = mesh_->r(i + 1) - mesh_->r(i);
    const double slope = (h_[i + 1] - h_[i]) / dr;
    grad_[i + 1] = grad_[i] + slope * slope * dr;
    kin_[i + 1] = kin_[i] + 0.5 * (p_[i] * p_[i] + p_[i + 1] * p_[i + 1]) * dr;
    pot_[i + 1] = pot_[i] + 0.5 * (pot_density(i) + pot_density(i + 1)) * dr;
    hardy_[i + 1] = hardy_[i] + 0.5 * (hardy_density(i) + hardy_density(i + 1)) * dr;
  }
}

double CumulativeEnergy::h_at(std::size_t cell, double r) const {
  const double r0 = mesh_->r(cell), r1 = mesh_->r(cell + 1);
  const double w = (r - r0) / (r1 - r0);
  return (1.0 - w) * h_[cell] + w * h_[cell + 1];
}

double CumulativeEnergy::p_at(std::size_t cell, double r) const {
  const double r0 = mesh_->r(cell), r1 = mesh_->r(cell + 1);
  const double w = (r - r0) / (r1 - r0);
  return (1.0 - w) * p_[cell] + w * p_[cell + 1];
}

double CumulativeEnergy::gradient(double radius) const {
  if (radius <= 0.0) return 0.0;
  radius = std::min(radius, mesh_->r_max());
  const std::size_t i = mesh_->cell_of(radius);
  const double dr = mesh_->r(i + 1) - mesh_->r(i);
  const double slope = (h_[i + 1] - h_[i]) / dr;
  const double part = slope * slope * (radius - mesh_->r(i));
  const double hb = h_at(i, radius);
  return kFourPi * std::max(0.0, grad_[i] + part - hb * hb / radius);
}

double CumulativeEnergy::kinetic(double radius) const {
  if (radius <= 0.0) return 0.0;
  radius = std::min(radius, mesh_->r_max());
  const std::size_t i = mesh_->cell_of(radius);
  const double pb = p_at(i, radius);
  return kFourPi * (kin_[i] + 0.5 * (p_[i] * p_[i] + pb * pb) * (radius - mesh_->r(i)));
}

double CumulativeEnergy::potential(double radius) const {
  if (radius <= 0.0) return 0.0;
  radius = std::min(radius, mesh_->r_max());
  const std::size_t i = mesh_->cell_of(radius);
  const double ri = mesh_->r(i);
  const double di = i == 0 ? 0.0 : ri * ri * pow6(h_[i] / ri);
  const double ub = h_at(i, radius) / radius;
  const double db = radius * radius * pow6(ub);
  return kFourPi * (pot_[i] + 0.5 * (di + db) * (radius - ri));
}

double CumulativeEnergy::hardy(double radius) const {
  if (radius <= 0.0) return 0.0;
  radius = std::min(radius, mesh_->r_max());
  const std::size_t i = mesh_->cell_of(radius);
  const double ri = mesh_->r(i);
  const double ui = i == 0 ? origin_u_ : h_[i] / ri;
  const double ub = h_at(i, radius) / radius;
  return kFourPi * (hardy_[i] + 0.5 * (ui * ui + ub * ub) * (radius - ri));
}

EnergyReport energy(const FieldState& field, Region region) {
  const CumulativeEnergy cum(field);
  const auto [a, b] = clip_region(region, field.mesh->r_max());
  EnergyReport rep;
  rep.region = region;
  rep.gradient_sq = std::max(0.0, cum.gradient(b) - cum.gradient(a));
  rep.kinetic_sq = std::max(0.0, cum.kinetic(b) - cum.kinetic(a));
  rep.potential = std::max(0.0, cum.potential(b) - cum.potential(a));
  rep.hardy_sq = std::max(0.0, cum.hardy(b) - cum.hardy(a));
  rep.total_energy = 0.5 * rep.gradient_sq + 0.5 * rep.kinetic_sq - rep.potential / 6.0;
  return rep;
}

EnergyReport energy(const RadialProfile& u0, const RadialProfile& u1, Region region) {
  const double a = region.r0;
  const double b = region.kind == Region::Kind::full ? std::numeric_limits<double>::infinity()
                                                     : region.r1;
  if (a < 0.0 || !(b >= a)) throw Error(Errc::out_of_domain, "invalid region radii");
  std::vector<double> splits;
  for (double s : u0.scales) splits.push_back(s);
  for (double s : u1.scales) splits.push_back(s);
  std::sort(splits.begin(), splits.end());

  auto over_region = [&](const ScalarFn& density) {
    std::vector<double> edges{a};
    for (double s : splits) {
      if (s > edges.back() && s < b) edges.push_back(s);
    }
    edges.push_back(b);
    double total = 0.0;
    for (std::size_t i = 0; i + 1 < edges.size(); ++i) {
      total += integrate(density, edges[i], edges[i + 1]);
    }
    return kFourPi * total;
  };

  EnergyReport rep;
  rep.region = region;
  rep.gradient_sq = over_region([&](double r) {
    const double d = u0.derivative(r);
    return r * r * d * d;
  });
  rep.kinetic_sq = over_region([&](double r) {
    const double v = u1.value(r);
    return r * r * v * v;
  });
  rep.potential = over_region([&](double r) { return r * r * pow6(u0.value(r)); });
  rep.hardy_sq = over_region([&](double r) {
    const double v = u0.value(r);
    return v * v;
  });
  rep.total_energy = 0.5 * rep.gradient_sq + 0.5 * rep.kinetic_sq - rep.potential / 6.0;
  return rep;
}

VariationalCheck variational_check(const EnergyReport& report, int dimension, double rel_tol) {
  const WConstants& w = w_constants(dimension);
  const double n = dimension;
  VariationalCheck out;
  out.gradient_sq = report.gradient_sq;
  out.energy = 0.5 * report.gradient_sq - (n - 2.0) / (2.0 * n) * report.potential;
  if (!std::isfinite(out.gradient_sq) || !std::isfinite(out.energy)) {
    throw Error(Errc::invalid_data, "variational_check: non-finite energy components");
  }
  const double scale = w.grad_norm_sq;
  out.hypothesis_holds = out.gradient_sq <= w.grad_norm_sq && out.energy <= w.energy_w;
  if (out.hypothesis_holds) {
    out.bound_holds = out.gradient_sq <= n * out.energy + rel_tol * scale;
  }
  out.positivity_applies = out.gradient_sq <= w.sobolev_threshold;
  if (out.positivity_applies) {
    out.positivity_holds = out.energy >= -rel_tol * scale;
  }
  return out;
}

VariationalCheck variational_check(const FieldState& field, double rel_tol) {
  return variational_check(energy(field, Region::full()), 3, rel_tol);
}

double elliptic_residual(const FieldState& field) {
  field.validate();
  const RadialMesh& mesh = *field.mesh;
  const std::size_t n = mesh.size();
  if (n < 5) throw Error(Errc::invalid_data, "elliptic_residual needs at least 3 interior nodes");
  double sum = 0.0;
  for (std::size_t i = 1; i + 1 < n; ++i) {
    const double dm = mesh.r(i) - mesh.r(i - 1);
    const double dp = mesh.r(i + 1) - mesh.r(i);
    const double hrr = 2.0 * ((field.h[i + 1] - field.h[i]) / dp - (field.h[i] - field.h[i - 1]) / dm) /
                       (dm + dp);
    const double r = mesh.r(i);
    const double u = field.h[i] / r;
    // r * (Delta u + u^5) = h_rr + r u^5
    const double res = hrr + r * u * u * u * u * u;
    sum += res * res * 0.5 * (dm + dp);
  }
  return std::sqrt(kFourPi * sum);
}

}  // namespace critwave

namespace critwave {

double gradient_pairing(const FieldState& a, const std::function<double(double)>& g_dr) {
  static constexpr double x[4] = {-0.8611363115940526, -0.3399810435848563, 0.3399810435848563,
                                  0.8611363115940526};
  static constexpr double w[4] = {0.3478548451374538, 0.6521451548625461, 0.6521451548625461,
                                  0.3478548451374538};
  const auto r = a.mesh->nodes();
  double total = 0.0;
  for (std::size_t i = 0; i + 1 < a.size(); ++i) {
    const double r0 = r[i], r1 = r[i + 1];
    const double half = 0.5 * (r1 - r0), mid = 0.5 * (r0 + r1);
    const double slope = (a.h[i + 1] - a.h[i]) / (r1 - r0);
    double cell = 0.0;
    for (int q = 0; q < 4; ++q) {
      const double s = mid + half * x[q];
      const double hs = a.h[i] + slope * (s - r0);
      cell += w[q] * (s * slope - hs) * g_dr(s);
    }
    total += half * cell;
  }
  return 4.0 * std::numbers::pi * total;
}

double gradient_inner(const FieldState& a, const FieldState& b) {
  if (a.mesh != b.mesh && a.mesh->nodes().size() != b.mesh->nodes().size()) {
    throw Error(Errc::invalid_data, "gradient_inner: fields on different meshes");
  }
  const auto r = a.mesh->nodes();
  double total = 0.0;
  for (std::size_t i = 0; i + 1 < a.size(); ++i) {
    const double dr = r[i + 1] - r[i];
    total += (a.h[i + 1] - a.h[i]) * (b.h[i + 1] - b.h[i]) / dr;
  }
  const std::size_t m = a.size() - 1;
  total -= a.h[m] * b.h[m] / r[m];
  return 4.0 * std::numbers::pi * total;
}

}  // namespace critwave
