#pragma once

#include <functional>
#include <limits>
#include <vector>

#include "critwave/ground_state.hpp"
#include "critwave/mesh.hpp"

namespace critwave {

/// Radial integration region.
struct Region {
  enum class Kind { full, ball, annulus, exterior };
  Kind kind = Kind::full;
  double r0 = 0.0;
  double r1 = std::numeric_limits<double>::infinity();

  static Region full() { return {}; }
  static Region ball(double radius) { return {Kind::ball, 0.0, radius}; }
  static Region annulus(double inner, double outer) { return {Kind::annulus, inner, outer}; }
  static Region exterior(double radius) {
    return {Kind::exterior, radius, std::numeric_limits<double>::infinity()};
  }
};

/// Quadratic and power integrals of (u0, u1) over a region, in dx measure
/// (the 4 pi surface factor included).
struct EnergyReport {
  double gradient_sq = 0.0;  ///< int |grad u0|^2
  double kinetic_sq = 0.0;   ///< int u1^2
  double potential = 0.0;    ///< int |u0|^6
  double hardy_sq = 0.0;     ///< int u0^2 / |x|^2
  double total_energy = 0.0; ///< 1/2 grad + 1/2 kin - 1/6 pot, restricted to the region
  Region region;
};

/// Mesh energies with h = r u piecewise linear. The gradient uses
///   int_a^b r^2 u_r^2 dr = int_a^b h_r^2 dr - h(b)^2/b + h(a)^2/a,
/// kinetic, potential and Hardy terms use the trapezoid rule; on a uniform
/// mesh this is the energy conserved by the semi-discrete scheme.
/// Regions are clipped to [0, R_max]; radii beyond the mesh raise out-of-domain.
EnergyReport energy(const FieldState& field, Region region = Region::full());

/// Same integrals for closed-form radial profiles (N = 3) by adaptive quadrature.
EnergyReport energy(const RadialProfile& u0, const RadialProfile& u1,
                    Region region = Region::full());

/// Cumulative ball integrals on a mesh, evaluable at any radius in O(log M).
class CumulativeEnergy {
 public:
  explicit CumulativeEnergy(const FieldState& field);

  /// int_{|x| <= R} |grad u|^2 dx
  double gradient(double radius) const;
  /// int_{|x| <= R} u_t^2 dx
  double kinetic(double radius) const;
  double potential(double radius) const;
  double hardy(double radius) const;
  double r_max() const { return mesh_->r_max(); }

 private:
  double h_at(std::size_t cell, double r) const;
  double p_at(std::size_t cell, double r) const;
  MeshPtr mesh_;
  std::vector<double> h_;
  std::vector<double> p_;
  std::vector<double> grad_;  // prefix of int h_r^2 dr
  std::vector<double> kin_;
  std::vector<double> pot_;
  std::vector<double> hardy_;
  double origin_u_ = 0.0;
};

/// int grad a . grad g dx for a closed-form radial g given by g'(r); exact
/// piecewise-linear h = r a, four-point Gauss per cell.
double gradient_pairing(const FieldState& a, const std::function<double(double)>& g_dr);

/// int grad a . grad b dx for two fields on one mesh; the polarization of
/// the mesh gradient energy.
double gradient_inner(const FieldState& a, const FieldState& b);

struct VariationalCheck {
  double gradient_sq = 0.0;
  double energy = 0.0;
  bool hypothesis_holds = false;    ///< grad <= grad W and E <= E(W)
  bool bound_holds = true;          ///< hypothesis implies grad <= N E
  bool positivity_applies = false;  ///< grad <= (N/(N-2))^{(N-2)/2} grad W
  bool positivity_holds = true;     ///< positivity_applies implies E >= 0
  bool violated() const { return !bound_holds || !positivity_holds; }
};

/// Evaluates the two implications of the variational characterization of W
/// on the (u0, 0) energy of a report. rel_tol absorbs quadrature error on the
/// conclusion side only.
VariationalCheck variational_check(const EnergyReport& report, int dimension = 3,
                                   double rel_tol = 1e-10);
VariationalCheck variational_check(const FieldState& field, double rel_tol = 1e-10);

/// Discrete L2 norm of  Delta u + |u|^4 u  over the interior nodes, using the
/// stencil  Delta u = h_rr / r  on h = r u.
double elliptic_residual(const FieldState& field);

}  // namespace critwave
