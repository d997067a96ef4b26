#pragma once

#include <cstddef>
#include <functional>
#include <limits>
#include <memory>
#include <span>
#include <vector>

namespace critwave {

/// Radial grid 0 = r_0 < r_1 < ... < r_M = R_max.
///
/// Two spacings are supported: uniform steps of size h, and a graded grid that
/// grows geometrically from r_min with ratio q until the step reaches an
/// optional outer spacing, after which it continues uniformly. Graded grids
/// are used for multi-scale data; the time stepper requires a uniform grid.
class RadialMesh {
 public:
  enum class Spacing { uniform, graded };

  static RadialMesh uniform(double h, double r_max);
  static RadialMesh graded(double r_min, double ratio, double r_max,
                           double h_outer = std::numeric_limits<double>::infinity());
  /// Validates and adopts arbitrary nodes; spacing is detected.
  static RadialMesh from_nodes(std::vector<double> nodes);

  std::span<const double> nodes() const { return nodes_; }
  std::size_t size() const { return nodes_.size(); }
  double r(std::size_t i) const { return nodes_[i]; }
  double r_max() const { return nodes_.back(); }
  Spacing spacing() const { return spacing_; }
  bool is_uniform() const { return spacing_ == Spacing::uniform; }
  /// Uniform step, or the first step r_1 of a graded grid.
  double h() const { return h_; }
  double min_spacing() const { return min_spacing_; }
  /// Index i of the cell [r_i, r_{i+1}] holding r (clamped to the last cell).
  std::size_t cell_of(double r) const;

 private:
  explicit RadialMesh(std::vector<double> nodes);
  std::vector<double> nodes_;
  Spacing spacing_ = Spacing::uniform;
  double h_ = 0.0;
  double min_spacing_ = 0.0;
};

using MeshPtr = std::shared_ptr<const RadialMesh>;

/// Radial field pair (u, du/dt) stored through h = r u and p = r du/dt.
/// h_0 = p_0 = 0 always.
struct FieldState {
  MeshPtr mesh;
  double t = 0.0;
  std::vector<double> h;
  std::vector<double> p;

  static FieldState zero(MeshPtr mesh, double t = 0.0);
  static FieldState from_functions(MeshPtr mesh, const std::function<double(double)>& u0,
                                   const std::function<double(double)>& u1, double t = 0.0);

  std::size_t size() const { return h.size(); }
  /// u(r_i); at the origin the limit d_r h(0) from a one-sided quadratic fit.
  double u(std::size_t i) const;
  double ut(std::size_t i) const;
  std::vector<double> u_values() const;
  std::vector<double> ut_values() const;
  /// max_i |u(r_i)|
  double sup_norm() const;
  /// u at an arbitrary radius by linear interpolation of h.
  double u_at(double r) const;
  double ut_at(double r) const;
  void validate() const;
};

/// u_lambda(x) = lambda^{-1/2} u(x/lambda), du_lambda/dt = lambda^{-3/2} u_1(x/lambda).
/// The mesh is scaled with the field, so discrete energies are exactly invariant.
FieldState rescale(const FieldState& field, double lambda);

/// Linear combination a*x + b*y of two fields on the same mesh.
FieldState combine(double a, const FieldState& x, double b, const FieldState& y);

}  // namespace critwave
