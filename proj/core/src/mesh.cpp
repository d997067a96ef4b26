#include "critwave/mesh.hpp"

#include <algorithm>
#include <cmath>

#include "critwave/error.hpp"

namespace critwave {

RadialMesh::RadialMesh(std::vector<double> nodes) : nodes_(std::move(nodes)) {
  if (nodes_.size() < 3) throw Error(Errc::invalid_parameter, "mesh needs at least 3 nodes");
  if (nodes_.front() != 0.0) throw Error(Errc::invalid_parameter, "mesh must start at r = 0");
  double min_step = std::numeric_limits<double>::infinity();
  double max_step = 0.0;
  for (std::size_t i = 1; i < nodes_.size(); ++i) {
    const double step = nodes_[i] - nodes_[i - 1];
    if (!(step > 0.0) || !std::isfinite(nodes_[i])) {
      throw Error(Errc::invalid_parameter, "mesh nodes must be strictly increasing");
    }
    min_step = std::min(min_step, step);
    max_step = std::max(max_step, step);
  }
  min_spacing_ = min_step;
  h_ = nodes_[1];
  spacing_ = (max_step - min_step <= 1e-9 * max_step) ? Spacing::uniform : Spacing::graded;
}

RadialMesh RadialMesh::uniform(double h, double r_max) {
  if (!(h > 0.0) || !(r_max > h)) throw Error(Errc::invalid_parameter, "uniform mesh: need 0 < h < r_max");
  const auto cells = static_cast<std::size_t>(std::llround(r_max / h));
  if (std::abs(cells * h - r_max) > 1e-9 * r_max) {
    throw Error(Errc::invalid_parameter, "uniform mesh: r_max must be a multiple of h");
  }
  std::vector<double> nodes(cells + 1);
  for (std::size_t i = 0; i <= cells; ++i) nodes[i] = static_cast<double>(i) * h;
  RadialMesh mesh(std::move(nodes));
  mesh.spacing_ = Spacing::uniform;
  mesh.h_ = h;
  return mesh;
}

RadialMesh RadialMesh::graded(double r_min, double ratio, double r_max, double h_outer) {
  if (!(r_min > 0.0) || !(ratio > 1.0) || !(r_max > r_min) || !(h_outer > 0.0)) {
    throw Error(Errc::invalid_parameter, "graded mesh: invalid parameters");
  }
  std::vector<double> nodes{0.0, r_min};
  double step = r_min * (ratio - 1.0);
  while (nodes.back() < r_max) {
    const double s = std::min(step, h_outer);
    nodes.push_back(nodes.back() + s);
    step *= ratio;
  }
  // Snap the final node onto r_max, merging a sliver cell if needed.
  if (nodes.size() > 3 && (r_max - nodes[nodes.size() - 2]) < 0.5 * (nodes.back() - nodes[nodes.size() - 2])) {
    nodes.pop_back();
  }
  nodes.back() = r_max;
  RadialMesh mesh(std::move(nodes));
  mesh.spacing_ = Spacing::graded;
  return mesh;
}

RadialMesh RadialMesh::from_nodes(std::vector<double> nodes) { return RadialMesh(std::move(nodes)); }

std::size_t RadialMesh::cell_of(double r) const {
  if (r <= 0.0) return 0;
  if (r >= nodes_.back()) return nodes_.size() - 2;
  if (spacing_ == Spacing::uniform) {
    auto i = static_cast<std::size_t>(r / h_);
    return std::min(i, nodes_.size() - 2);
  }
  auto it = std::upper_bound(nodes_.begin(), nodes_.end(), r);
  return static_cast<std::size_t>(it - nodes_.begin()) - 1;
}

FieldState FieldState::zero(MeshPtr mesh, double t) {
  const std::size_t n = mesh->size();
  return FieldState{std::move(mesh), t, std::vector<double>(n, 0.0), std::vector<double>(n, 0.0)};
}

FieldState FieldState::from_functions(MeshPtr mesh, const std::function<double(double)>& u0,
                                      const std::function<double(double)>& u1, double t) {
  FieldState state = zero(std::move(mesh), t);
  for (std::size_t i = 1; i < state.size(); ++i) {
    const double r = state.mesh->r(i);
    state.h[i] = r * u0(r);
    state.p[i] = r * u1(r);
  }
  return state;
}

namespace {

// d/dr at 0 of the quadratic through (0, 0), (r1, y1), (r2, y2).
double origin_slope(double r1, double y1, double r2, double y2) {
  return y1 * r2 / (r1 * (r2 - r1)) - y2 * r1 / (r2 * (r2 - r1));
}

}  // namespace

double FieldState::u(std::size_t i) const {
  if (i == 0) return origin_slope(mesh->r(1), h[1], mesh->r(2), h[2]);
  return h[i] / mesh->r(i);
}

double FieldState::ut(std::size_t i) const {
  if (i == 0) return origin_slope(mesh->r(1), p[1], mesh->r(2), p[2]);
  return p[i] / mesh->r(i);
}

std::vector<double> FieldState::u_values() const {
  std::vector<double> out(size());
  for (std::size_t i = 0; i < size(); ++i) out[i] = u(i);
  return out;
}

std::vector<double> FieldState::ut_values() const {
  std::vector<double> out(size());
  for (std::size_t i = 0; i < size(); ++i) out[i] = ut(i);
  return out;
}

double FieldState::sup_norm() const {
  double m = 0.0;
  for (std::size_t i = 0; i < size(); ++i) m = std::max(m, std::abs(u(i)));
  return m;
}

double FieldState::u_at(double r) const {
  if (r <= 0.0) return u(0);
  const std::size_t i = mesh->cell_of(r);
  const double r0 = mesh->r(i), r1 = mesh->r(i + 1);
  const double w = (r - r0) / (r1 - r0);
  return ((1.0 - w) * h[i] + w * h[i + 1]) / r;
}

double FieldState::ut_at(double r) const {
  if (r <= 0.0) return ut(0);
  const std::size_t i = mesh->cell_of(r);
  const double r0 = mesh->r(i), r1 = mesh->r(i + 1);
  const double w = (r - r0) / (r1 - r0);
  return ((1.0 - w) * p[i] + w * p[i + 1]) / r;
}

void FieldState::validate() const {
  if (!mesh) throw Error(Errc::invalid_data, "field has no mesh");
  if (h.size() != mesh->size() || p.size() != mesh->size()) {
    throw Error(Errc::invalid_data, "field size does not match mesh");
  }
  if (h[0] != 0.0 || p[0] != 0.0) throw Error(Errc::invalid_data, "h and p must vanish at r = 0");
  for (std::size_t i = 0; i < h.size(); ++i) {
    if (!std::isfinite(h[i]) || !std::isfinite(p[i])) {
      throw Error(Errc::invalid_data, "field contains non-finite values");
    }
  }
}

FieldState rescale(const FieldState& field, double lambda) {
  if (!(lambda > 0.0)) throw Error(Errc::invalid_parameter, "rescale: lambda must be positive");
  std::vector<double> nodes(field.mesh->nodes().begin(), field.mesh->nodes().end());
  for (double& r : nodes) r *= lambda;
  auto mesh = std::make_shared<const RadialMesh>(RadialMesh::from_nodes(std::move(nodes)));
  FieldState out = FieldState::zero(mesh, field.t * lambda);
  const double sh = std::sqrt(lambda);
  for (std::size_t i = 0; i < field.size(); ++i) {
    out.h[i] = sh * field.h[i];
    out.p[i] = field.p[i] / sh;
  }
  return out;
}

FieldState combine(double a, const FieldState& x, double b, const FieldState& y) {
  if (x.mesh != y.mesh && (x.mesh->size() != y.mesh->size() || x.mesh->r_max() != y.mesh->r_max())) {
    throw Error(Errc::invalid_data, "combine: fields live on different meshes");
  }
  FieldState out = FieldState::zero(x.mesh, x.t);
  for (std::size_t i = 0; i < x.size(); ++i) {
    out.h[i] = a * x.h[i] + b * y.h[i];
    out.p[i] = a * x.p[i] + b * y.p[i];
  }
  return out;
}

}  // namespace critwave
