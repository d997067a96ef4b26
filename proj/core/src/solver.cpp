#include "critwave/solver.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "critwave/analysis.hpp"
#include "critwave/cutoff.hpp"
#include "critwave/energy.hpp"
#include "critwave/error.hpp"
#include "critwave/ground_state.hpp"
#include "critwave/io.hpp"

namespace critwave {

namespace {

// Stiffness cap on the nonlinear ODE rate u^4: dt * max u^2 <= kappa.
constexpr double kNonlinearKappa = 0.05;

}  // namespace

const char* to_string(DataFamily family) noexcept {
  switch (family) {
    case DataFamily::near_w: return "near_w";
    case DataFamily::bump: return "bump";
    case DataFamily::perturbed_w: return "perturbed_w";
    case DataFamily::csv: return "csv";
  }
  return "?";
}

DataFamily parse_family(const std::string& name) {
  if (name == "near_w") return DataFamily::near_w;
  if (name == "bump") return DataFamily::bump;
  if (name == "perturbed_w") return DataFamily::perturbed_w;
  if (name == "csv") return DataFamily::csv;
  throw Error(Errc::invalid_config, "unknown data family '" + name + "'");
}

const char* to_string(Outcome outcome) noexcept {
  switch (outcome) {
    case Outcome::completed: return "Completed";
    case Outcome::blowup_detected: return "BlowUpDetected";
    case Outcome::boundary_contaminated: return "BoundaryContaminated";
  }
  return "?";
}

void RunConfig::validate() const {
  auto bad = [](const std::string& what) { throw Error(Errc::invalid_config, what); };
  if (!(h > 0.0) || !std::isfinite(h)) bad("mesh.h must be positive");
  if (!(r_max > 2.0 * h) || !std::isfinite(r_max)) bad("mesh.rmax must exceed 2 h");
  const double cells = r_max / h;
  if (std::abs(cells - std::round(cells)) > 1e-9 * cells) bad("mesh.rmax must be a multiple of mesh.h");
  if (!(cfl > 0.0)) bad("cfl must be positive");
  if (cfl > cfl_max) bad("cfl exceeds the stability limit " + std::to_string(cfl_max));
  if (!(t_end >= 0.0) || !std::isfinite(t_end)) bad("t_end must be finite and >= 0");
  if (!(blowup_threshold > 0.0)) bad("blowup_threshold must be positive");
  if (!(dt_min > 0.0)) bad("dt_min must be positive");
  if (!(output_every > 0.0)) bad("output.every must be positive");
  if (data.family == DataFamily::near_w || data.family == DataFamily::perturbed_w) {
    if (!(data.lambda > 0.0)) bad("data.lambda must be positive");
  }
  if (data.family == DataFamily::bump || data.family == DataFamily::perturbed_w) {
    if (!(data.sigma > 0.0)) bad("data.sigma must be positive");
  }
  if (data.r_cut < 0.0) bad("data.r_cut must be >= 0");
  if (data.family == DataFamily::csv && data.path.empty()) bad("data.path required for csv family");
}

FieldState make_initial_data(const InitialDataSpec& spec, MeshPtr mesh) {
  const double r_cut = spec.r_cut > 0.0 ? spec.r_cut : mesh->r_max() / 8.0;
  const GroundStateParams w{3, spec.lambda, +1};
  auto zero = [](double) { return 0.0; };
  switch (spec.family) {
    case DataFamily::near_w:
      return FieldState::from_functions(
          mesh, [&](double r) { return (1.0 + spec.delta) * eval_w(r, w) * smooth_cutoff(r / r_cut); }, zero);
    case DataFamily::bump:
      return FieldState::from_functions(
          mesh, [&](double r) { return spec.amp * std::exp(-r * r / (spec.sigma * spec.sigma)); }, zero);
    case DataFamily::perturbed_w:
      return FieldState::from_functions(
          mesh,
          [&](double r) {
            const double bump = spec.amp * std::exp(-r * r / (spec.sigma * spec.sigma));
            return (eval_w(r, w) + bump) * smooth_cutoff(r / r_cut);
          },
          zero);
    case DataFamily::csv: {
      const FieldState loaded = read_snapshot_csv(spec.path);
      const double r_end = loaded.mesh->r_max();
      return FieldState::from_functions(
          mesh, [&](double r) { return r <= r_end ? loaded.u_at(r) : 0.0; },
          [&](double r) { return r <= r_end ? loaded.ut_at(r) : 0.0; });
    }
  }
  throw Error(Errc::invalid_config, "unknown data family");
}

void Stepper::rhs(const FieldState& s, std::span<const double> h, std::span<const double> p,
                  std::vector<double>& dh, std::vector<double>& dp) const {
  const auto r = s.mesh->nodes();
  const std::size_t n = h.size();
  const double dx = s.mesh->h();
  const double inv_dx2 = 1.0 / (dx * dx);
  const double inv_2dx = 0.5 / dx;
  dh[0] = 0.0;
  dp[0] = 0.0;
  for (std::size_t i = 1; i + 1 < n; ++i) {
    dh[i] = p[i];
    double acc = (h[i + 1] - 2.0 * h[i] + h[i - 1]) * inv_dx2;
    if (nonlinear_) {
      const double u = h[i] / r[i];
      const double u2 = u * u;
      acc += r[i] * u2 * u2 * u;
    }
    dp[i] = acc;
  }
  const std::size_t m = n - 1;
  dh[m] = -(3.0 * h[m] - 4.0 * h[m - 1] + h[m - 2]) * inv_2dx;
  dp[m] = -(3.0 * p[m] - 4.0 * p[m - 1] + p[m - 2]) * inv_2dx;
}

bool Stepper::advance(FieldState& state, double dt) {
  if (!state.mesh->is_uniform()) throw Error(Errc::invalid_parameter, "stepper requires a uniform mesh");
  const std::size_t n = state.size();
  for (auto* v : {&k1h_, &k1p_, &k2h_, &k2p_, &k3h_, &k3p_, &k4h_, &k4p_, &th_, &tp_}) v->resize(n);
  const auto& h = state.h;
  const auto& p = state.p;

  rhs(state, h, p, k1h_, k1p_);
  for (std::size_t i = 0; i < n; ++i) {
    th_[i] = h[i] + 0.5 * dt * k1h_[i];
    tp_[i] = p[i] + 0.5 * dt * k1p_[i];
  }
  rhs(state, th_, tp_, k2h_, k2p_);
  for (std::size_t i = 0; i < n; ++i) {
    th_[i] = h[i] + 0.5 * dt * k2h_[i];
    tp_[i] = p[i] + 0.5 * dt * k2p_[i];
  }
  rhs(state, th_, tp_, k3h_, k3p_);
  for (std::size_t i = 0; i < n; ++i) {
    th_[i] = h[i] + dt * k3h_[i];
    tp_[i] = p[i] + dt * k3p_[i];
  }
  rhs(state, th_, tp_, k4h_, k4p_);
  const double w = dt / 6.0;
  bool finite = true;
  for (std::size_t i = 0; i < n; ++i) {
    th_[i] = h[i] + w * (k1h_[i] + 2.0 * k2h_[i] + 2.0 * k3h_[i] + k4h_[i]);
    tp_[i] = p[i] + w * (k1p_[i] + 2.0 * k2p_[i] + 2.0 * k3p_[i] + k4p_[i]);
    finite = finite && std::isfinite(th_[i]) && std::isfinite(tp_[i]);
  }
  if (!finite) return false;
  std::swap(state.h, th_);
  std::swap(state.p, tp_);
  state.t += dt;
  return true;
}

FieldState step(const FieldState& state, double dt, bool nonlinear) {
  state.validate();
  FieldState next = state;
  Stepper stepper(nonlinear);
  if (!stepper.advance(next, dt)) throw Error(Errc::invalid_data, "step produced non-finite values");
  return next;
}

double adaptive_dt(const FieldState& state, double cfl) {
  double dt = cfl * state.mesh->h();
  const double sup = state.sup_norm();
  if (sup > 0.0) dt = std::min(dt, kNonlinearKappa / (sup * sup));
  return dt;
}

double support_radius(const FieldState& field) {
  const std::size_t n = field.size();
  double peak = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    peak = std::max({peak, std::abs(field.h[i]), std::abs(field.p[i])});
  }
  if (peak == 0.0) return 0.0;
  const double floor = 1e-14 * peak;
  for (std::size_t i = n; i-- > 0;) {
    if (std::abs(field.h[i]) > floor || std::abs(field.p[i]) > floor) {
      return field.mesh->r(std::min(i + 1, n - 1));
    }
  }
  return 0.0;
}

RunReport run(const RunConfig& config) {
  config.validate();
  auto mesh = std::make_shared<const RadialMesh>(RadialMesh::uniform(config.h, config.r_max));
  return run_from(config, make_initial_data(config.data, mesh));
}

RunReport run_from(const RunConfig& config, FieldState state) {
  config.validate();
  state.validate();
  if (!state.mesh->is_uniform()) throw Error(Errc::invalid_config, "solver requires a uniform mesh");
  if (config.cfl > config.cfl_max) throw Error(Errc::invalid_config, "cfl exceeds stability limit");

  RunReport report;
  const double t_start = state.t;
  const double t_stop = t_start + config.t_end;
  report.contamination_time = t_start + std::max(0.0, state.mesh->r_max() - support_radius(state));
  // the potential term belongs to the conserved energy only in nonlinear mode
  auto conserved = [&](const FieldState& s) {
    const EnergyReport e = energy(s);
    return config.nonlinear ? e.total_energy : 0.5 * (e.gradient_sq + e.kinetic_sq);
  };
  report.initial_energy = conserved(state);
  const double e_scale = std::max(std::abs(report.initial_energy), 1e-300);

  auto record = [&](const FieldState& s) {
    report.snapshots.push_back(s);
    report.amplitude_history.emplace_back(s.t, s.sup_norm());
    const double e = conserved(s);
    report.energy_drift = std::max(report.energy_drift, std::abs(e - report.initial_energy) / e_scale);
  };
  record(state);

  Stepper stepper(config.nonlinear);
  std::size_t next_output = 1;
  auto output_time = [&](std::size_t k) {
    return std::min(t_start + static_cast<double>(k) * config.output_every, t_stop);
  };
  bool blowup = false;
  while (state.t < t_stop) {
    const double target = output_time(next_output);
    double dt = adaptive_dt(state, config.cfl);
    if (dt < config.dt_min) {
      blowup = true;
      break;
    }
    bool hits_output = false;
    if (state.t + dt >= target - 1e-12 * std::max(1.0, std::abs(target))) {
      dt = target - state.t;
      hits_output = true;
    }
    const double t_before = state.t;
    if (!stepper.advance(state, dt)) {
      blowup = true;
      break;
    }
    ++report.steps;
    if (hits_output) state.t = target;
    if (state.sup_norm() > config.blowup_threshold) {
      // Report the last stable time, i.e. before the offending step.
      state.t = t_before;
      blowup = true;
      break;
    }
    if (hits_output) {
      record(state);
      ++next_output;
      if (target >= t_stop) break;
    }
  }

  report.t_final = state.t;
  if (blowup) {
    report.outcome = Outcome::blowup_detected;
    report.t_star = std::min(state.t, t_stop);
  } else if (report.t_final > report.contamination_time) {
    report.outcome = Outcome::boundary_contaminated;
  }

  if (config.compute_diagnostics) {
    std::vector<const FieldState*> regular(report.snapshots.size(), nullptr);
    SingularSplit split;
    if (blowup && report.snapshots.size() >= 2) {
      const double t_est = report.t_star - 0.5 * config.output_every;
      if (t_est > report.snapshots.front().t) {
        SplitOptions opts;
        opts.nonlinear = config.nonlinear;
        opts.cfl = config.cfl;
        split = singular_part(report.snapshots, t_est, opts);
        for (std::size_t k = 0; k < split.v.size(); ++k) regular[split.first_frame + k] = &split.v[k];
      }
    }
    report.series = diagnostics_series(report.snapshots, regular, config.diagnostics, config.nonlinear);
  }
  return report;
}

LeakageReport finite_speed_check(const RunConfig& config, const FieldState& background,
                                 const FieldState& perturbation, double rho) {
  RunConfig cfg = config;
  cfg.compute_diagnostics = false;
  const RunReport base = run_from(cfg, background);
  FieldState perturbed = combine(1.0, background, 1.0, perturbation);
  perturbed.t = background.t;
  const RunReport pert = run_from(cfg, perturbed);

  LeakageReport out;
  const std::size_t frames = std::min(base.snapshots.size(), pert.snapshots.size());
  for (std::size_t k = 0; k < frames; ++k) {
    const FieldState& b = base.snapshots[k];
    const FieldState diff = combine(1.0, pert.snapshots[k], -1.0, b);
    const double radius = rho + (b.t - background.t);
    double leak = 0.0;
    if (radius < b.mesh->r_max()) {
      const EnergyReport e = energy(diff, Region::exterior(radius));
      leak = 0.5 * (e.gradient_sq + e.kinetic_sq);
    }
    out.per_time.emplace_back(b.t, leak);
    out.max_leakage = std::max(out.max_leakage, leak);
  }
  return out;
}

double l8_norm_pow8(const FieldState& field) {
  const auto r = field.mesh->nodes();
  // trapezoid in r of 4 pi r^2 u^8 = 4 pi h^8 / r^6
  double total = 0.0;
  auto integrand = [&](std::size_t i) {
    if (i == 0) return 0.0;
    const double u = field.h[i] / r[i];
    const double u2 = u * u;
    const double u4 = u2 * u2;
    return r[i] * r[i] * u4 * u4;
  };
  for (std::size_t i = 0; i + 1 < field.size(); ++i) {
    total += 0.5 * (r[i + 1] - r[i]) * (integrand(i) + integrand(i + 1));
  }
  return 4.0 * std::numbers::pi * total;
}

StrichartzResult strichartz_monitor(std::span<const FieldState> frames) {
  StrichartzResult out;
  out.degraded = frames.size() < 3;
  if (frames.empty()) return out;
  double prev = l8_norm_pow8(frames[0]);
  out.cumulative.push_back(0.0);
  for (std::size_t k = 1; k < frames.size(); ++k) {
    const double dt = frames[k].t - frames[k - 1].t;
    if (!(dt > 0.0)) out.degraded = true;
    const double cur = l8_norm_pow8(frames[k]);
    out.value += 0.5 * dt * (prev + cur);
    out.cumulative.push_back(out.value);
    prev = cur;
  }
  return out;
}

StrichartzResult strichartz_monitor(const RunReport& report) { return strichartz_monitor(report.snapshots); }

}  // namespace critwave
