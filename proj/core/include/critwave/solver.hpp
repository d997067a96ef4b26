#pragma once

#include <cstdint>
#include <limits>
#include <string>
#include <utility>
#include <vector>

#include "critwave/analysis_types.hpp"
#include "critwave/mesh.hpp"

namespace critwave {

enum class DataFamily { near_w, bump, perturbed_w, csv };

const char* to_string(DataFamily family) noexcept;
DataFamily parse_family(const std::string& name);

/// Initial-data family and its parameters.
///   near_w:      (1 + delta) W_lambda, smoothly cut off at r_cut, u1 = 0
///   bump:        amp exp(-r^2 / sigma^2), u1 = 0
///   perturbed_w: W_lambda + amp exp(-r^2 / sigma^2), cut off at r_cut, u1 = 0
///   csv:         snapshot file "r,u,ut" interpolated onto the mesh
struct InitialDataSpec {
  DataFamily family = DataFamily::near_w;
  double delta = 0.0;
  double lambda = 1.0;
  double amp = 0.0;
  double sigma = 1.0;
  double r_cut = 0.0;  ///< 0 selects r_max / 8
  std::string path;
};

struct RunConfig {
  double h = 0.02;
  double r_max = 20.0;
  double cfl = 0.5;
  double cfl_max = 0.5;
  double t_end = 1.0;
  bool nonlinear = true;
  double blowup_threshold = 1e6;
  double dt_min = 1e-12;
  double output_every = 0.1;
  InitialDataSpec data;
  std::uint64_t seed = 0;
  DiagnosticsOptions diagnostics;
  bool compute_diagnostics = true;

  /// Throws invalid-config on inconsistent values.
  void validate() const;
};

enum class Outcome { completed, blowup_detected, boundary_contaminated };
const char* to_string(Outcome outcome) noexcept;

struct RunReport {
  Outcome outcome = Outcome::completed;
  double t_star = std::numeric_limits<double>::quiet_NaN();  ///< last stable time on blow-up
  double contamination_time = std::numeric_limits<double>::infinity();
  double t_final = 0.0;
  double initial_energy = 0.0;
  double energy_drift = 0.0;  ///< max relative |E(t) - E(0)| over output frames
  std::size_t steps = 0;
  std::vector<FieldState> snapshots;
  std::vector<std::pair<double, double>> amplitude_history;  ///< (t, sup |u|) per frame
  DiagnosticsSeries series;
};

/// Initial data on the given (uniform) mesh.
FieldState make_initial_data(const InitialDataSpec& spec, MeshPtr mesh);

/// Method-of-lines integrator for  h_tt = h_rr + h^5 / r^4  (h = r u) on a
/// uniform mesh: centered second differences, classical RK4, h(t, 0) = 0 and
/// the outgoing condition h_t + h_r = 0 at R_max.
class Stepper {
 public:
  explicit Stepper(bool nonlinear = true) : nonlinear_(nonlinear) {}
  /// Advances state by dt in place. Returns false (leaving state untouched)
  /// if the step produced non-finite values.
  bool advance(FieldState& state, double dt);
  bool nonlinear() const { return nonlinear_; }

 private:
  void rhs(const FieldState& s, std::span<const double> h, std::span<const double> p,
           std::vector<double>& dh, std::vector<double>& dp) const;
  bool nonlinear_;
  std::vector<double> k1h_, k1p_, k2h_, k2p_, k3h_, k3p_, k4h_, k4p_, th_, tp_;
};

/// One RK4 step (see Stepper); throws invalid-data if the step overflows.
FieldState step(const FieldState& state, double dt, bool nonlinear = true);

/// Time step the driver uses at the given state: min(cfl h, 0.05 / max u^2).
double adaptive_dt(const FieldState& state, double cfl);

/// Integrates from the configured initial data.
RunReport run(const RunConfig& config);
/// Integrates from an explicit state (its time is the start time).
RunReport run_from(const RunConfig& config, FieldState initial);

/// Radius beyond which the field is zero to 1e-14 relative.
double support_radius(const FieldState& field);

struct LeakageReport {
  double max_leakage = 0.0;
  std::vector<std::pair<double, double>> per_time;  ///< (t, leakage)
};

/// Energy of (perturbed - unperturbed) outside r <= rho + t at each output time.
LeakageReport finite_speed_check(const RunConfig& config, const FieldState& background,
                                 const FieldState& perturbation, double rho);

struct StrichartzResult {
  double value = 0.0;                ///< int int |u|^8 dx dt over the frames
  std::vector<double> cumulative;    ///< running value per frame
  bool degraded = false;             ///< fewer than 3 frames or non-increasing times
};

StrichartzResult strichartz_monitor(std::span<const FieldState> frames);
StrichartzResult strichartz_monitor(const RunReport& report);

/// int |u|^8 dx for a single frame.
double l8_norm_pow8(const FieldState& field);

}  // namespace critwave
