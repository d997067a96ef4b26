#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <random>
#include <span>
#include <vector>

#include "critwave/analysis_types.hpp"
#include "critwave/mesh.hpp"

namespace critwave {

/// u = a + v on a window of output frames: v is the regular part, obtained by
/// cutting u(t0) off outside the cone r <= (T_est - t0) + margin and solving
/// backwards; a = u - v is then supported in r <= (T_est - t) + margin.
struct SingularSplit {
  double t_est = 0.0;
  double t0 = 0.0;
  double margin = 0.0;
  /// True when v blew up backwards before the earliest requested frame;
  /// a and v then start at the first frame v reached.
  bool truncated = false;
  /// Index into the input frames of a[0] and v[0].
  std::size_t first_frame = 0;
  std::vector<FieldState> a;
  std::vector<FieldState> v;
  /// Cone radius (T_est - t) + margin at frame k.
  double cone_radius(std::size_t k) const;
};

struct SplitOptions {
  double margin = -1.0;  ///< < 0 selects 2h + 2dt
  bool nonlinear = true;
  double cfl = 0.5;
  double blowup_threshold = 1e6;
  double dt_min = 1e-12;
  /// Restart frame time; unset selects the last frame before T_est.
  std::optional<double> t0;
  /// Earliest frame time included; frames before it are skipped.
  double t_begin = -std::numeric_limits<double>::infinity();
};

/// Splits the frames with t <= t0, where t0 is the last frame before T_est.
SingularSplit singular_part(std::span<const FieldState> frames, double t_est,
                            const SplitOptions& options = {});

struct ConcentrationRadii {
  std::optional<double> mu;
  std::optional<double> nu;
  std::optional<double> lambda1;
};

struct RadiiThresholds {
  double mu_fraction = 0.4;  ///< of int |grad W|^2
  double nu_fraction = 0.5;
  /// Threshold for lambda1; < 0 selects int_{|x|<=1} |grad W|^2.
  double lambda1_level = -1.0;
};

/// Threshold constant used for lambda1 by default.
double lambda1_default_level();

/// mu from the energy of `singular` (or of `field` when singular is null),
/// nu from the exterior energy of `field`, lambda1 from the gradient of
/// `singular` (or `field`). Absent radii are reported as nullopt.
ConcentrationRadii concentration_radii(const FieldState& field, const FieldState* singular = nullptr,
                                       const RadiiThresholds& thresholds = {});

/// int grad a . grad W_{lambda} dx  with W_lambda = lambda^{-1/2} W(x / lambda).
double sign_projection(const FieldState& a, double lambda);

/// 8 int u_t^2 + 4 (int |grad u|^2 - int |grad W|^2)
double d_functional(const FieldState& field);

/// 2 int u u_t phi(x / R) dx
double g_r(const FieldState& field, double radius);

/// int_{|x| >= R} u^2/|x|^2 + u^6 + |grad u|^2 + u_t^2 dx
double weighted_tail(const FieldState& field, double radius);

struct VirialPoint {
  double t = 0.0;
  double z1 = 0.0, z2 = 0.0, Z = 0.0;
  double rhs1 = 0.0, rhs2 = 0.0, rhsZ = 0.0;
  double dz1 = 0.0, dz2 = 0.0, dZ = 0.0;  ///< three-point time differences
  double defect1() const { return std::abs(dz1 - rhs1); }
  double defect2() const { return std::abs(dz2 - rhs2); }
  double defectZ() const { return std::abs(dZ - rhsZ); }
};

struct VirialSeries {
  std::vector<VirialPoint> points;
  double max_defect1 = 0.0, max_defect2 = 0.0, max_defectZ = 0.0;
};

/// z1 = int (u u_t - v v_t), z2 = int x.grad u u_t - x.grad v v_t, Z = z1/2 + z2.
/// `regular` may be empty (v = 0) or match frames one to one.
/// Throws invalid-input with fewer than 3 frames.
VirialSeries virial_series(std::span<const FieldState> frames, std::span<const FieldState> regular = {},
                           bool nonlinear = true);

/// Single-frame values (z1, z2) of the u part only.
std::pair<double, double> virial_values(const FieldState& field);

struct GrPoint {
  double t = 0.0;
  double g = 0.0;
  double dg = 0.0;    ///< g_R' from the equation at this frame
  double dg_fd = 0.0; ///< three-point time difference of g
  double d = 0.0;     ///< d(t)
  double a_r = 0.0;   ///< dg - (2 int u_t^2 - 2 int |grad u|^2 + 2 int u^6)
  double tail = 0.0;  ///< weighted_tail at R
  double bound = 0.0; ///< kGrBoundConstant * tail
};

struct GrSeries {
  double radius = 0.0;
  std::vector<GrPoint> points;
  /// max over frames of |a_r| - bound (<= 0 when the bound holds)
  double max_excess = 0.0;
  /// max over interior frames of |dg_fd - dg|
  double max_fd_defect = 0.0;
};

/// d/dt g_R = 2 int (u_t^2 + u u_tt) phi(x / R) dx with u_tt taken from the
/// equation (three-point second difference of h = r u).
double g_r_rate(const FieldState& field, double radius, bool nonlinear = true);

/// Constant in |A_R| <= C * tail for the fixed cutoff.
inline constexpr double kGrBoundConstant = 5.0;

GrSeries g_r_series(std::span<const FieldState> frames, double radius, bool nonlinear = true);

/// sup over frames of weighted_tail(frame, R).
double rho_tail(std::span<const FieldState> frames, double radius);

/// int_{r <= k (T_est - t)} |grad u|^2 + u_t^2 per frame; 0 for t >= T_est.
std::vector<double> cone_energy(std::span<const FieldState> frames, double t_est, double k = 1.0);

struct FitResult {
  double slope = 0.0;  ///< 1 + nu_hat
  double nu_hat = 0.0;
  double intercept = 0.0;
  double r_squared = 0.0;
  std::size_t points = 0;
  bool concentrating = false;
};

/// Least squares of log lambda against log(T_est - t) over samples with
/// t < T_est. Throws fit-unavailable with fewer than 10 usable samples or a
/// degenerate time range.
FitResult fit_exponent(std::span<const double> times, std::span<const double> lambdas, double t_est);

/// Standard normal deviate from two uniform01 draws (Box-Muller).
double normal01(std::mt19937_64& rng);

/// Per-frame diagnostics. `regular` holds v per frame or nullptr.
DiagnosticsRow diagnostics_row(const FieldState& u, const FieldState* regular,
                               const DiagnosticsOptions& options, bool nonlinear = true);

DiagnosticsSeries diagnostics_series(std::span<const FieldState> frames,
                                     std::span<const FieldState* const> regular,
                                     const DiagnosticsOptions& options, bool nonlinear = true);

}  // namespace critwave
