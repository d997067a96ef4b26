#pragma once

#include <cstdint>
#include <random>
#include <span>
#include <vector>

#include "critwave/ground_state.hpp"

namespace critwave {

/// Exact data class for the 1D reduction f = r v of a radial 3D linear wave:
/// f0 is piecewise linear on the breakpoints s (with s[0] = 0, f0[0] = 0 and
/// f0 constant beyond s.back()); f1 is piecewise constant, f1[i] applying to
/// [s[i], s[i+1]) and f1.back() (the unbounded cell) required to be zero.
struct PiecewiseData {
  std::vector<double> s;
  std::vector<double> f0;
  std::vector<double> f1;

  bool empty() const { return s.empty(); }
  void validate() const;
};

/// Nodal samples f0 = r u0, f1 = r u1 on a grid starting at r = 0.
struct ReducedData {
  std::vector<double> r;
  std::vector<double> f0;
  std::vector<double> f1;
};

ReducedData reduce(const RadialProfile& u0, const RadialProfile& u1, std::span<const double> grid);

/// Divides the samples by r at r > 0; the r = 0 entries are dropped.
std::pair<std::vector<double>, std::vector<double>> unreduce(const ReducedData& data);

/// Piecewise-linear f1 samples to cell averages (exact for the linear interpolant).
PiecewiseData to_piecewise(const ReducedData& data);

/// Projection of closed-form data onto the exact class: f0 sampled at the grid,
/// f1 = r u1 replaced by its exact cell averages (Gauss-Legendre per cell), so
/// that F is exact at every breakpoint. Data is zeroed beyond grid.back().
PiecewiseData project(const RadialProfile& u0, const RadialProfile& u1, std::span<const double> grid);

/// The d'Alembert profile F of a radial linear wave, f(t, r) = F(t + r) - F(t - r),
/// with
///   F(s) =  f0(s)/2 + (1/2) int_0^s f1,   s > 0,
///   F(s) = -f0(-s)/2 + (1/2) int_0^{-s} f1,  s < 0.
/// F is piecewise linear on mirrored breakpoints and constant outside them, so
/// every band energy below is an exact sum of piecewise-constant squares.
class OneDWaveData {
 public:
  OneDWaveData() = default;

  static OneDWaveData build(const PiecewiseData& data);

  std::span<const double> breakpoints() const { return sigma_; }
  std::span<const double> profile_values() const { return values_; }
  const PiecewiseData& provenance() const { return provenance_; }
  bool is_zero() const;

  double F(double s) const;
  /// F'(s); at a breakpoint the mean of the one-sided slopes.
  double dF(double s) const;

  double f(double t, double r) const { return F(t + r) - F(t - r); }
  double ft(double t, double r) const { return dF(t + r) - dF(t - r); }
  double fr(double t, double r) const { return dF(t + r) + dF(t - r); }

  /// int_a^b (d_r f)^2 + (d_t f)^2 dr at time t, for 0 <= a <= b (b may be +inf).
  double interval_energy(double t, double a, double b) const;
  /// Energy over r > 0; independent of t.
  double total_energy() const;

  /// Smallest gap between consecutive breakpoints of F (infinity if < 2 breakpoints).
  double min_gap() const;
  /// max |sigma| over breakpoints, 0 for zero data.
  double support_radius() const;

  /// Data re-based at time t: F(. + t) - F(t). Exact semigroup.
  OneDWaveData evolved(double t) const;
  /// The exact state (f(t, .), d_t f(t, .)) in the piecewise class.
  PiecewiseData state_at(double t) const;

 private:
  double prefix_sq(double s) const;
  std::vector<double> sigma_;
  std::vector<double> values_;
  std::vector<double> slopes_;  // F' on (sigma_k, sigma_{k+1})
  std::vector<double> cum_sq_;  // int_{sigma_0}^{sigma_k} F'^2
  PiecewiseData provenance_;
};

OneDWaveData build_F(const PiecewiseData& data);
OneDWaveData build_F(const ReducedData& data);
OneDWaveData evolve(const OneDWaveData& data, double t);

struct BandEnergy {
  double r0 = 0.0;
  double r1 = 0.0;
  double t = 0.0;
  double value = 0.0;
};

/// int_{r0+|t|}^{r1+|t|} (d_r f)^2 + (d_t f)^2 dr, exact.
BandEnergy band_energy(const OneDWaveData& data, double t, double r0, double r1);

enum class ChannelSide { none, plus, minus, both };
const char* to_string(ChannelSide side) noexcept;

struct ChannelResult {
  ChannelSide side = ChannelSide::none;
  double min_ratio = 0.0;        ///< best of the two half-line minima
  double plus_min_ratio = 0.0;   ///< min over t >= 0 of band(t)/band(0)
  double minus_min_ratio = 0.0;  ///< min over t <= 0
  double initial_energy = 0.0;
};

/// Times at which the band energy of (r0, r1) can change slope: the band energy
/// is piecewise linear in t with kinks where r_j + 2|t| hits a breakpoint, so its
/// minimum over each half-line lies on this set (plus 0 and a time past the support).
std::vector<double> default_channel_grid(const OneDWaveData& data, double r0, double r1);

inline constexpr double kChannelTolerance = 1e-12;

ChannelResult channel_check(const OneDWaveData& data, double r0, double r1,
                            std::span<const double> t_grid);
ChannelResult channel_check(const OneDWaveData& data, double r0, double r1);

struct ExteriorIdentity {
  double lhs = 0.0;            ///< int_{R0}^inf (d_r (r u0))^2 dr
  double rhs = 0.0;            ///< int_{R0}^inf r^2 (d_r u0)^2 dr
  double boundary_term = 0.0;  ///< R0 u0(R0)^2
  double defect() const;       ///< |lhs - (rhs - boundary_term)|
};

ExteriorIdentity exterior_identity_check(const RadialProfile& u0, double r0);

/// Energy distribution around the light cone |r| = |t| for data of scale lambda.
struct HuygensLocalization {
  OneDWaveData data;
  double t = 0.0;
  double lambda = 1.0;
  double total = 0.0;
  /// Fraction of the energy in  ||r| - |t|| <= R lambda.
  double annulus_fraction(double radius) const;
};

HuygensLocalization huygens_localization(const OneDWaveData& data, double t, double lambda);

struct RandomPiecewiseOptions {
  std::size_t min_cells = 3;
  std::size_t max_cells = 24;
  double max_radius = 20.0;
  double amplitude = 1.0;
};

/// Random data in the exact class (used by property tests and the CLI checker).
PiecewiseData random_piecewise(std::mt19937_64& rng, const RandomPiecewiseOptions& options = {});

/// Uniform double in [0, 1) from 53 random bits, identical on every platform.
double uniform01(std::mt19937_64& rng);

struct ChannelBatchResult {
  std::size_t cases = 0;
  std::size_t failures = 0;    ///< cases with min_ratio below 1/2 on both sides
  std::size_t degenerate = 0;  ///< draws skipped for zero band energy
  double worst_min_ratio = 1.0;
};

/// n channel checks on random piecewise data, each with a random band inside
/// the support of the data.
ChannelBatchResult channel_batch(std::size_t n, std::uint64_t seed, const RandomPiecewiseOptions& options = {});

}  // namespace critwave
