#include "critwave/dalembert.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <boost/math/quadrature/gauss.hpp>

#include "critwave/error.hpp"
#include "critwave/quadrature.hpp"

namespace critwave {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

bool nearly_equal(double a, double b) { return std::abs(a - b) <= 1e-12 * (1.0 + std::abs(a)); }

}  // namespace

double uniform01(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

void PiecewiseData::validate() const {
  if (s.empty()) {
    if (!f0.empty() || !f1.empty()) throw Error(Errc::invalid_data, "inconsistent empty data");
    return;
  }
  if (f0.size() != s.size() || f1.size() != s.size()) {
    throw Error(Errc::invalid_data, "s, f0, f1 must have equal length");
  }
  if (s.front() != 0.0) throw Error(Errc::invalid_data, "first breakpoint must be s = 0");
  for (std::size_t i = 1; i < s.size(); ++i) {
    if (!(s[i] > s[i - 1])) throw Error(Errc::invalid_data, "breakpoints must be strictly increasing");
  }
  if (f0.front() != 0.0) throw Error(Errc::invalid_data, "f0(0) must vanish");
  if (f1.back() != 0.0) throw Error(Errc::invalid_data, "f1 must vanish beyond the last breakpoint");
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (!std::isfinite(s[i]) || !std::isfinite(f0[i]) || !std::isfinite(f1[i])) {
      throw Error(Errc::invalid_data, "non-finite entry");
    }
  }
}

ReducedData reduce(const RadialProfile& u0, const RadialProfile& u1, std::span<const double> grid) {
  ReducedData out;
  out.r.assign(grid.begin(), grid.end());
  out.f0.resize(grid.size());
  out.f1.resize(grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const double r = grid[i];
    out.f0[i] = r == 0.0 ? 0.0 : r * u0(r);
    out.f1[i] = r == 0.0 ? 0.0 : r * u1(r);
  }
  return out;
}

std::pair<std::vector<double>, std::vector<double>> unreduce(const ReducedData& data) {
  std::vector<double> u0, u1;
  for (std::size_t i = 0; i < data.r.size(); ++i) {
    if (data.r[i] > 0.0) {
      u0.push_back(data.f0[i] / data.r[i]);
      u1.push_back(data.f1[i] / data.r[i]);
    }
  }
  return {u0, u1};
}

PiecewiseData to_piecewise(const ReducedData& data) {
  PiecewiseData out;
  out.s = data.r;
  out.f0 = data.f0;
  out.f1.assign(data.r.size(), 0.0);
  for (std::size_t i = 0; i + 1 < data.r.size(); ++i) {
    out.f1[i] = 0.5 * (data.f1[i] + data.f1[i + 1]);
  }
  return out;
}

PiecewiseData project(const RadialProfile& u0, const RadialProfile& u1, std::span<const double> grid) {
  using boost::math::quadrature::gauss;
  PiecewiseData out;
  out.s.assign(grid.begin(), grid.end());
  out.f0.resize(grid.size());
  out.f1.assign(grid.size(), 0.0);
  for (std::size_t i = 0; i < grid.size(); ++i) out.f0[i] = grid[i] == 0.0 ? 0.0 : grid[i] * u0(grid[i]);
  for (std::size_t i = 0; i + 1 < grid.size(); ++i) {
    const double a = grid[i], b = grid[i + 1];
    const double integral = gauss<double, 10>::integrate([&](double r) { return r * u1(r); }, a, b);
    out.f1[i] = integral / (b - a);
  }
  return out;
}

OneDWaveData OneDWaveData::build(const PiecewiseData& data) {
  data.validate();
  OneDWaveData out;
  out.provenance_ = data;
  const std::size_t n = data.s.size();
  if (n == 0) return out;

  // Running integral of f1 at the breakpoints.
  std::vector<double> integral(n, 0.0);
  for (std::size_t i = 0; i + 1 < n; ++i) {
    integral[i + 1] = integral[i] + data.f1[i] * (data.s[i + 1] - data.s[i]);
  }
  out.sigma_.reserve(2 * n - 1);
  out.values_.reserve(2 * n - 1);
  for (std::size_t k = n; k-- > 1;) {
    out.sigma_.push_back(-data.s[k]);
    out.values_.push_back(-0.5 * data.f0[k] + 0.5 * integral[k]);
  }
  for (std::size_t k = 0; k < n; ++k) {
    out.sigma_.push_back(data.s[k]);
    out.values_.push_back(0.5 * data.f0[k] + 0.5 * integral[k]);
  }
  const std::size_t m = out.sigma_.size();
  out.slopes_.assign(m > 0 ? m - 1 : 0, 0.0);
  out.cum_sq_.assign(m, 0.0);
  for (std::size_t k = 0; k + 1 < m; ++k) {
    const double ds = out.sigma_[k + 1] - out.sigma_[k];
    out.slopes_[k] = (out.values_[k + 1] - out.values_[k]) / ds;
    out.cum_sq_[k + 1] = out.cum_sq_[k] + out.slopes_[k] * out.slopes_[k] * ds;
  }
  return out;
}

bool OneDWaveData::is_zero() const {
  return std::all_of(slopes_.begin(), slopes_.end(), [](double s) { return s == 0.0; });
}

double OneDWaveData::F(double s) const {
  if (sigma_.empty()) return 0.0;
  if (s <= sigma_.front()) return values_.front();
  if (s >= sigma_.back()) return values_.back();
  const auto it = std::upper_bound(sigma_.begin(), sigma_.end(), s);
  const std::size_t k = static_cast<std::size_t>(it - sigma_.begin()) - 1;
  return values_[k] + slopes_[k] * (s - sigma_[k]);
}

double OneDWaveData::dF(double s) const {
  if (sigma_.size() < 2) return 0.0;
  if (s < sigma_.front() || s > sigma_.back()) return 0.0;
  const auto it = std::upper_bound(sigma_.begin(), sigma_.end(), s);
  std::size_t k = static_cast<std::size_t>(it - sigma_.begin());
  // k is the first breakpoint strictly above s.
  const auto slope_of = [&](std::ptrdiff_t cell) {
    if (cell < 0 || cell >= static_cast<std::ptrdiff_t>(slopes_.size())) return 0.0;
    return slopes_[static_cast<std::size_t>(cell)];
  };
  const auto cell = static_cast<std::ptrdiff_t>(k) - 1;
  const double left_bp = sigma_[k - 1];
  if (nearly_equal(s, left_bp)) return 0.5 * (slope_of(cell - 1) + slope_of(cell));
  if (k < sigma_.size() && nearly_equal(s, sigma_[k])) return 0.5 * (slope_of(cell) + slope_of(cell + 1));
  return slope_of(cell);
}

double OneDWaveData::prefix_sq(double s) const {
  if (sigma_.size() < 2 || s <= sigma_.front()) return 0.0;
  if (s >= sigma_.back()) return cum_sq_.back();
  const auto it = std::upper_bound(sigma_.begin(), sigma_.end(), s);
  const std::size_t k = static_cast<std::size_t>(it - sigma_.begin()) - 1;
  return cum_sq_[k] + slopes_[k] * slopes_[k] * (s - sigma_[k]);
}

double OneDWaveData::interval_energy(double t, double a, double b) const {
  if (a < 0.0 || b < a) throw Error(Errc::invalid_band, "interval_energy: need 0 <= a <= b");
  // (d_t f)^2 + (d_r f)^2 = 2 F'(t+r)^2 + 2 F'(t-r)^2
  const double outgoing = prefix_sq(t - a) - prefix_sq(t - b);
  const double incoming = prefix_sq(t + b) - prefix_sq(t + a);
  return 2.0 * (std::max(0.0, outgoing) + std::max(0.0, incoming));
}

double OneDWaveData::total_energy() const { return cum_sq_.empty() ? 0.0 : 2.0 * cum_sq_.back(); }

double OneDWaveData::min_gap() const {
  double gap = kInf;
  for (std::size_t k = 0; k + 1 < sigma_.size(); ++k) gap = std::min(gap, sigma_[k + 1] - sigma_[k]);
  return gap;
}

double OneDWaveData::support_radius() const {
  if (sigma_.empty()) return 0.0;
  return std::max(std::abs(sigma_.front()), std::abs(sigma_.back()));
}

OneDWaveData OneDWaveData::evolved(double t) const {
  OneDWaveData out = *this;
  const double shift = F(t);
  for (double& s : out.sigma_) s -= t;
  for (double& v : out.values_) v -= shift;
  out.provenance_ = state_at(t);
  return out;
}

PiecewiseData OneDWaveData::state_at(double t) const {
  PiecewiseData out;
  if (sigma_.empty()) return out;
  std::vector<double> r{0.0};
  for (double s : sigma_) {
    if (s - t > 0.0) r.push_back(s - t);
    if (t - s > 0.0) r.push_back(t - s);
  }
  std::sort(r.begin(), r.end());
  std::vector<double> merged{0.0};
  for (double x : r) {
    if (!nearly_equal(x, merged.back()) && x > merged.back()) merged.push_back(x);
  }
  if (merged.size() < 2) merged.push_back(1.0);
  out.s = merged;
  out.f0.resize(merged.size());
  out.f1.assign(merged.size(), 0.0);
  out.f0[0] = 0.0;
  for (std::size_t i = 1; i < merged.size(); ++i) out.f0[i] = f(t, merged[i]);
  for (std::size_t i = 0; i + 1 < merged.size(); ++i) {
    const double mid = 0.5 * (merged[i] + merged[i + 1]);
    out.f1[i] = ft(t, mid);
  }
  return out;
}

OneDWaveData build_F(const PiecewiseData& data) { return OneDWaveData::build(data); }
OneDWaveData build_F(const ReducedData& data) { return OneDWaveData::build(to_piecewise(data)); }
OneDWaveData evolve(const OneDWaveData& data, double t) { return data.evolved(t); }

BandEnergy band_energy(const OneDWaveData& data, double t, double r0, double r1) {
  if (!(r0 > 0.0) || !(r1 > r0)) throw Error(Errc::invalid_band, "band requires 0 < r0 < r1");
  const double shift = std::abs(t);
  return {r0, r1, t, data.interval_energy(t, r0 + shift, r1 + shift)};
}

const char* to_string(ChannelSide side) noexcept {
  switch (side) {
    case ChannelSide::none: return "None";
    case ChannelSide::plus: return "Plus";
    case ChannelSide::minus: return "Minus";
    case ChannelSide::both: return "Both";
  }
  return "None";
}

std::vector<double> default_channel_grid(const OneDWaveData& data, double r0, double r1) {
  std::vector<double> grid{0.0};
  for (double s : data.breakpoints()) {
    for (double r : {r0, r1}) {
      const double plus = 0.5 * (s - r);
      const double minus = 0.5 * (s + r);
      if (plus > 0.0) grid.push_back(plus);
      if (minus < 0.0) grid.push_back(minus);
    }
  }
  const double far = data.support_radius() + r1 + 10.0;
  grid.push_back(far);
  grid.push_back(-far);
  std::sort(grid.begin(), grid.end());
  grid.erase(std::unique(grid.begin(), grid.end()), grid.end());
  return grid;
}

ChannelResult channel_check(const OneDWaveData& data, double r0, double r1,
                            std::span<const double> t_grid) {
  ChannelResult out;
  out.initial_energy = band_energy(data, 0.0, r0, r1).value;
  if (!(out.initial_energy > 0.0)) {
    throw Error(Errc::degenerate_input, "zero initial band energy");
  }
  out.plus_min_ratio = 1.0;
  out.minus_min_ratio = 1.0;
  for (double t : t_grid) {
    const double ratio = band_energy(data, t, r0, r1).value / out.initial_energy;
    if (t >= 0.0) out.plus_min_ratio = std::min(out.plus_min_ratio, ratio);
    if (t <= 0.0) out.minus_min_ratio = std::min(out.minus_min_ratio, ratio);
  }
  const bool plus_ok = out.plus_min_ratio >= 0.5 - kChannelTolerance;
  const bool minus_ok = out.minus_min_ratio >= 0.5 - kChannelTolerance;
  out.side = plus_ok && minus_ok ? ChannelSide::both
             : plus_ok           ? ChannelSide::plus
             : minus_ok          ? ChannelSide::minus
                                 : ChannelSide::none;
  out.min_ratio = std::max(out.plus_min_ratio, out.minus_min_ratio);
  return out;
}

ChannelResult channel_check(const OneDWaveData& data, double r0, double r1) {
  const auto grid = default_channel_grid(data, r0, r1);
  return channel_check(data, r0, r1, grid);
}

double ExteriorIdentity::defect() const { return std::abs(lhs - (rhs - boundary_term)); }

ExteriorIdentity exterior_identity_check(const RadialProfile& u0, double r0) {
  if (r0 < 0.0) throw Error(Errc::invalid_parameter, "R0 must be non-negative");
  std::vector<double> splits;
  for (double s : u0.scales) {
    if (s > r0) splits.push_back(s - r0);
  }
  std::sort(splits.begin(), splits.end());
  ExteriorIdentity out;
  out.lhs = integrate_half_line(
      [&](double x) {
        const double r = r0 + x;
        const double d = u0.value(r) + r * u0.derivative(r);
        return d * d;
      },
      splits);
  out.rhs = integrate_half_line(
      [&](double x) {
        const double r = r0 + x;
        const double d = r * u0.derivative(r);
        return d * d;
      },
      splits);
  const double v = u0.value(r0);
  out.boundary_term = r0 * v * v;
  return out;
}

double HuygensLocalization::annulus_fraction(double radius) const {
  const double tt = std::abs(t);
  const double a = std::max(0.0, tt - radius * lambda);
  const double b = tt + radius * lambda;
  return data.interval_energy(t, a, b) / total;
}

HuygensLocalization huygens_localization(const OneDWaveData& data, double t, double lambda) {
  if (!(lambda > 0.0)) throw Error(Errc::invalid_parameter, "lambda must be positive");
  const double total = data.total_energy();
  if (!(total > 0.0)) throw Error(Errc::degenerate_input, "zero-energy data");
  return {data, t, lambda, total};
}

PiecewiseData random_piecewise(std::mt19937_64& rng, const RandomPiecewiseOptions& options) {
  const std::size_t span = options.max_cells - options.min_cells + 1;
  const std::size_t cells = options.min_cells + static_cast<std::size_t>(uniform01(rng) * span);
  std::vector<double> s{0.0};
  for (std::size_t i = 0; i < cells; ++i) s.push_back(uniform01(rng) * options.max_radius);
  std::sort(s.begin(), s.end());
  s.erase(std::unique(s.begin(), s.end()), s.end());
  PiecewiseData out;
  out.s = s;
  out.f0.assign(s.size(), 0.0);
  out.f1.assign(s.size(), 0.0);
  // Interior f0 nodes random; the last node value is held constant beyond.
  for (std::size_t i = 1; i < s.size(); ++i) out.f0[i] = options.amplitude * (2.0 * uniform01(rng) - 1.0);
  for (std::size_t i = 0; i + 1 < s.size(); ++i) out.f1[i] = options.amplitude * (2.0 * uniform01(rng) - 1.0);
  return out;
}

}  // namespace critwave

namespace critwave {

ChannelBatchResult channel_batch(std::size_t n, std::uint64_t seed, const RandomPiecewiseOptions& options) {
  std::mt19937_64 rng(seed);
  ChannelBatchResult out;
  while (out.cases < n) {
    const OneDWaveData data = OneDWaveData::build(random_piecewise(rng, options));
    const double support = std::max(data.support_radius(), 1e-3);
    const double r0 = 0.9 * support * uniform01(rng) + 1e-6;
    const double r1 = r0 + (support - r0) * (0.05 + 0.95 * uniform01(rng)) + 1e-6;
    if (!(band_energy(data, 0.0, r0, r1).value > 0.0)) {
      ++out.degenerate;
      continue;
    }
    const ChannelResult res = channel_check(data, r0, r1);
    ++out.cases;
    out.worst_min_ratio = std::min(out.worst_min_ratio, res.min_ratio);
    if (res.side == ChannelSide::none) ++out.failures;
  }
  return out;
}

}  // namespace critwave
