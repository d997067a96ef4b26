#include <gtest/gtest.h>

#include <cmath>

#include "bubbles.hpp"
#include "critwave/energy.hpp"
#include "critwave/error.hpp"
#include "critwave/profiles.hpp"
#include "oracle.hpp"

using namespace critwave;
using bubbles::Bubble;

namespace {

const double kG = 3.0 * std::sqrt(3.0) * M_PI * M_PI / 4.0;

double pairing_oracle(double s) {
  return 4 * M_PI * oracle::log_simpson([&](double r) { return r * r * oracle::w_dr(r) * oracle::w_dr(r, 3, s); }, -25.0, 40.0) / kG;
}

void expect_recovered(const ProfileDecomposition& d, std::vector<Bubble> bs) {
  std::sort(bs.begin(), bs.end(), [](const Bubble& x, const Bubble& y) { return x.lambda > y.lambda; });
  ASSERT_EQ(d.profiles.size(), bs.size());
  for (std::size_t j = 0; j < bs.size(); ++j) {
    EXPECT_EQ(d.profiles[j].iota, bs[j].iota) << j;
    EXPECT_NEAR(d.profiles[j].lambda / bs[j].lambda, 1.0, 0.01) << j;
  }
}

}  // namespace

TEST(ScalePairing, MatchesQuadratureOracle) {
  EXPECT_NEAR(scale_pairing(1.0), 1.0, 1e-10);
  for (double s : {3.0, 10.0, 1e3, 1e5}) {
    const double ref = pairing_oracle(s);
    EXPECT_NEAR(scale_pairing(s), ref, 1e-7) << s;
    EXPECT_NEAR(scale_pairing(1.0 / s), scale_pairing(s), 1e-12);
  }
  double prev = 1.0;
  for (double s = 10.0; s <= 1e7; s *= 10.0) {
    const double v = scale_pairing(s);
    EXPECT_LT(v, prev);
    prev = v;
  }
  EXPECT_LE(scale_pairing(1e3), 0.1);
  EXPECT_THROW(scale_pairing(0.0), Error);
}

TEST(Correlate, Examples) {
  auto m = bubbles::wide_mesh();
  const double lambda = 0.01;
  EXPECT_NEAR(correlate_scale(sample_w(m, lambda), lambda), 1.0, 1e-4);
  EXPECT_NEAR(correlate_scale(bubbles::snapshot(m, {{-1, lambda}, {-1, lambda}, {-1, lambda}}, 0, 0), lambda), -3.0, 3e-4);
  const FieldState two = bubbles::snapshot(m, {{1, lambda}, {1, 1000 * lambda}}, 0, 0);
  const double c = correlate_scale(two, lambda);
  EXPECT_NEAR(c, 1.0 + scale_pairing(1000.0), 1e-3);
  EXPECT_LT(c - 1.0, 0.1);
}

TEST(Extract, ZeroGivesEmpty) {
  auto m = bubbles::wide_mesh();
  const ProfileDecomposition d = extract(FieldState::zero(m));
  EXPECT_TRUE(d.profiles.empty());
  EXPECT_EQ(d.pythagorean_defect, 0.0);
  EXPECT_FALSE(d.over_budget);
}

TEST(Extract, SingleBubbleWithNoise) {
  auto m = bubbles::wide_mesh();
  const FieldState a = bubbles::snapshot(m, {{1, 0.01}}, 1e-3, 4);
  const ProfileDecomposition d = extract(a);
  expect_recovered(d, {{1, 0.01}});
  // the residual is the noise plus the profile mismatch
  const double noise = energy(combine(1.0, a, -1.0, sample_w(m, 0.01))).gradient_sq;
  EXPECT_LT(d.residual_grad_sq, 2.0 * noise + 1e-4 * kG);
  EXPECT_NEAR(d.profiles[0].raw_coefficient, 1.0, 0.01);
}

TEST(Extract, TwoBubblesOppositeSigns) {
  auto m = bubbles::wide_mesh();
  const std::vector<Bubble> bs{{1, 1.0}, {-1, 1e-3}};
  const FieldState a = bubbles::snapshot(m, bs, 0.0, 0);
  const ProfileDecomposition d = extract(a);
  expect_recovered(d, bs);
  const PythagoreanDefects p = pythagorean_check(a, d);
  EXPECT_LE(p.grad_defect, p.cross_term_bound * (1 + 1e-9) + 1e-9);
  EXPECT_EQ(p.kinetic_defect, 0.0);
  // the cross term at ratio 1e3 is about 2 scale_pairing(1e3) |grad W|^2
  EXPECT_NEAR(p.grad_defect / kG, 2.0 * scale_pairing(1e3), 0.02);
  const auto o = orthogonality_matrix(d);
  ASSERT_EQ(o.size(), 2u);
  EXPECT_EQ(o[0][0], 1.0);
  EXPECT_NEAR(o[0][1], scale_pairing(d.profiles[0].lambda / d.profiles[1].lambda), 1e-15);
  EXPECT_LE(o[0][1], 0.1);
}

TEST(Extract, ThreeBubblesRandomSeeds) {
  auto m = bubbles::wide_mesh();
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    std::mt19937_64 rng(seed);
    std::vector<Bubble> bs;
    double lambda = std::pow(10.0, 1.0 + 0.5 * uniform01(rng));
    for (int j = 0; j < 3; ++j) {
      bs.push_back({uniform01(rng) < 0.5 ? -1 : 1, lambda});
      lambda /= std::pow(10.0, 3.0 + 0.3 * uniform01(rng));
    }
    const FieldState a = bubbles::snapshot(m, bs, 1e-3, seed + 100);
    const ProfileDecomposition d = extract(a);
    expect_recovered(d, bs);
    const PythagoreanDefects p = pythagorean_check(a, d);
    EXPECT_LE(p.grad_defect, p.cross_term_bound + 1e-3 * kG);
  }
}

TEST(Extract, Equivariance) {
  auto m = bubbles::wide_mesh();
  const FieldState a = bubbles::snapshot(m, {{1, 0.5}, {-1, 2e-4}}, 1e-3, 9);
  const ProfileDecomposition d = extract(a);
  for (double c : {0.1, 7.0}) {
    const ProfileDecomposition e = extract(rescale(a, c));
    ASSERT_EQ(e.profiles.size(), d.profiles.size());
    for (std::size_t j = 0; j < d.profiles.size(); ++j) {
      EXPECT_EQ(e.profiles[j].iota, d.profiles[j].iota);
      EXPECT_NEAR(e.profiles[j].lambda / (c * d.profiles[j].lambda), 1.0, 0.01);
    }
    EXPECT_NEAR(e.pythagorean_defect / e.total_grad_sq, d.pythagorean_defect / d.total_grad_sq, 1e-3);
  }
}

TEST(Extract, SignFlip) {
  auto m = bubbles::wide_mesh();
  const FieldState a = bubbles::snapshot(m, {{1, 0.5}, {-1, 2e-4}}, 1e-3, 2);
  FieldState neg = a;
  for (double& v : neg.h) v = -v;
  const ProfileDecomposition d = extract(a), e = extract(neg);
  ASSERT_EQ(d.profiles.size(), e.profiles.size());
  for (std::size_t j = 0; j < d.profiles.size(); ++j) {
    EXPECT_EQ(e.profiles[j].iota, -d.profiles[j].iota);
    EXPECT_DOUBLE_EQ(e.profiles[j].lambda, d.profiles[j].lambda);
    EXPECT_DOUBLE_EQ(e.profiles[j].raw_coefficient, -d.profiles[j].raw_coefficient);
  }
  EXPECT_DOUBLE_EQ(e.pythagorean_defect, d.pythagorean_defect);
}

TEST(Extract, IdempotentOnResidual) {
  auto m = bubbles::wide_mesh();
  const FieldState a = bubbles::snapshot(m, {{-1, 3.0}, {1, 1e-3}, {-1, 5e-7}}, 1e-3, 21);
  const ProfileDecomposition d = extract(a);
  ASSERT_EQ(d.profiles.size(), 3u);
  const ProfileDecomposition again = extract(d.residual);
  EXPECT_TRUE(again.profiles.empty());
  for (double c : again.correlation_history) EXPECT_LT(std::abs(c), 0.3);
}

TEST(Extract, OverBudget) {
  auto m = bubbles::wide_mesh();
  ExtractConfig cfg;
  cfg.max_profiles = 1;
  const ProfileDecomposition d = extract(bubbles::snapshot(m, {{1, 1.0}, {1, 1e-3}}, 0.0, 0), cfg);
  EXPECT_TRUE(d.over_budget);
  EXPECT_EQ(d.profiles.size(), 1u);
}

TEST(Extract, RejectsBadCoefficientsAndConfig) {
  auto m = bubbles::wide_mesh();
  // 2 W: the coefficient 2 is outside the snap window, so no profile is accepted
  const ProfileDecomposition d = extract(bubbles::snapshot(m, {{1, 0.1}, {1, 0.1}}, 0.0, 0));
  for (const Profile& p : d.profiles) EXPECT_GT(std::abs(std::log10(p.lambda / 0.1)), 0.5);
  ExtractConfig bad;
  bad.separation_factor = 1.0;
  EXPECT_THROW(extract(FieldState::zero(m), bad), Error);
}

TEST(Pythagorean, SingleExactAndEmpty) {
  auto m = bubbles::wide_mesh();
  const FieldState w = sample_w(m, 0.02, -1);
  const ProfileDecomposition d = extract(w);
  ASSERT_EQ(d.profiles.size(), 1u);
  const PythagoreanDefects p = pythagorean_check(w, d);
  EXPECT_LT(p.grad_defect, 1e-3 * kG);
  EXPECT_LT(p.energy_defect, 1e-3 * kG);
  EXPECT_LE(p.grad_defect, p.cross_term_bound * (1 + 1e-9) + 1e-12);

  auto u = std::make_shared<const RadialMesh>(RadialMesh::uniform(0.01, 10.0));
  const FieldState bump = FieldState::from_functions(
      u, [](double r) { return 0.05 * std::exp(-(r - 3) * (r - 3)); }, [](double r) { return 0.1 * std::exp(-r * r); });
  const ProfileDecomposition e = extract(bump);
  EXPECT_TRUE(e.profiles.empty());
  const PythagoreanDefects q = pythagorean_check(bump, e);
  EXPECT_EQ(q.grad_defect, 0.0);
  EXPECT_EQ(q.kinetic_defect, 0.0);
  EXPECT_EQ(q.energy_defect, 0.0);
  EXPECT_NEAR(e.residual_kin_sq, energy(bump).kinetic_sq, 1e-15);
}

TEST(Orthogonality, SmallInputsEmpty) {
  ProfileDecomposition d;
  EXPECT_TRUE(orthogonality_matrix(d).empty());
  d.profiles.push_back({1, 1.0, 1.0});
  EXPECT_TRUE(orthogonality_matrix(d).empty());
  d.profiles.push_back({1, 1.0, 1.0});
  EXPECT_NEAR(orthogonality_matrix(d)[0][1], 1.0, 1e-10);
}
