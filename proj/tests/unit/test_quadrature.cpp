#include <gtest/gtest.h>

#include <cmath>
#include <limits>

#include "critwave/error.hpp"
#include "critwave/quadrature.hpp"
#include "oracle.hpp"

using namespace critwave;

TEST(Quadrature, FiniteInterval) {
  EXPECT_NEAR(integrate([](double x) { return x * x; }, 0.0, 1.0), 1.0 / 3.0, 1e-15);
  EXPECT_NEAR(integrate([](double x) { return std::sin(x); }, 0.0, M_PI), 2.0, 1e-13);
}

TEST(Quadrature, InfiniteUpperLimit) {
  const double inf = std::numeric_limits<double>::infinity();
  EXPECT_NEAR(integrate([](double x) { return std::exp(-x); }, 0.0, inf), 1.0, 1e-12);
  EXPECT_NEAR(integrate([](double x) { return 1.0 / (1.0 + x * x); }, 0.0, inf), M_PI / 2, 1e-12);
}

TEST(Quadrature, HalfLineWithSplits) {
  const double splits[] = {1.0, 2.0};
  // narrow bump at 1.5 plus a slow tail
  auto f = [](double x) { return std::exp(-1e4 * (x - 1.5) * (x - 1.5)) + 1.0 / (1.0 + x) / (1.0 + x); };
  EXPECT_NEAR(integrate_half_line(f, splits), std::sqrt(M_PI / 1e4) + 1.0, 1e-11);
}

TEST(PowerMoment, MatchesReferenceIntegrals) {
  struct Case {
    double a, b, c, r0, r1;
  };
  const double inf = std::numeric_limits<double>::infinity();
  for (const Case& k : {Case{4, 3, 3, 0, 1}, Case{4, 3, 3, 0.5, 7}, Case{2, 3, 3, 2, inf}, Case{4, 3, 3, 0, inf},
                        Case{0, 1.5, 2, 0, inf}, Case{2, 2, 8, 1, 40}, Case{4, 3, 3, 100, inf}}) {
    auto f = [&](double r) { return std::pow(r, k.a) * std::pow(1.0 + r * r / k.c, -k.b); };
    double ref;
    if (std::isinf(k.r1)) {
      ref = oracle::simpson(f, k.r0, k.r0 + 1.0, 20000) +
            oracle::half_line([&](double x) { return f(k.r0 + 1.0 + x); }, std::max(1.0, k.r0), 400000);
    } else {
      ref = oracle::simpson(f, k.r0, k.r1, 200000);
    }
    EXPECT_NEAR(power_moment(k.a, k.b, k.c, k.r0, k.r1), ref, 1e-9 * std::abs(ref)) << k.a << " " << k.r0;
  }
}

TEST(PowerMoment, DivergentParametersRejected) {
  EXPECT_THROW(power_moment(4, 2, 3, 0, 1), Error);  // 2b <= a + 1
  EXPECT_THROW(power_moment(1, 3, 3, 2, 1), Error);
}
