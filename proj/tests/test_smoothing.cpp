#include <gtest/gtest.h>

#include <cmath>

#include "oracles.hpp"
#include "prekopa_lab/smoothing.hpp"

using namespace prekopa;
using oracle::pi;

namespace {

// a_R by Simpson in the radius, with the profile written out independently.
double bump_mass_oracle(double R, int n) {
  const double s = std::sqrt(R);
  const double inner = R - 2 * s;
  const auto E = [](double v) { return v > 0 ? std::exp(-1 / v) : 0.0; };
  const auto psi = [&](double u) { return E(1 - u) / (E(1 - u) + E(u)); };
  const double sigma = std::pow(pi, n / 2.0) / std::tgamma(n / 2.0 + 1);
  const double shell = oracle::simpson(
      [&](double rho) { return psi((rho - inner) / s) * std::pow(rho, n - 1); }, inner, R - s, 20000);
  return sigma * std::pow(inner, n) + n * sigma * shell;
}

SampledField ball_indicator(int n, double R, double step) {
  return sample_field(n, R, step, [R](std::span<const double> x) {
    double r2 = 0;
    for (double v : x) r2 += v * v;
    return r2 < R * R ? 1.0 : 0.0;
  });
}

}  // namespace

TEST(Profile, ShapeAndSymmetry) {
  EXPECT_EQ(bump_profile(-3), 1.0);
  EXPECT_EQ(bump_profile(0), 1.0);
  EXPECT_EQ(bump_profile(1), 0.0);
  EXPECT_EQ(bump_profile(2), 0.0);
  for (double u = 0.01; u < 1; u += 0.01) {
    EXPECT_GE(bump_profile(u), 0.0);
    EXPECT_LE(bump_profile(u), 1.0);
    EXPECT_NEAR(bump_profile(u) + bump_profile(1 - u), 1.0, 1e-15);
    EXPECT_LE(bump_profile(u + 0.01), bump_profile(u));
  }
}

TEST(Profile, SlopeBoundIsMeasured) {
  double sup = 0, at = 0;
  for (int k = 1; k < 1000000; ++k) {
    const double u = k / 1e6;
    const double d = std::abs(bump_profile_derivative(u));
    if (d > sup) {
      sup = d;
      at = u;
    }
  }
  EXPECT_NEAR(sup, kProfileSlopeBound, 1e-9);
  EXPECT_LE(sup, kProfileSlopeBound * (1 + 1e-15));
  EXPECT_NEAR(at, 0.5, 1e-5);
  // derivative agrees with a central difference
  for (double u : {0.1, 0.3, 0.5, 0.77}) {
    const double fd = (bump_profile(u + 1e-6) - bump_profile(u - 1e-6)) / 2e-6;
    EXPECT_NEAR(bump_profile_derivative(u), fd, 1e-7);
  }
}

TEST(Profile, DerivativeIsContinuous) {
  const double h = 1e-4;
  double max_jump = 0;
  for (double u = -0.5; u < 1.5; u += h)
    max_jump = std::max(max_jump, std::abs(bump_profile_derivative(u + h) - bump_profile_derivative(u)));
  EXPECT_LT(max_jump, 1e-2);
  EXPECT_EQ(bump_profile_derivative(0), 0.0);
  EXPECT_EQ(bump_profile_derivative(1), 0.0);
}

TEST(Bump, UnitBallVolumes) {
  EXPECT_NEAR(unit_ball_volume(1), 2.0, 1e-15);
  EXPECT_NEAR(unit_ball_volume(2), pi, 1e-15);
  EXPECT_NEAR(unit_ball_volume(3), 4 * pi / 3, 1e-14);
  EXPECT_THROW(unit_ball_volume(0), ArgumentError);
}

TEST(Bump, SpecExamples) {
  const auto b1 = make_bump(100, 1);
  EXPECT_GE(b1.mass, 160);
  EXPECT_LE(b1.mass, 180);
  EXPECT_NEAR(b1.mass, 170, 1e-10);  // psi(u) + psi(1 - u) = 1
  const auto b2 = make_bump(100, 2);
  EXPECT_GE(b2.mass, pi * 80 * 80);
  EXPECT_LE(b2.mass, pi * 90 * 90);
  const double y0[] = {0.0}, yedge[] = {90.0}, yin[] = {79.99};
  EXPECT_EQ(b1(y0), 1.0);
  EXPECT_EQ(b1(yedge), 0.0);
  EXPECT_EQ(b1(yin), 1.0);
  EXPECT_THROW(make_bump(8.9, 1), DomainError);
  EXPECT_THROW(make_bump(100, 0), DomainError);
}

TEST(Bump, MassAndGradientAcrossRadiiAndDimensions) {
  for (double R : {100.0, 400.0, 1e4}) {
    for (int n : {1, 2, 3}) {
      const auto b = make_bump(R, n);
      const double sigma = unit_ball_volume(n);
      EXPECT_GE(b.mass, sigma * std::pow(R - 2 * std::sqrt(R), n));
      EXPECT_LE(b.mass, sigma * std::pow(R - std::sqrt(R), n));
      EXPECT_NEAR(b.mass, bump_mass_oracle(R, n), 1e-10 * b.mass) << R << " " << n;
      EXPECT_LE(b.grad_sup, kProfileSlopeBound / std::sqrt(R)) << R << " " << n;
      EXPECT_GT(b.grad_sup, 0.999 * kProfileSlopeBound / std::sqrt(R));
      EXPECT_EQ(b.c_psi, kProfileSlopeBound);
    }
  }
}

TEST(Audit, SpecExamples) {
  const auto a = constants_audit(100, 1);
  EXPECT_NEAR(a.ratio, 1.5625, 1e-12);
  EXPECT_NEAR(a.cap, 1.5625, 1e-15);
  EXPECT_NEAR(a.grad_bound, 0.2, 1e-15);
  EXPECT_NEAR(a.grad_factor, 0.04, 1e-15);
  EXPECT_NEAR(constants_audit(400, 1).ratio, std::pow(400.0 / 360, 2), 1e-12);
  EXPECT_NEAR(constants_audit(100, 3).cap, std::pow(1.25, 6), 1e-12);
  EXPECT_THROW(constants_audit(4, 1), DomainError);
  EXPECT_THROW(constants_audit(100, 0), DomainError);
}

TEST(Audit, RatioDecreasesAlongLadder) {
  for (int n : {1, 2, 3}) {
    double prev = kInfinity;
    for (double R : {100.0, 200.0, 400.0, 800.0, 1600.0}) {
      const double r = constants_ratio(R, n);
      EXPECT_LT(r, prev);
      EXPECT_LE(r, std::pow(1.25, 2 * n));
      prev = r;
    }
  }
}

TEST(Audit, SmallRadiiSkipTheBump) {
  const auto a = constants_audit(6, 1);
  EXPECT_FALSE(a.bump.has_value());
  EXPECT_GT(a.ratio, a.cap);  // the cap only applies from R = 100 on
  EXPECT_TRUE(constants_audit(9, 2).bump.has_value());
}

TEST(Convolve, OneDimensionalExamples) {
  const auto bump = make_bump(100, 1);
  const auto ones = ball_indicator(1, 100, default_convolution_step(100));
  for (double y : {0.0, 2.5, -5.0, 9.9, 10.0}) {
    const double v[] = {y};
    EXPECT_NEAR(convolve(ones, bump, v), 1.0, 1e-10) << y;
  }
  const auto zeros = sample_field(1, 100, 0.5, [](std::span<const double>) { return 0.0; });
  const double y0[] = {0.0};
  EXPECT_EQ(convolve(zeros, bump, y0), 0.0);
}

TEST(Convolve, TwoDimensional) {
  const auto bump = make_bump(100, 2);
  const auto ones = ball_indicator(2, 100, 0.25);
  for (auto [a, b] : {std::pair{0.0, 0.0}, std::pair{3.0, 2.0}, std::pair{-7.0, 7.0}}) {
    const double y[] = {a, b};
    EXPECT_NEAR(convolve(ones, bump, y), 1.0, 1e-9);
  }
}

TEST(Convolve, LinearFunctionsAreReproduced) {
  const auto bump = make_bump(100, 1);
  const auto lin = sample_field(1, 100, default_convolution_step(100), [](std::span<const double> x) {
    return std::abs(x[0]) < 100 ? 3 + 0.5 * x[0] : 0.0;
  });
  const double y[] = {4.0};
  EXPECT_NEAR(convolve(lin, bump, y), 5.0, 1e-9);
}

TEST(Convolve, CoverageAndDimensionChecked) {
  const auto bump = make_bump(100, 1);
  const auto small = sample_field(1, 90, 0.5, [](std::span<const double>) { return 1.0; });
  const double y[] = {0.0};
  EXPECT_THROW(convolve(small, bump, y), CoverageError);
  const auto plane = sample_field(2, 100, 2.0, [](std::span<const double>) { return 1.0; });
  EXPECT_THROW(convolve(plane, bump, y), ArgumentError);
}

TEST(Young, SpecExamples) {
  const auto bump = make_bump(100, 1);
  const double y[] = {0.0};
  const auto ones = young_bound_check(ball_indicator(1, 100, default_convolution_step(100)), bump, y);
  EXPECT_NEAR(ones.lhs, 1.0, 1e-10);
  EXPECT_GE(ones.rhs, 1.2);
  EXPECT_LE(ones.rhs, 1.57);
  const auto small = young_bound_check(sample_field(1, 100, default_convolution_step(100),
                                                    [](std::span<const double> x) { return std::abs(x[0]) < 1 ? 1.0 : 0.0; }),
                                       bump, y);
  EXPECT_LT(small.lhs, small.rhs);
  const auto zero = young_bound_check(sample_field(1, 100, 1.0, [](std::span<const double>) { return 0.0; }), bump, y);
  EXPECT_EQ(zero.lhs, 0.0);
  EXPECT_EQ(zero.rhs, 0.0);
}

TEST(Young, HoldsForOscillatingFields) {
  const auto bump = make_bump(400, 1);
  const auto f = sample_field(1, 400, default_convolution_step(400),
                              [](std::span<const double> x) { return std::sin(0.3 * x[0]) + 0.2 * std::cos(2 * x[0]); });
  for (double y : {-20.0, 0.0, 13.0}) {
    const double v[] = {y};
    EXPECT_NO_THROW(young_bound_check(f, bump, v));
  }
}
