#include <gtest/gtest.h>

#include <algorithm>
#include <cstring>
#include <random>

#include "prekopa_lab/weights.hpp"

using namespace prekopa;

namespace {

WeightSpec by_id(const std::string& id) {
  auto w = find_in_catalog(id);
  EXPECT_TRUE(w.has_value()) << id;
  return *w;
}

// Uniform sample from the fiber; full space is truncated to [-5, 5]^n.
std::vector<double> sample_fiber(const DomainSpec& d, std::mt19937_64& rng) {
  std::vector<double> x(static_cast<std::size_t>(d.dimension()));
  for (;;) {
    for (int i = 0; i < d.dimension(); ++i) {
      double lo = -5, hi = 5;
      if (d.shape() == DomainShape::box) {
        lo = d.bounds()[static_cast<std::size_t>(i)].lower;
        hi = d.bounds()[static_cast<std::size_t>(i)].upper;
      } else if (d.shape() == DomainShape::ball) {
        lo = -d.radius();
        hi = d.radius();
      }
      x[static_cast<std::size_t>(i)] = std::uniform_real_distribution<double>(lo, hi)(rng);
    }
    if (d.contains(x)) return x;
  }
}

}  // namespace

TEST(Weights, EvalExamples) {
  const double zero[] = {0.0}, two[] = {2.0}, one[] = {1.0};
  EXPECT_EQ(eval(by_id("coupled-gaussian"), 1, zero), 1.0);
  EXPECT_EQ(eval(by_id("x2"), 5, two), 4.0);
  const auto ma = WeightSpec::max_affine("m", {{1, 1, 0}, {-1, -1, 0}}, DomainSpec::full_space(1), ConvexFlag::convex);
  EXPECT_EQ(eval(ma, 1, one), 2.0);
}

TEST(Weights, LiftDiscardsImaginaryParts) {
  const std::complex<double> z1[] = {{0, 7}};
  EXPECT_EQ(lift_eval(by_id("coupled-gaussian"), {1, 9}, z1), 1.0);
  const std::complex<double> z2[] = {{2, -3}};
  EXPECT_EQ(lift_eval(by_id("x2"), {0, 1}, z2), 4.0);
}

TEST(Weights, ImDependentWeightsMustBeRadialPlanar) {
  // |tau|^2 written as a quadratic form on the plane has no fiber: rejected.
  EXPECT_THROW(WeightSpec::make("abs2", WeightKind::quadratic_form, {1, 0, 0, 1}, std::nullopt, ConvexFlag::unknown),
               ArgumentError);
  EXPECT_THROW(WeightSpec::make("r", WeightKind::radial_planar, {1, 2, 0, 0}, DomainSpec::full_space(1),
                                ConvexFlag::convex),
               ArgumentError);
  const std::complex<double> z[] = {{0, 0}};
  EXPECT_THROW(lift_eval(by_id("radial:abs2"), {1, 1}, z), ArgumentError);
  EXPECT_DOUBLE_EQ(by_id("radial:abs2").planar_eval({3, 4}), 25.0);
}

TEST(Weights, CatalogComposition) {
  const auto cat = catalog();
  EXPECT_GE(cat.size(), 8u);
  int convex = 0, nonconvex = 0, psh = 0, non_psh = 0;
  bool has_max_affine = false, has_norm = false;
  for (const auto& w : cat) {
    if (w.is_planar()) {
      psh += w.convex_flag() == ConvexFlag::convex;
      non_psh += w.convex_flag() == ConvexFlag::nonconvex;
      continue;
    }
    if (w.convex_flag() == ConvexFlag::convex) {
      ++convex;
      has_max_affine |= w.kind() == WeightKind::max_affine;
      has_norm |= w.kind() == WeightKind::norm_power;
    }
    nonconvex += w.convex_flag() == ConvexFlag::nonconvex;
  }
  EXPECT_GE(convex, 5);
  EXPECT_GE(nonconvex, 2);
  EXPECT_GE(psh, 1);
  EXPECT_GE(non_psh, 1);
  EXPECT_TRUE(has_max_affine);
  EXPECT_TRUE(has_norm);
  EXPECT_EQ(by_id("coupled-gaussian").convex_flag(), ConvexFlag::convex);
  EXPECT_EQ(by_id("minus-t2-plus-x2").convex_flag(), ConvexFlag::nonconvex);
  EXPECT_EQ(by_id("radial:minus-abs2").convex_flag(), ConvexFlag::nonconvex);
}

TEST(Weights, QuadraticFormFlagFromEigenvalues) {
  const auto line = DomainSpec::full_space(1);
  EXPECT_EQ(WeightSpec::quadratic_form("a", {1, -1, -1, 2}, line).convex_flag(), ConvexFlag::convex);
  EXPECT_EQ(WeightSpec::quadratic_form("b", {1, 1, 1, 1}, line).convex_flag(), ConvexFlag::convex);  // singular PSD
  EXPECT_EQ(WeightSpec::quadratic_form("c", {1, 2, 2, 1}, line).convex_flag(), ConvexFlag::nonconvex);
  EXPECT_THROW(WeightSpec::quadratic_form("d", {1, 0.5, 0, 1}, line), ArgumentError);
  EXPECT_THROW(WeightSpec::make("e", WeightKind::quadratic_form, {-1, 0, 0, 1}, line, ConvexFlag::convex),
               ArgumentError);
  EXPECT_THROW(WeightSpec::quadratic_form("f", {1, 0, 0}, line), ArgumentError);
}

TEST(Weights, LinearAndConstantTerms) {
  const auto w = WeightSpec::quadratic_form("q", {1, 0, 0, 1}, DomainSpec::full_space(1), {2, -1}, 3.0);
  const double x[] = {2.0};
  EXPECT_DOUBLE_EQ(w.eval(1, x), 1 + 4 + 2 - 2 + 3);
}

TEST(Weights, DimensionMismatchIsArgumentError) {
  const double x2[] = {1.0, 2.0};
  EXPECT_THROW(by_id("coupled-gaussian").eval(0, x2), ArgumentError);
  const double x1[] = {1.0};
  EXPECT_THROW(by_id("quad-plane").eval(0, x1), ArgumentError);
}

TEST(Weights, DomainSpecInvariants) {
  EXPECT_THROW(DomainSpec::box({{1, 1}}), ArgumentError);
  EXPECT_THROW(DomainSpec::box({{2, 1}}), ArgumentError);
  EXPECT_THROW(DomainSpec::box({}), ArgumentError);
  EXPECT_THROW(DomainSpec::ball(2, 0), ArgumentError);
  EXPECT_THROW(DomainSpec::ball(0, 1), ArgumentError);
  EXPECT_THROW(DomainSpec::full_space(0), ArgumentError);
  const auto ball = DomainSpec::ball(2, 1);
  const double in[] = {0.5, 0.5}, out[] = {1.0, 0.1};
  EXPECT_TRUE(ball.contains(in));
  EXPECT_FALSE(ball.contains(out));
}

TEST(Weights, CustomWeightsCarryNoGuarantee) {
  const auto w = WeightSpec::custom("c", [](double t, std::span<const double> x) { return t * t + x[0] * x[0]; },
                                    DomainSpec::full_space(1));
  EXPECT_EQ(w.convex_flag(), ConvexFlag::unknown);
  EXPECT_THROW(WeightSpec::make("c", WeightKind::custom_callable, {}, DomainSpec::full_space(1), ConvexFlag::convex),
               ArgumentError);
}

TEST(Weights, ParameterLayoutValidated) {
  const auto line = DomainSpec::full_space(1);
  EXPECT_THROW(WeightSpec::make("m", WeightKind::max_affine, {2, 1, 1, 0}, line, ConvexFlag::convex), ArgumentError);
  EXPECT_THROW(WeightSpec::make("m", WeightKind::max_affine, {0}, line, ConvexFlag::convex), ArgumentError);
  EXPECT_THROW(WeightSpec::make("n", WeightKind::norm_power, {0, 1, 0}, line, ConvexFlag::convex), ArgumentError);
  EXPECT_THROW(WeightSpec::make("g", WeightKind::coupled_gaussian, {1, 1}, line, ConvexFlag::convex), ArgumentError);
  EXPECT_THROW(WeightSpec::make("g", WeightKind::coupled_gaussian, {0, 1, 1}, line, ConvexFlag::convex), ArgumentError);
  EXPECT_THROW(WeightSpec::make("q", WeightKind::quadratic_form, {1, 0, 0, NAN}, line, ConvexFlag::unknown),
               ArgumentError);
}

TEST(Weights, MidpointConvexityOfConvexEntries) {
  std::mt19937_64 rng(20240611);
  std::uniform_real_distribution<double> tdist(-3, 3);
  for (const auto& w : catalog()) {
    if (w.is_planar() || w.convex_flag() != ConvexFlag::convex) continue;
    for (int k = 0; k < 1000; ++k) {
      const double t1 = tdist(rng), t2 = tdist(rng);
      const auto x1 = sample_fiber(*w.fiber(), rng);
      const auto x2 = sample_fiber(*w.fiber(), rng);
      std::vector<double> xm(x1.size());
      for (std::size_t i = 0; i < xm.size(); ++i) xm[i] = 0.5 * (x1[i] + x2[i]);
      const double mid = w.eval(0.5 * (t1 + t2), xm);
      EXPECT_LE(mid, 0.5 * (w.eval(t1, x1) + w.eval(t2, x2)) + 1e-12) << w.id();
    }
  }
}

TEST(Weights, FalsifiersBreakMidpointConvexity) {
  // a witness pair for each nonconvex entry
  const double x0[] = {0.0}, x3[] = {3.0};
  const auto a = by_id("minus-t2-plus-x2");
  EXPECT_GT(a.eval(0, x0), 0.5 * (a.eval(-1, x0) + a.eval(1, x0)));
  const auto b = by_id("x2-times-1-plus-t2");
  const double xm[] = {1.5};
  EXPECT_GT(b.eval(1.5, xm), 0.5 * (b.eval(0, x3) + b.eval(3, x0)));
}

TEST(Weights, LiftIgnoresImaginaryShiftsExactly) {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> u(-4, 4);
  for (const auto& w : catalog()) {
    if (w.is_planar()) continue;
    for (int k = 0; k < 200; ++k) {
      const auto x = sample_fiber(*w.fiber(), rng);
      std::vector<std::complex<double>> z(x.size()), zs(x.size());
      for (std::size_t i = 0; i < x.size(); ++i) {
        z[i] = {x[i], u(rng)};
        zs[i] = z[i] + std::complex<double>(0, u(rng));
      }
      const std::complex<double> tau(u(rng), u(rng));
      EXPECT_EQ(w.lift_eval(tau, z), w.lift_eval(tau + std::complex<double>(0, u(rng)), zs)) << w.id();
    }
  }
}

TEST(Weights, EvalIsDeterministicAndFiniteOnFiber) {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> tdist(-3, 3);
  for (const auto& w : catalog()) {
    if (w.is_planar()) continue;
    for (int k = 0; k < 200; ++k) {
      const double t = tdist(rng);
      const auto x = sample_fiber(*w.fiber(), rng);
      const double a = w.eval(t, x), b = w.eval(t, x);
      EXPECT_EQ(std::memcmp(&a, &b, sizeof a), 0);
      EXPECT_FALSE(std::isnan(a));
    }
  }
}

TEST(Weights, BreakpointsFollowKinks) {
  const auto ma = by_id("max-affine-box");
  ASSERT_EQ(ma.fiber_breakpoints(0.3).size(), 1u);
  EXPECT_DOUBLE_EQ(ma.fiber_breakpoints(0.3)[0], -0.3);
  EXPECT_DOUBLE_EQ(by_id("abs-shift-box").fiber_breakpoints(0.4)[0], 0.4);
  EXPECT_TRUE(by_id("coupled-gaussian").fiber_breakpoints(1).empty());
}
