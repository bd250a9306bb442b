#include <gtest/gtest.h>

#include <cmath>

#include "oracles.hpp"
#include "prekopa_lab/mep.hpp"

using namespace prekopa;
using oracle::pi;

namespace {

PlanarWeight planar(const std::string& id) { return planar_weight(*find_in_catalog(id)); }
WeightSpec by_id(const std::string& id) { return *find_in_catalog(id); }

bool has_violation(const MepSweep& s, cplx a, double r) {
  for (const auto& v : s.violations)
    if (std::abs(v.center - a) < 1e-12 && std::abs(v.radius - r) < 1e-12) return true;
  return false;
}

}  // namespace

TEST(MepCheck, SpecExamples) {
  const auto pass = mep_check(planar("radial:abs2"), 0, 1, 16);
  EXPECT_NEAR(pass.minimal_norm, 1.9858653038, 1e-9);
  EXPECT_NEAR(pass.bound, pi, 1e-14);
  EXPECT_EQ(pass.verdict, ExtensionVerdict::pass);
  const auto fail = mep_check(planar("radial:minus-abs2"), 0, 1, 16);
  EXPECT_NEAR(fail.minimal_norm, 5.3981415691, 1e-9);
  EXPECT_EQ(fail.verdict, ExtensionVerdict::fail_at_truncation);
}

TEST(MepCheck, ConstantWeightsAttainTheBound) {
  for (double c : {-1.0, 0.0, 2.5}) {
    for (double r : {0.25, 0.5, 1.0}) {
      const auto cert = mep_check(constant_weight(c), {0.3, -0.6}, r, 8);
      EXPECT_NEAR(cert.minimal_norm, pi * r * r * std::exp(-c), 1e-12 * cert.bound);
      EXPECT_EQ(cert.verdict, ExtensionVerdict::pass);
    }
  }
}

TEST(MepCheck, RadiusScaling) {
  const double base = mep_check(constant_weight(0), 0, 0.25, 8).minimal_norm;
  for (double r : {0.5, 1.0}) {
    EXPECT_NEAR(mep_check(constant_weight(0), 0, r, 8).minimal_norm / base, (r / 0.25) * (r / 0.25), 1e-9);
  }
}

TEST(MepCheck, DomainAndRadiusChecked) {
  auto w = constant_weight(0);
  w.domain_radius = 1.0;
  EXPECT_THROW(mep_check(w, 0.5, 0.6), ArgumentError);
  EXPECT_NO_THROW(mep_check(w, 0.5, 0.5, 4));
  EXPECT_THROW(mep_check(constant_weight(0), 0, 0), ArgumentError);
  EXPECT_THROW(mep_check(constant_weight(0), 0, -1), ArgumentError);
}

TEST(Sweep, SpecExamples) {
  const std::vector<cplx> centers{0, 0.5, cplx(0, 1)};
  const std::vector<double> radii{0.5, 1.0};
  const auto ok = mep_sweep(planar("radial:abs2"), centers, radii);
  EXPECT_TRUE(ok.all_pass());
  EXPECT_EQ(ok.cells.size(), 6u);
  const auto bad = mep_sweep(planar("radial:minus-abs2"), centers, radii);
  EXPECT_FALSE(bad.all_pass());
  EXPECT_TRUE(has_violation(bad, 0, 1.0));
  const auto empty = mep_sweep(planar("radial:abs2"), centers, {});
  EXPECT_TRUE(empty.cells.empty());
  EXPECT_TRUE(empty.all_pass());
}

TEST(Sweep, DefaultLatticeSeparatesPshFromNonPsh) {
  const auto centers = default_sweep_centers();
  EXPECT_EQ(centers.size(), 25u);
  EXPECT_EQ(centers.front(), cplx(-1, -1));
  EXPECT_EQ(centers[1], cplx(-0.5, -1));
  EXPECT_TRUE(mep_sweep(planar("radial:abs2"), centers, default_sweep_radii()).all_pass());
  const auto bad = mep_sweep(planar("radial:minus-abs2"), centers, default_sweep_radii());
  EXPECT_EQ(bad.violations.size(), 75u);
}

TEST(Sweep, ErrorsBecomeViolations) {
  const PlanarWeight w{"partial", [](cplx z) { return z.real() > 1.2 ? std::nan("") : 0.0; }, ConvexFlag::unknown,
                       std::nullopt, std::nullopt};
  const auto s = mep_sweep(w, {0, 1.0}, {0.5});
  ASSERT_EQ(s.violations.size(), 1u);
  EXPECT_EQ(s.violations[0].center, cplx(1.0, 0));
  EXPECT_FALSE(s.cell(1, 0).certificate.has_value());
  EXPECT_FALSE(s.cell(1, 0).error.empty());
  EXPECT_TRUE(s.cell(0, 0).certificate.has_value());
}

TEST(MeanValue, SpecExamples) {
  const auto abs2 = planar("radial:abs2");
  const auto r1 = mean_value_check(abs2, mep_check(abs2, 0, 1, 16));
  EXPECT_NEAR(r1.area_mean, 0.5, 1e-12);
  EXPECT_NEAR(r1.value_at_center, 0.0, 1e-15);
  EXPECT_GE(r1.mean_value_slack, 0);
  const auto flat = constant_weight(0);
  const auto r2 = mean_value_check(flat, mep_check(flat, 0, 1, 8));
  EXPECT_NEAR(r2.bound_slack, 0, 1e-12);
  EXPECT_NEAR(r2.jensen_slack, 0, 1e-12);
  EXPECT_NEAR(r2.submean_slack, 0, 1e-12);
  EXPECT_NEAR(r2.mean_value_slack, 0, 1e-12);
  const PlanarWeight re{"re", [](cplx z) { return z.real(); }, ConvexFlag::convex, std::nullopt, std::nullopt};
  const auto r3 = mean_value_check(re, mep_check(re, 0, 1, 16));
  EXPECT_NEAR(r3.area_mean, 0, 1e-12);
  EXPECT_NEAR(r3.mean_value_slack, 0, 1e-12);
}

TEST(MeanValue, ChainHoldsOnPassingCells) {
  const auto abs2 = planar("radial:abs2");
  for (cplx a : {cplx(0, 0), cplx(0.5, -0.5), cplx(1, 1)}) {
    for (double r : {0.25, 1.0}) {
      const auto rep = mean_value_check(abs2, mep_check(abs2, a, r, 16));
      EXPECT_GE(rep.bound_slack, -kJensenTolerance);
      EXPECT_GE(rep.jensen_slack, -kJensenTolerance);
      EXPECT_GE(rep.submean_slack, -kJensenTolerance);
      EXPECT_NEAR(rep.mean_value_slack, r * r / 2, 1e-10);
    }
  }
}

TEST(MeanValue, RejectsFailAndInconsistentInputs) {
  const auto bad = planar("radial:minus-abs2");
  EXPECT_THROW(mean_value_check(bad, mep_check(bad, 0, 1, 8)), ArgumentError);
  // certificate computed for another weight: the bound step no longer holds
  const auto flat_cert = mep_check(constant_weight(0), 0, 1, 8);
  EXPECT_THROW(mean_value_check(bad, flat_cert), ConsistencyError);
}

TEST(Tube, SpecExamples) {
  const auto box = tube_certificate(by_id("t2-plus-x2-box"), 0, 1, 16);
  EXPECT_NEAR(box.bound, pi * std::sqrt(pi) * std::erf(1.0), 1e-9);
  EXPECT_NEAR(box.bound, pi * 1.4936482656, 1e-9);
  EXPECT_EQ(box.verdict, ExtensionVerdict::pass);
  const auto flat = tube_certificate(by_id("x2"), {0.4, 0.2}, 0.5, 16);
  EXPECT_NEAR(flat.minimal_norm, flat.bound, 1e-8 * flat.bound);
  const auto cg = tube_certificate(by_id("coupled-gaussian"), 0, 0.5, 16);
  EXPECT_EQ(cg.verdict, ExtensionVerdict::pass);
}

TEST(Tube, ReductionIsExact) {
  const auto spec = by_id("coupled-gaussian");
  const auto a = tube_certificate(spec, {0.2, 0.3}, 0.5, 8);
  const auto b = mep_check(marginal_lift(spec), {0.2, 0.3}, 0.5, 8);
  EXPECT_EQ(a.minimal_norm, b.minimal_norm);
  EXPECT_EQ(a.bound, b.bound);
}

TEST(Tube, CertificatesAreSound) {
  for (const auto& id : {"t2-plus-x2-box", "coupled-gaussian"}) {
    const auto lift = marginal_lift(by_id(id));
    const auto c = mep_check(lift, {0.1, 0}, 0.5, 8, {24, 48});
    ASSERT_EQ(c.verdict, ExtensionVerdict::pass);
    EXPECT_NEAR(reintegrate_norm(lift, c, DiskRule(c.center, c.radius, 24, 48)), c.minimal_norm,
                1e-8 * c.minimal_norm)
        << id;
  }
}

TEST(Tube, NonconvexMarginalsBreakMinimalExtension) {
  const auto f1 = tube_certificate(by_id("minus-t2-plus-x2"), 0, 1, 16, {}, {24, 48});
  EXPECT_EQ(f1.verdict, ExtensionVerdict::fail_at_truncation);
  // Phi = log(1 + t^2)/2 is concave for |t| > 1
  const auto f2 = tube_certificate(by_id("x2-times-1-plus-t2"), 2.0, 1.0, 16, {}, {24, 48});
  EXPECT_EQ(f2.verdict, ExtensionVerdict::fail_at_truncation);
}
