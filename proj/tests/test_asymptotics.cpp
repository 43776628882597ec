#include <cmath>

#include <gtest/gtest.h>

#include "bcsgap/asymptotics.hpp"
#include "support.hpp"

using namespace bcsgap;

namespace {

const Potential& gauss() {
  static const Potential p = make_potential(Family::Gaussian, 1.0, 1.0);
  return p;
}

DeltaProfile constant(double c) {
  return [c](double) { return c; };
}

}  // namespace

TEST(MSplit, ConstantGapMiddleIntegral) {
  for (double x : {1e-1, 1e-3, 1e-6}) {
    const MSplitParts parts = m_mu_split_parts(1.0, constant(x), 40.0);
    EXPECT_NEAR(parts.middle, 2.0 * std::asinh(1.0 / x), 1e-10 * parts.middle) << x;
    EXPECT_NEAR(parts.prefactor, 1.0 / (4.0 * pi * pi), 1e-16);
  }
}

TEST(MSplit, ConstantGapApproachesClosedForm) {
  const double mu = 1.0, x = 1e-4;
  const double split = m_mu_split(mu, constant(x * mu), 200.0);
  EXPECT_NEAR(split, m_mu_closed(mu, x * mu), 0.01 * split);
}

TEST(MSplit, AgreesWithDirectQuadratureSynthetic) {
  gen::Source src(71);
  for (int k = 0; k < 6; ++k) {
    const double mu = src.log_uniform(1e-3, 1.0);
    const double x = src.log_uniform(1e-8, 1e-1);
    const double w = src.uniform(0.5, 2.0);
    const DeltaProfile d = [=](double p) { return x * mu * std::exp(-w * p * p); };
    const double split = m_mu_split(mu, d, 40.0);
    const RadialGrid g = build_grid(mu, GridParams{std::max(1e-12, x * 1e-2), 40.0, 32, 192, 64});
    const double direct = m_mu_direct(mu, d, g);
    EXPECT_NEAR(split, direct, 1e-8 * std::abs(split)) << "mu=" << mu << " x=" << x;
  }
}

TEST(MSplit, AgreesWithDirectOnSolutions) {
  for (double mu : {0.2, 0.04}) {
    const GapSolution s = solve_gap(gauss(), mu);
    const double split = m_mu_split(s), direct = m_mu_direct(s);
    EXPECT_NEAR(split, direct, 1e-6 * split) << mu;
    EXPECT_GT(split, 0.0);
    const AsymptoticsReport r = asymptotics_report(s);
    EXPECT_EQ(r.m_mu, split);
    EXPECT_DOUBLE_EQ(r.m_pred, -1.0 / (4.0 * pi * s.scattering_length));
    EXPECT_NEAR(r.m_pred, -1.0 / (4.0 * pi * oracle::gaussian_a), 1e-12);
  }
}

TEST(MSplit, ApproachesScatteringLimit) {
  const GapSolution s = solve_gap(gauss(), 0.04);
  const double target = -1.0 / (4.0 * pi * s.scattering_length);
  EXPECT_NEAR(m_mu_split(s), target, 0.25 * target);
}

TEST(MSplit, RejectsDegenerateInput) {
  EXPECT_THROW(m_mu_split(0.0, constant(1e-3), 40.0), InvalidArgument);
  EXPECT_THROW(m_mu_split(1.0, constant(0.0), 40.0), InvalidArgument);
  EXPECT_THROW(m_mu_split(1.0, constant(1e-3), 1.2), InvalidArgument);
  const RadialGrid g = build_grid(1.0, GridParams{1e-4, 40.0, 16, 96, 32});
  EXPECT_THROW(m_mu_direct(1.0, constant(-1e-3), g), InvalidArgument);
}

TEST(MSplit, PositiveForRandomProfiles) {
  gen::Source src(73);
  for (int k = 0; k < 10; ++k) {
    const double mu = src.log_uniform(1e-4, 1.0), x = src.log_uniform(1e-10, 1.0);
    EXPECT_GT(m_mu_split(mu, constant(x * mu), 50.0), 0.0);
  }
}

TEST(Predictions, Identities) {
  const double mu = 0.01, a = -1.0;
  const Predictions p = predictions(mu, a);
  EXPECT_NEAR(p.xi_pred / p.tc_pred, oracle::universal_ratio, 1e-13);
  EXPECT_NEAR(p.xi_pred, oracle::gap_prefactor * mu * std::exp(-5.0 * pi), 1e-14 * p.xi_pred);
  EXPECT_NEAR(diagnostic_D(mu, p.xi_pred, a), oracle::gap_constant, 1e-12);
  EXPECT_NEAR(diagnostic_D(mu, mu, a), -5.0 * pi, 1e-12);
  EXPECT_NEAR(p.m_pred, 1.0 / (4.0 * pi), 1e-16);
  EXPECT_EQ(p.D_target, gap_constant_target);
  EXPECT_EQ(p.ratio_target, universal_ratio);
}

TEST(Predictions, DiagnosticRecoversConstantRandom) {
  gen::Source src(79);
  for (int k = 0; k < 20; ++k) {
    const double mu = src.log_uniform(1e-4, 1.0), a = -src.log_uniform(0.5, 50.0);
    const Predictions p = predictions(mu, a);
    if (!(p.xi_pred > 0.0)) continue;
    EXPECT_NEAR(diagnostic_D(mu, p.xi_pred, a), gap_constant_target, 1e-9);
  }
}

TEST(Predictions, RejectsInvalidInput) {
  EXPECT_THROW(predictions(0.1, 0.0), InvalidArgument);
  EXPECT_THROW(predictions(0.1, 1.0), InvalidArgument);
  EXPECT_THROW(predictions(0.0, -1.0), InvalidArgument);
  EXPECT_THROW(diagnostic_D(0.1, 0.0, -1.0), InvalidArgument);
}

TEST(Diagnostics, EulerDefectDecreasesWithDensity) {
  double prev = std::numeric_limits<double>::infinity();
  for (double mu : {0.3, 0.1, 0.03}) {
    const GapSolution s = solve_gap(gauss(), mu);
    const double defect = std::abs(diagnostic_D(mu, s.xi, s.scattering_length) - gap_constant_target);
    EXPECT_LT(defect, prev) << mu;
    prev = defect;
  }
}

TEST(HsNorm, SincHelper) {
  EXPECT_EQ(detail::sinc_minus_one(0.0), 0.0);
  EXPECT_NEAR(detail::sinc_minus_one(1e-4), -1e-8 / 6.0 + 1e-16 / 120.0, 1e-24);
  EXPECT_NEAR(detail::sinc_minus_one(2.0), std::sin(2.0) / 2.0 - 1.0, 1e-15);
}

TEST(HsNorm, FiniteForConstantGap) {
  const double mu = 1.0, c = 1e-2;
  const GridParams params{1e-4, 40.0, 16, 96, 32};
  const double m = m_mu_split(mu, constant(c), params.p_max);
  const HsDiagnostic hs = a_hs_norm(gauss(), mu, constant(c), params, m);
  EXPECT_TRUE(std::isfinite(hs.ratio));
  EXPECT_GT(hs.norm, 0.0);
  EXPECT_GT(hs.outer_nodes, 0u);
  EXPECT_EQ(a_hs_norm(Potential::zero(), mu, constant(c), params, m).norm, 0.0);
}

TEST(HsNorm, RatioShrinksAtLowDensity) {
  double prev = std::numeric_limits<double>::infinity();
  for (double mu : {0.1, 0.03}) {
    const GapSolution s = solve_gap(gauss(), mu);
    const HsDiagnostic hs = a_hs_norm(s);
    EXPECT_LT(hs.ratio, prev) << mu;
    prev = hs.ratio;
  }
}
