#include <cmath>

#include <gtest/gtest.h>

#include "bcsgap/constants.hpp"
#include "bcsgap/scattering.hpp"
#include "support.hpp"

using namespace bcsgap;

namespace {

// depth at which ||V||_{3/2} reaches the Sobolev constant, for sigma = 1
double lambda_max(Family f) { return sobolev_constant / make_potential(f, 1.0, 1.0).norms().l32; }

// smallest depth in [lo, hi] where pred switches from false to true
template <class Pred>
double threshold(double lo, double hi, Pred pred) {
  for (int k = 0; k < 40; ++k) {
    const double mid = 0.5 * (lo + hi);
    (pred(mid) ? hi : lo) = mid;
  }
  return 0.5 * (lo + hi);
}

}  // namespace

TEST(BsMatrix, ZeroPotential) {
  const RadiusGrid g = make_radius_grid(5.0, 64);
  EXPECT_EQ(bs_matrix(Potential::zero(), g).cwiseAbs().maxCoeff(), 0.0);
  EXPECT_EQ(scattering_length(Potential::zero()), 0.0);
  EXPECT_EQ(scattering_length_ode(Potential::zero()), 0.0);
  EXPECT_EQ(born_term(Potential::zero()), 0.0);
}

TEST(BsMatrix, AttractiveEntriesNonPositive) {
  for (Family f : {Family::Gaussian, Family::Exponential, Family::SquareWell}) {
    const Potential pot = make_potential(f, 1.0, 1.0);
    const Eigen::MatrixXd b = bs_matrix(pot, make_radius_grid(scattering_radius(pot), 128));
    EXPECT_LE(b.maxCoeff(), 0.0) << family_name(f);
    EXPECT_LT((b - b.transpose()).cwiseAbs().maxCoeff(), 1e-15);
  }
}

TEST(BsMatrix, GaussianSpectrumAboveMinusOne) {
  EXPECT_GT(lowest_bs_eigenvalue(make_potential(Family::Gaussian, 1.0, 1.0)), -1.0);
}

TEST(ScatteringLength, SquareWellAnalytic) {
  const Potential sw = make_potential(Family::SquareWell, 1.0, 1.0);
  EXPECT_NEAR(scattering_length(sw), oracle::squarewell_a, 1e-8);
  EXPECT_NEAR(scattering_length_ode(sw), oracle::squarewell_a, 1e-8);
  for (double v0 : {0.3, 1.7, 2.2})
    for (double r : {0.5, 1.0, 2.0}) {
      const double k = std::sqrt(v0);
      if (k * r >= pi / 2) continue;
      const double exact = r - std::tan(k * r) / k;
      const Potential p = make_potential(Family::SquareWell, v0, r);
      EXPECT_NEAR(scattering_length(p), exact, 1e-8 * std::max(std::abs(exact), r)) << p.to_string();
    }
}

TEST(ScatteringLength, FrozenCatalogValues) {
  EXPECT_NEAR(scattering_length(make_potential(Family::Gaussian, 1.0, 1.0)), oracle::gaussian_a, 1e-8);
  EXPECT_NEAR(scattering_length(make_potential(Family::Exponential, 1.0, 1.0)), oracle::exponential_a, 1e-8);
}

TEST(ScatteringLength, OracleEquivalenceAcrossDepths) {
  // the exponential well binds at lambda = 1.4458, just above its lambda_max; stay at 0.95
  for (Family f : {Family::Gaussian, Family::Exponential, Family::SquareWell})
    for (double c : {0.1, 0.5, 0.95}) {
      const Potential pot = make_potential(f, c * lambda_max(f), 1.0);
      ScatteringGridMeta meta;
      const double a_bs = scattering_length(pot, &meta);
      const double a_ode = scattering_length_ode(pot);
      EXPECT_LE(std::abs(a_bs - a_ode), 1e-6 * std::max(std::abs(a_bs), pot.range())) << pot.to_string();
      EXPECT_GE(meta.levels, 3u);
      EXPECT_LT(a_bs, 0.0);
    }
}

TEST(ScatteringLength, OracleEquivalenceRandom) {
  gen::Source src(41);
  for (int k = 0; k < 10; ++k) {
    const Family f = src.family();
    const double sigma = src.log_uniform(0.3, 3.0);
    const Potential pot = make_potential(f, src.uniform(0.05, 0.9) * lambda_max(f) / (sigma * sigma), sigma);
    const double a_bs = scattering_length(pot), a_ode = scattering_length_ode(pot);
    EXPECT_LE(std::abs(a_bs - a_ode), 1e-6 * std::max(std::abs(a_bs), pot.range())) << pot.to_string();
  }
}

TEST(ScatteringLength, LengthScaling) {
  // a(lambda / s^2, s sigma) = s a(lambda, sigma)
  const double a1 = scattering_length(make_potential(Family::Gaussian, 0.8, 1.0));
  const double a2 = scattering_length(make_potential(Family::Gaussian, 0.8 / 4.0, 2.0));
  EXPECT_NEAR(a2, 2.0 * a1, 1e-8 * std::abs(a2));
}

TEST(ScatteringLength, GaussianWeakCouplingSlope) {
  const Potential g = make_potential(Family::Gaussian, 1e-3, 1.0);
  EXPECT_NEAR(scattering_length_ode(g) / 1e-3, oracle::gaussian_born, 2e-3);
  EXPECT_NEAR(scattering_length(g) / 1e-3, oracle::gaussian_born, 2e-3);
}

TEST(ScatteringLength, SecondBornTermFinite) {
  // (a(lambda V) - lambda a_born) / lambda^2 -> const, with Richardson in lambda
  for (Family f : {Family::Gaussian, Family::Exponential}) {
    auto c = [&](double lam) {
      const Potential p = make_potential(f, lam, 1.0);
      return (scattering_length(p, nullptr, 1e-13) - born_term(p)) / (lam * lam);
    };
    const double c2 = c(1e-2), c3 = c(1e-3);
    const double limit = c3 + (c3 - c2) / 9.0;
    EXPECT_TRUE(std::isfinite(limit));
    EXPECT_LT(limit, 0.0) << family_name(f);  // higher orders reinforce attraction
    EXPECT_LT(std::abs(c3 - c2), 0.05 * std::abs(limit)) << family_name(f);
  }
}

TEST(BornTerm, ClosedForms) {
  EXPECT_NEAR(born_term(make_potential(Family::Gaussian, 1.0, 1.0)), oracle::gaussian_born, 1e-13);
  EXPECT_NEAR(born_term(make_potential(Family::SquareWell, 1.0, 1.0)), -1.0 / 3.0, 1e-14);
  EXPECT_NEAR(born_term(make_potential(Family::Exponential, 1.0, 1.0)), -2.0, 1e-13);
}

TEST(BornTerm, BelowFullScatteringLength) {
  for (Family f : {Family::Gaussian, Family::Exponential, Family::SquareWell}) {
    const ScatteringResult r = scatter(make_potential(f, 1.0, 1.0));
    EXPECT_LT(std::abs(r.a_born), std::abs(r.a_bs)) << family_name(f);
    EXPECT_LE(std::abs(r.a_bs - r.a_ode), 1e-6 * std::max(std::abs(r.a_bs), 1.0));
    EXPECT_GT(r.lowest_bs_eigenvalue, -1.0);
  }
}

TEST(Spectrum, CrossingMatchesOdeBoundState) {
  for (Family f : {Family::Gaussian, Family::Exponential, Family::SquareWell}) {
    const double lam_bs = threshold(0.5, 8.0, [&](double lam) {
      return lowest_bs_eigenvalue(make_potential(f, lam, 1.0)) < -1.0;
    });
    const double lam_ode = threshold(0.5, 8.0, [&](double lam) {
      return zero_energy_nodes(make_potential(f, lam, 1.0)) >= 1;
    });
    EXPECT_NEAR(lam_bs, lam_ode, 0.01 * lam_ode) << family_name(f);
    if (f == Family::SquareWell) {
      EXPECT_NEAR(lam_ode, pi * pi / 4.0, 1e-3);
    }
  }
}

TEST(Spectrum, AdmissibleDepthsStayAboveMinusOne) {
  gen::Source src(43);
  for (int k = 0; k < 10; ++k) {
    const Family f = src.family();
    const double sigma = src.log_uniform(0.5, 2.0);
    const Potential pot = make_potential(f, src.uniform(0.01, 0.99) * lambda_max(f) / (sigma * sigma), sigma);
    EXPECT_GT(lowest_bs_eigenvalue(pot), -1.0) << pot.to_string();
  }
}

TEST(ZeroEnergy, NodeCountForSquareWell) {
  EXPECT_EQ(zero_energy_nodes(make_potential(Family::SquareWell, 1.0, 1.0)), 0u);
  EXPECT_EQ(zero_energy_nodes(make_potential(Family::SquareWell, 4.0, 1.0)), 1u);
  EXPECT_EQ(zero_energy_nodes(make_potential(Family::SquareWell, 30.0, 1.0)), 2u);
}

TEST(RadiusGrid, Layout) {
  const RadiusGrid g = make_radius_grid(2.0, 8);
  ASSERT_EQ(g.size(), 8u);
  EXPECT_DOUBLE_EQ(g.nodes.front(), 0.25);
  EXPECT_DOUBLE_EQ(g.nodes.back(), 2.0);
  EXPECT_DOUBLE_EQ(g.weights.back(), 0.125);
  EXPECT_THROW(make_radius_grid(0.0, 8), InvalidArgument);
  EXPECT_THROW(make_radius_grid(1.0, 1), InvalidArgument);
}
