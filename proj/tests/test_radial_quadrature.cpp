#include <algorithm>
#include <cmath>
#include <sstream>

#include <gtest/gtest.h>
#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "bcsgap/gauss_legendre.hpp"
#include "bcsgap/radial_quadrature.hpp"
#include "support.hpp"

using namespace bcsgap;

namespace {

double gaussian_moment(const RadialGrid& g) {
  double s = 0.0;
  for (std::size_t i = 0; i < g.size(); ++i) s += g.weights[i] * g.nodes[i] * g.nodes[i] * std::exp(-g.nodes[i] * g.nodes[i]);
  return s;
}

// \int k(p, q) f(q) q^2 dq on the grid
template <class F>
double apply_kernel(const Potential& pot, const RadialGrid& g, double p, F f) {
  double s = 0.0;
  for (std::size_t j = 0; j < g.size(); ++j)
    s += angular_kernel(pot, p, g.nodes[j]) * f(g.nodes[j]) * g.weights[j] * g.nodes[j] * g.nodes[j];
  return s;
}

}  // namespace

TEST(GaussLegendre, ReferenceRuleIntegratesPolynomials) {
  const auto& r = reference_rule();
  for (int k = 0; k < 2 * static_cast<int>(panel_order); k += 3) {
    double s = 0.0;
    for (std::size_t i = 0; i < r.x.size(); ++i) s += r.w[i] * std::pow(r.x[i], k);
    EXPECT_NEAR(s, k % 2 ? 0.0 : 2.0 / (k + 1), 1e-14) << k;
  }
}

TEST(RadialGrid, ConstructionContract) {
  const RadialGrid g = build_grid(1.0, GridParams{1e-6, 40.0, 64, 64, 64});
  std::size_t close = 0;
  for (double p : g.nodes) close += std::abs(p * p - 1.0) < 1e-5;
  EXPECT_GE(close, 64u);
  for (std::size_t i = 0; i < g.size(); ++i) {
    EXPECT_GT(g.weights[i], 0.0);
    EXPECT_GT(g.nodes[i], 0.0);
    if (i) {
      EXPECT_GT(g.nodes[i], g.nodes[i - 1]);
    }
  }
  EXPECT_LE(g.nodes.back(), 40.0);
}

TEST(RadialGrid, InnerNodeCountInvariant) {
  gen::Source src(3);
  for (int k = 0; k < 10; ++k) {
    const double mu = src.log_uniform(1e-6, 1.0);
    const double inner = src.log_uniform(1e-12, 1e-2);
    const GridParams params{inner, 40.0, 16 * static_cast<std::size_t>(src.integer(1, 3)), 96, 32};
    const RadialGrid g = build_grid(mu, params);
    std::size_t close = 0;
    for (double xi : g.xi) close += std::abs(xi) < 10.0 * inner * mu;
    EXPECT_GE(close, params.n_inner) << "mu=" << mu << " inner=" << inner;
    for (std::size_t i = 1; i < g.size(); ++i) ASSERT_GT(g.nodes[i], g.nodes[i - 1]);
  }
}

TEST(RadialGrid, XiStoredAccurately) {
  const RadialGrid g = build_grid(0.01, GridParams{1e-10, 40.0, 16, 96, 32});
  for (std::size_t i = 0; i < g.size(); ++i) {
    const double direct = g.nodes[i] * g.nodes[i] - 0.01;
    // the stored value is exact; the recomputed one loses digits near the Fermi surface
    EXPECT_NEAR(g.xi[i], direct, 4e-17 + 1e-14 * std::abs(direct));
  }
}

TEST(RadialGrid, GaussianMoment) {
  for (double mu : {1.0, 0.3, 0.01, 1e-5})
    for (double inner : {1e-2, 1e-6, 1e-12}) {
      const RadialGrid g = build_grid(mu, GridParams{inner, 40.0, 16, 96, 32});
      EXPECT_NEAR(gaussian_moment(g), oracle::gaussian_moment, 1e-9 * oracle::gaussian_moment)
          << "mu=" << mu << " inner=" << inner;
    }
}

TEST(RadialGrid, DoublingChangesIntegralsBelowErrorBar) {
  for (double mu : {0.3, 1e-4}) {
    const GridParams params{1e-8, 40.0, 16, 96, 32};
    const double coarse = gaussian_moment(build_grid(mu, params));
    const double fine = gaussian_moment(build_grid(mu, params.doubled()));
    EXPECT_LT(std::abs(fine - coarse), 1e-7 * fine);
    // 1/|p^2 - mu|^{1/2}-type integrand resolved by the log clustering
    auto f = [&](const RadialGrid& g) {
      double s = 0.0;
      for (std::size_t i = 0; i < g.size(); ++i) s += g.weights[i] * std::exp(-g.nodes[i]) / std::sqrt(std::abs(g.xi[i]) + 1e-8 * mu);
      return s;
    };
    const double c = f(build_grid(mu, params)), d = f(build_grid(mu, params.doubled()));
    EXPECT_LT(std::abs(c - d), 1e-7 * std::abs(d)) << mu;
  }
}

TEST(RadialGrid, ClusteredAtFermiMomentum) {
  const RadialGrid g = build_grid(0.01, GridParams{1e-6, 40.0, 16, 96, 32});
  std::size_t best = 1;
  for (std::size_t i = 1; i < g.size(); ++i)
    if (g.nodes[i] - g.nodes[i - 1] < g.nodes[best] - g.nodes[best - 1]) best = i;
  EXPECT_NEAR(g.nodes[best], 0.1, 1e-6);
}

TEST(RadialGrid, RejectsBadParameters) {
  EXPECT_THROW(build_grid(0.0, GridParams{}), InvalidArgument);
  EXPECT_THROW(build_grid(1.0, GridParams{0.0, 40.0, 16, 96, 32}), InvalidArgument);
  EXPECT_THROW(build_grid(1.0, GridParams{2.0, 40.0, 16, 96, 32}), InvalidArgument);
  EXPECT_THROW(build_grid(1.0, GridParams{1e-6, 1.5, 16, 96, 32}), InvalidArgument);
  EXPECT_THROW(build_grid(1.0, GridParams{1e-6, 40.0, 0, 96, 32}), InvalidArgument);
}

TEST(RadialGrid, CsvDump) {
  const RadialGrid g = build_grid(0.5, GridParams{1e-3, 10.0, 16, 16, 16});
  std::ostringstream os;
  write_grid_csv(os, g);
  const std::string s = os.str();
  EXPECT_EQ(s.rfind("node,weight,tag\n", 0), 0u);
  EXPECT_EQ(static_cast<std::size_t>(std::count(s.begin(), s.end(), '\n')), g.size() + 1);
  EXPECT_NE(s.find("inner"), std::string::npos);
  EXPECT_NE(s.find("tail"), std::string::npos);
}

TEST(AngularKernel, GaussianOrigin) {
  const Potential g = make_potential(Family::Gaussian, 1.0, 1.0);
  EXPECT_NEAR(angular_kernel(g, 0.0, 0.0), oracle::k00_gaussian, 1e-15);
  EXPECT_NEAR(angular_kernel(g, 0.7, 0.0), fourier_norm * 4.0 * pi * g.vhat(0.7), 1e-15);
  EXPECT_NEAR(angular_kernel(g, 1e-9, 0.7), fourier_norm * 4.0 * pi * g.vhat(0.7), 1e-9);
}

TEST(AngularKernel, MatchesAngularAverage) {
  const Potential g = make_potential(Family::Gaussian, 1.0, 1.0);
  auto f = [&](double u) { return g.vhat(std::sqrt(2.0 - 2.0 * u)); };
  const double avg = fourier_norm * 2.0 * pi *
                     boost::math::quadrature::gauss_kronrod<double, 61>::integrate(f, -1.0, 1.0, 10, 1e-15);
  EXPECT_NEAR(angular_kernel(g, 1.0, 1.0), avg, 1e-13);
}

TEST(AngularKernel, ClosedFormsMatchQuadrature) {
  gen::Source src(23);
  for (int k = 0; k < 40; ++k) {
    const Potential pot = src.potential(false);
    const double p = src.log_uniform(1e-3, 20.0) / pot.range(), q = src.log_uniform(1e-3, 20.0) / pot.range();
    const double closed = angular_kernel(pot, p, q), quad = angular_kernel_quadrature(pot, p, q);
    EXPECT_NEAR(closed, quad, 1e-9 * std::abs(quad) + 1e-300) << pot.to_string() << " " << p << " " << q;
  }
}

TEST(AngularKernel, SymmetryAndSign) {
  gen::Source src(29);
  for (int k = 0; k < 200; ++k) {
    const Potential pot = src.potential();
    const double p = src.log_uniform(1e-3, 30.0), q = src.log_uniform(1e-3, 30.0);
    const double kpq = angular_kernel(pot, p, q), kqp = angular_kernel(pot, q, p);
    EXPECT_NEAR(kpq, kqp, 1e-13 * std::abs(kpq)) << pot.to_string();
    if (pot.vhat_sign_definite()) {
      EXPECT_LE(kpq, 0.0) << pot.to_string();
    }
  }
}

TEST(KernelMatrix, SymmetricAndNonPositive) {
  const RadialGrid g = build_grid(0.2, GridParams{1e-4, 40.0, 16, 48, 16});
  for (Family f : {Family::Gaussian, Family::Exponential}) {
    const Eigen::MatrixXd k = kernel_matrix(make_potential(f, 1.0, 1.0), g);
    EXPECT_EQ((k - k.transpose()).cwiseAbs().maxCoeff(), 0.0);
    EXPECT_LE(k.maxCoeff(), 0.0);
  }
}

TEST(KernelMatrix, ConvolutionOfConstant) {
  // (2pi)^{-3/2} (Vhat * 1)(p) = V(0) for every p
  const Potential g = make_potential(Family::Gaussian, 1.0, 1.0);
  const RadialGrid grid = build_grid(0.1, GridParams{1e-6, 40.0, 16, 96, 32});
  const Eigen::MatrixXd k = kernel_matrix(g, grid);
  Eigen::VectorXd v(grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i) v[i] = std::sqrt(grid.weights[i]) * grid.nodes[i];
  const Eigen::VectorXd kv = k * v;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    if (grid.nodes[i] > 5.0) break;
    EXPECT_NEAR(kv[i] / v[i], g.v(0.0), 1e-10) << grid.nodes[i];
  }
  // and against a 1D quadrature at p near 0
  const double p0 = grid.nodes.front();
  auto f = [&](double q) { return angular_kernel(g, p0, q) * q * q; };
  const double direct = boost::math::quadrature::gauss_kronrod<double, 61>::integrate(f, 0.0, 40.0, 15, 1e-14);
  EXPECT_NEAR(kv[0] / v[0], direct, 1e-10);
}

TEST(KernelMatrix, RefinementSelfConvergence) {
  for (Family fam : {Family::Gaussian, Family::Exponential}) {
    const Potential pot = make_potential(fam, 1.0, 1.0);
    const GridParams params{1e-6, pot.default_p_max(), 16, 96, 32};
    const RadialGrid g1 = build_grid(0.1, params), g2 = build_grid(0.1, params.doubled());
    auto f = [](double q) { return std::exp(-q * q) * (1.0 + q); };
    for (double p : {0.05, 0.3162, 1.0, 4.0}) {
      const double a = apply_kernel(pot, g1, p, f), b = apply_kernel(pot, g2, p, f);
      EXPECT_LT(std::abs(a - b), 1e-6 * std::abs(b)) << family_name(fam) << " p=" << p;
    }
  }
}
