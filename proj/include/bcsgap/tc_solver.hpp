#pragma once

// Critical temperature from the linearized gap equation: T_c is the
// temperature where the lowest eigenvalue of K_T + (2pi)^{-3/2} Vhat *, with
// K_T(p) = (p^2 - mu)/tanh((p^2 - mu)/(2T)), crosses zero.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <utility>
#include <vector>

#include <Eigen/Dense>
#include <boost/math/tools/toms748_solve.hpp>

#include "bcsgap/asymptotics.hpp"
#include "bcsgap/constants.hpp"
#include "bcsgap/errors.hpp"
#include "bcsgap/radial_quadrature.hpp"
#include "bcsgap/scattering.hpp"

namespace bcsgap {

/// K_T as a function of xi = p^2 - mu; 2T where |xi| < 1e-8 T.
inline double kt_of_xi(double xi, double t) {
  if (std::abs(xi) < 1e-8 * t) return 2.0 * t;
  return xi / std::tanh(xi / (2.0 * t));
}

inline double kt_dispersion(double p, double mu, double t) {
  if (!(t > 0.0)) throw InvalidArgument("kt_dispersion requires T > 0");
  return kt_of_xi(p * p - mu, t);
}

namespace detail {

struct TopEigen {
  double value = 0.0;
  Eigen::VectorXd vector;
};

/// Largest eigenpair of the positive semidefinite matrix m by power iteration,
/// warm-started from guess; falls back to a dense eigensolve if it stalls.
inline TopEigen top_eigenpair(const Eigen::MatrixXd& m, const Eigen::VectorXd& guess) {
  Eigen::VectorXd v = guess.size() == m.rows() && guess.norm() > 0.0 ? guess.normalized()
                                                                      : Eigen::VectorXd::Ones(m.rows()).normalized();
  double value = 0.0;
  for (int it = 0; it < 4000; ++it) {
    const Eigen::VectorXd w = m * v;
    const double rq = v.dot(w);
    const double res = (w - rq * v).norm();
    if (rq > 0.0 && res <= 1e-11 * rq) return {rq, v};
    const double nrm = w.norm();
    if (!(nrm > 0.0)) return {0.0, v};
    v = w / nrm;
    value = rq;
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(m);
  if (es.info() != Eigen::Success) throw NumericError("eigensolver failed", value);
  const Eigen::Index last = m.rows() - 1;
  return {es.eigenvalues()[last], es.eigenvectors().col(last)};
}

}  // namespace detail

/// Lowest eigenvalue of diag(d) + k for k negative semidefinite.  For lambda
/// below min d it solves s(lambda) = 1, where s is the top eigenvalue of
/// -(d - lambda)^{-1/2} k (d - lambda)^{-1/2}; s' = s <v, (d - lambda)^{-1} v>.
class LinearizedOperator {
 public:
  LinearizedOperator(const Eigen::MatrixXd& k, Eigen::VectorXd d) : k_(k), d_(std::move(d)) {}

  double lowest_eigenvalue() {
    const double dmin = d_.minCoeff();
    const double knorm = k_.norm();
    if (knorm == 0.0) return dmin;
    double lo = dmin - knorm;  // s(lo) <= 1
    double hi = dmin;          // s(hi) >= 1, or lambda_min = dmin
    double lam = std::clamp(0.0, lo, dmin - 1e-3 * (dmin - lo));
    // min d = 2T sets the scale of lambda near the crossing
    const double width_tol = 1e-15 * dmin;
    for (int step = 0; step < 200; ++step) {
      const auto [s, ds] = secular(lam);
      const double f = 1.0 / s - 1.0;  // decreasing in lambda
      if (f == 0.0) return lam;
      if (f > 0.0) lo = lam; else hi = lam;
      const double fp = -ds / (s * s);
      double next = lam - f / fp;
      if (!(next > lo && next < hi) || !std::isfinite(next)) next = 0.5 * (lo + hi);
      const double move = std::abs(next - lam);
      if (move <= width_tol || hi - lo <= width_tol || (step >= 50 && move <= 1e-12 * dmin)) return next;
      lam = next;
    }
    throw NumericError("secular iteration for the lowest eigenvalue did not converge", hi - lo);
  }

 private:
  std::pair<double, double> secular(double lam) {
    const Eigen::VectorXd inv_sqrt = (d_.array() - lam).rsqrt().matrix();
    const Eigen::MatrixXd m = -(inv_sqrt.asDiagonal() * k_ * inv_sqrt.asDiagonal());
    const detail::TopEigen top = detail::top_eigenpair(m, guess_);
    guess_ = top.vector;
    const double quad = (top.vector.array().square() / (d_.array() - lam)).sum();
    return {top.value, top.value * quad};
  }

  const Eigen::MatrixXd& k_;
  Eigen::VectorXd d_;
  Eigen::VectorXd guess_;
};

inline Eigen::VectorXd kt_diagonal(const RadialGrid& g, double t) {
  Eigen::VectorXd d(static_cast<Eigen::Index>(g.size()));
  for (std::size_t i = 0; i < g.size(); ++i) d[static_cast<Eigen::Index>(i)] = kt_of_xi(g.xi[i], t);
  return d;
}

inline double lowest_eigenvalue_linearized(const Eigen::MatrixXd& k, const RadialGrid& g, double t) {
  if (!(t > 0.0)) throw InvalidArgument("temperature must be positive");
  LinearizedOperator op(k, kt_diagonal(g, t));
  return op.lowest_eigenvalue();
}

inline double lowest_eigenvalue_linearized(const Potential& pot, double mu, double t, const RadialGrid& g) {
  (void)mu;
  return lowest_eigenvalue_linearized(kernel_matrix(pot, g), g, t);
}

struct EigenEstimate {
  double value = 0.0;
  double error = 0.0;  // change under doubling every node count
};

inline EigenEstimate lowest_eigenvalue_with_error(const Potential& pot, double mu, double t, const RadialGrid& g) {
  const double base = lowest_eigenvalue_linearized(pot, mu, t, g);
  const RadialGrid g2 = build_grid(mu, g.params.doubled());
  const double fine = lowest_eigenvalue_linearized(pot, mu, t, g2);
  return {base, std::abs(fine - base)};
}

struct TcOptions {
  GridParams grid{0.0, 0.0, 16, 96, 32};  // zero inner_scale / p_max: automatic
  double scattering_length = std::numeric_limits<double>::quiet_NaN();
  double rel_width = 1e-6;  // final bisection bracket, relative to T_c
  std::size_t monotone_samples = 8;
};

struct TcResult {
  double mu = 0.0;
  double tc = 0.0;
  double tc_pred = 0.0;
  std::vector<std::pair<double, double>> lambda_min_trace;  // (T, lambda_min)
  std::pair<double, double> bracket{0.0, 0.0};
  bool converged = false;
  bool monotone = false;
  std::size_t evaluations = 0;
  GridParams grid;
};

/// Grid for the T_c search: resolves a shell of width T around the Fermi
/// surface down to T = tc_pred / 2000, the lowest temperature bracketing can reach.
inline GridParams tc_grid_params(const Potential& pot, double mu, double a, const GridParams& requested) {
  GridParams g = requested;
  const double t_low = predictions(mu, a).tc_pred / 2000.0;
  if (!(g.inner_scale > 0.0)) g.inner_scale = std::clamp(t_low / (10.0 * mu), 1e-12, 1e-2);
  if (!(g.p_max > 0.0)) g.p_max = pot.default_p_max();
  return g;
}

inline TcResult critical_temperature(const Potential& pot, double mu, const TcOptions& opts = {}) {
  if (pot.is_zero() || !(pot.vhat(0.0) < 0.0)) throw InvalidArgument("critical_temperature requires Vhat(0) < 0");
  if (!(mu > 0.0) || !std::isfinite(mu)) throw InvalidArgument("critical_temperature requires mu > 0");
  const double a = std::isnan(opts.scattering_length) ? scattering_length(pot) : opts.scattering_length;
  if (!(a < 0.0)) throw InvalidArgument("critical_temperature requires a negative scattering length");
  if (std::sqrt(mu) * std::abs(a) < representable_floor)
    throw RangeError("mu is below the underflow floor sqrt(mu)|a| >= " + std::to_string(representable_floor));

  TcResult res;
  res.mu = mu;
  res.tc_pred = predictions(mu, a).tc_pred;
  res.grid = tc_grid_params(pot, mu, a, opts.grid);
  const RadialGrid g = build_grid(mu, res.grid);
  const Eigen::MatrixXd k = kernel_matrix(pot, g);

  // work in u = ln(T / tc_pred) and the dimensionless lambda_min / T
  auto f = [&](double u) {
    const double t = res.tc_pred * std::exp(u);
    const double lam = lowest_eigenvalue_linearized(k, g, t);
    res.lambda_min_trace.emplace_back(t, lam);
    ++res.evaluations;
    return lam / t;
  };

  double lo = -std::log(20.0), hi = std::log(20.0);
  double flo = f(lo), fhi = f(hi);
  for (int widen = 0; widen < 2 && !(flo < 0.0 && fhi > 0.0); ++widen) {
    if (!(flo < 0.0)) flo = f(lo -= std::log(10.0));
    if (!(fhi > 0.0)) fhi = f(hi += std::log(10.0));
  }
  if (!(flo < 0.0 && fhi > 0.0))
    throw BracketError("lambda_min does not change sign on the widened temperature bracket", res.lambda_min_trace);

  // bisection in ln T down to the requested relative bracket width
  const double ln_tol = std::log1p(opts.rel_width);
  while (hi - lo > ln_tol) {
    const double mid = 0.5 * (lo + hi);
    const double fm = f(mid);
    if (fm == 0.0) {
      lo = hi = mid;
      flo = fhi = 0.0;
      break;
    }
    if (fm < 0.0) {
      lo = mid;
      flo = fm;
    } else {
      hi = mid;
      fhi = fm;
    }
  }
  res.bracket = {res.tc_pred * std::exp(lo), res.tc_pred * std::exp(hi)};
  res.converged = true;

  // root inside the bracket to working precision
  double root = lo;
  if (hi > lo) {
    auto tight = [](double x, double y) {
      return std::abs(x - y) <= 4.0 * std::numeric_limits<double>::epsilon() * std::max(1.0, std::abs(x));
    };
    std::uintmax_t max_iter = 100;
    const auto [ulo, uhi] = boost::math::tools::toms748_solve(f, lo, hi, flo, fhi, tight, max_iter);
    root = 0.5 * (ulo + uhi);
  }
  res.tc = res.tc_pred * std::exp(root);
  const auto [tlo, thi] = res.bracket;

  // lambda_min increasing in T across the bracket (endpoints plus interior samples)
  res.monotone = true;
  double prev = -std::numeric_limits<double>::infinity();
  for (std::size_t j = 0; j <= opts.monotone_samples + 1; ++j) {
    const double t = tlo + (thi - tlo) * static_cast<double>(j) / static_cast<double>(opts.monotone_samples + 1);
    const double lam = lowest_eigenvalue_linearized(k, g, t);
    if (j > 0 && !(lam >= prev)) res.monotone = false;
    prev = lam;
  }
  return res;
}

}  // namespace bcsgap
