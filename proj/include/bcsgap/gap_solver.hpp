#pragma once

// Zero-temperature BCS gap equation for radial Delta,
//
//   Delta(p) = -\int_0^\infty k(p,q) Delta(q)/E(q) q^2 dq,   E = sqrt((p^2-mu)^2 + Delta^2),
//
// solved by damped fixed-point iteration on a Fermi-clustered grid, plus the
// derived quantities Xi = inf E, Delta(sqrt(mu)) and the BCS functional.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <limits>
#include <memory>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "bcsgap/constants.hpp"
#include "bcsgap/errors.hpp"
#include "bcsgap/potentials.hpp"
#include "bcsgap/radial_quadrature.hpp"
#include "bcsgap/scattering.hpp"

namespace bcsgap {

/// A radial gap function p -> Delta(p).
using DeltaProfile = std::function<double(double)>;

/// Nystrom extension of a discrete solution: evaluates the right-hand side of
/// the gap equation with the solve-grid quadrature at an arbitrary p.
class NystromProfile {
 public:
  NystromProfile(Potential pot, const std::vector<double>& nodes, const std::vector<double>& weights,
                 const std::vector<double>& delta, const std::vector<double>& dispersion)
      : pot_(std::move(pot)), nodes_(nodes), coef_(nodes.size()) {
    for (std::size_t j = 0; j < nodes.size(); ++j)
      coef_[j] = weights[j] * nodes[j] * nodes[j] * delta[j] / dispersion[j];
  }

  double operator()(double p) const {
    double acc = 0.0;
    for (std::size_t j = 0; j < nodes_.size(); ++j) acc += angular_kernel(pot_, p, nodes_[j]) * coef_[j];
    return -acc;
  }

 private:
  Potential pot_;
  std::vector<double> nodes_;
  std::vector<double> coef_;
};

struct GapOptions {
  double tol = 1e-10;           // bound on the certified residual
  /// Stop once the estimated distance to the fixed point, omega*change/(1-rho),
  /// falls below this; 0 selects min(1e-15, tol * 1e-5).
  double change_tol = 0.0;
  std::size_t max_iter = 200000;
  double damping = 0.5;
  /// Grid node budget; inner_scale <= 0 and p_max <= 0 select automatic values.
  GridParams grid{0.0, 0.0, 16, 96, 32};
  /// Scattering length; NaN means compute it.
  double scattering_length = std::numeric_limits<double>::quiet_NaN();
  bool certify = true;          // evaluate the residual on a doubled grid
  bool extrapolate = true;      // geometric-tail jumps along the slow amplitude mode
};

struct GapSolution {
  double mu = 0.0;
  Potential pot = Potential::zero();
  RadialGrid grid;
  std::vector<double> delta;
  std::vector<double> dispersion;
  double delta_fermi = 0.0;
  double delta_fermi_error = 0.0;
  double xi = 0.0;
  double xi_location = 0.0;  // p* with E(p*) = Xi
  double residual = std::numeric_limits<double>::quiet_NaN();
  double last_change = std::numeric_limits<double>::quiet_NaN();
  std::size_t iterations = 0;
  bool converged = false;
  double scattering_length = std::numeric_limits<double>::quiet_NaN();
  double seed = 0.0;  // xi_0
  std::size_t restarts = 0;
  std::size_t extrapolations = 0;
  DeltaProfile profile;
  std::shared_ptr<const Eigen::MatrixXd> kernel;  // symmetrized kernel matrix on grid
};

/// xi_0 = 8 e^{-2} mu exp(pi / (2 sqrt(mu) a)).
inline double gap_seed(double mu, double a) {
  return gap_prefactor * mu * std::exp(pi / (2.0 * std::sqrt(mu) * a));
}

/// Smallest mu with sqrt(mu)|a| >= pi / (2 ln 1e12).
inline double mu_floor(double a) {
  const double r = representable_floor / std::abs(a);
  return r * r;
}

/// Grid parameters used for a solve at (mu, a): automatic fields are resolved.
inline GridParams resolve_grid_params(const Potential& pot, double mu, double a, const GridParams& requested) {
  GridParams g = requested;
  if (!(g.inner_scale > 0.0)) g.inner_scale = std::clamp(gap_seed(mu, a) / mu * 1e-2, 1e-12, 1e-2);
  if (!(g.p_max > 0.0)) g.p_max = pot.default_p_max();
  return g;
}

namespace detail {

inline std::vector<double> node_scale(const RadialGrid& g) {
  std::vector<double> m(g.size());
  for (std::size_t i = 0; i < g.size(); ++i) m[i] = std::sqrt(g.weights[i]) * g.nodes[i];
  return m;
}

inline std::vector<double> dispersion_of(const RadialGrid& g, const std::vector<double>& delta) {
  std::vector<double> e(g.size());
  for (std::size_t i = 0; i < g.size(); ++i) e[i] = std::hypot(g.xi[i], delta[i]);
  return e;
}

/// G(Delta)_i = -(1/m_i) sum_j K_ij m_j Delta_j/E_j.
inline void apply_gap_map(const Eigen::MatrixXd& k, const std::vector<double>& m, const std::vector<double>& xi,
                          const std::vector<double>& delta, Eigen::VectorXd& work, std::vector<double>& out) {
  const std::size_t n = m.size();
  for (std::size_t j = 0; j < n; ++j) work[j] = m[j] * delta[j] / std::hypot(xi[j], delta[j]);
  const Eigen::VectorXd y = k * work;
  out.resize(n);
  for (std::size_t i = 0; i < n; ++i) out[i] = -y[i] / m[i];
}

inline double sup_abs(const std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) s = std::max(s, std::abs(x));
  return s;
}

}  // namespace detail

/// Delta at p = sqrt(mu) by cubic Lagrange interpolation in s over the four
/// nodes around the Fermi surface; the error estimate is the change under a
/// one-node stencil shift.
inline void interpolate_fermi(GapSolution& sol) {
  const RadialGrid& g = sol.grid;
  std::size_t j = 0;
  while (j < g.size() && g.xi[j] <= 0.0) ++j;
  if (j < 2 || j + 2 > g.size()) throw RangeError("grid does not bracket the Fermi surface");
  auto lagrange = [&](std::size_t first) {
    double acc = 0.0;
    for (std::size_t a = first; a < first + 4; ++a) {
      double l = 1.0;
      for (std::size_t b = first; b < first + 4; ++b)
        if (b != a) l *= (0.0 - g.xi[b]) / (g.xi[a] - g.xi[b]);
      acc += l * sol.delta[a];
    }
    return acc;
  };
  sol.delta_fermi = lagrange(j - 2);
  const std::size_t shifted = (j + 3 <= g.size()) ? j - 1 : j - 3;
  sol.delta_fermi_error = std::abs(lagrange(shifted) - sol.delta_fermi);
}

/// Xi = inf E: the node minimum, refined by a parabola through E^2 in s around
/// the discrete minimizer, and never above the Fermi-surface value Delta(sqrt(mu)).
inline void locate_energy_gap(GapSolution& sol) {
  const RadialGrid& g = sol.grid;
  const auto& e = sol.dispersion;
  const std::size_t i = static_cast<std::size_t>(std::min_element(e.begin(), e.end()) - e.begin());
  double best = e[i];
  double where = g.nodes[i];
  if (i > 0 && i + 1 < g.size()) {
    // E^2 against t = s / h with h the local spacing keeps the fit well scaled
    const double h = std::max(std::abs(g.s(i + 1) - g.s(i)), std::abs(g.s(i) - g.s(i - 1)));
    const double t0 = (g.s(i - 1) - g.s(i)) / h, t2 = (g.s(i + 1) - g.s(i)) / h;
    const double y0 = e[i - 1] * e[i - 1], y1 = e[i] * e[i], y2 = e[i + 1] * e[i + 1];
    // y = y1 + b t + c t^2 through (t0, y0), (0, y1), (t2, y2)
    const double d0 = (y0 - y1) / t0, d2 = (y2 - y1) / t2;
    const double c = (d2 - d0) / (t2 - t0);
    const double b = d0 - c * t0;
    if (c > 0.0) {
      const double t = -b / (2.0 * c);
      const double y = y1 + b * t + c * t * t;
      if (t > t0 && t < t2 && y > 0.0 && std::sqrt(y) < best) {
        best = std::sqrt(y);
        where = std::sqrt(g.mu * (1.0 + g.s(i) + t * h));
      }
    }
  }
  if (sol.delta_fermi > 0.0 && sol.delta_fermi < best) {
    best = sol.delta_fermi;
    where = std::sqrt(g.mu);
  }
  sol.xi = best;
  sol.xi_location = where;
}

inline double energy_gap(const GapSolution& sol) { return sol.xi; }
inline double delta_at_fermi(const GapSolution& sol) { return sol.delta_fermi; }

/// Relative sup-norm defect of the Nystrom extension of sol on the doubled grid.
inline double doubled_grid_residual(const GapSolution& sol) {
  const RadialGrid g2 = build_grid(sol.mu, sol.grid.params.doubled());
  std::vector<double> d2(g2.size());
  for (std::size_t i = 0; i < g2.size(); ++i) d2[i] = sol.profile(g2.nodes[i]);
  const Eigen::MatrixXd k2 = kernel_matrix(sol.pot, g2);
  const std::vector<double> m2 = detail::node_scale(g2);
  Eigen::VectorXd work(static_cast<Eigen::Index>(g2.size()));
  std::vector<double> out;
  detail::apply_gap_map(k2, m2, g2.xi, d2, work, out);
  double defect = 0.0;
  for (std::size_t i = 0; i < g2.size(); ++i) defect = std::max(defect, std::abs(out[i] - d2[i]));
  return defect / detail::sup_abs(d2);
}

namespace detail {

inline void finalize_solution(GapSolution& sol) {
  sol.dispersion = dispersion_of(sol.grid, sol.delta);
  interpolate_fermi(sol);
  locate_energy_gap(sol);
}

}  // namespace detail

/// Damped fixed-point solve seeded at the low-density prediction xi_0 Vhat(p)/Vhat(0).
inline GapSolution solve_gap(const Potential& pot, double mu, const GapOptions& opts = {}) {
  if (pot.is_zero() || !(pot.vhat(0.0) < 0.0))
    throw InvalidArgument("solve_gap requires Vhat(0) < 0");
  if (!pot.vhat_sign_definite())
    throw InvalidArgument("solve_gap requires a potential with Vhat <= 0 (" + family_name(pot.family()) +
                          " is admitted for scattering only)");
  if (!(mu > 0.0) || !std::isfinite(mu)) throw InvalidArgument("solve_gap requires mu > 0");
  if (!(opts.damping > 0.0 && opts.damping <= 1.0)) throw InvalidArgument("damping must lie in (0, 1]");
  if (!(opts.tol > 0.0)) throw InvalidArgument("tol must be positive");

  const double a = std::isnan(opts.scattering_length) ? scattering_length(pot) : opts.scattering_length;
  if (!(a < 0.0)) throw InvalidArgument("solve_gap requires a negative scattering length");
  if (std::sqrt(mu) * std::abs(a) < representable_floor) {
    char buf[200];
    std::snprintf(buf, sizeof buf,
                  "mu = %.6g is below the underflow floor: sqrt(mu)|a| = %.4g < %.4g (mu_min = %.6g)", mu,
                  std::sqrt(mu) * std::abs(a), representable_floor, mu_floor(a));
    throw RangeError(buf);
  }

  GapSolution sol;
  sol.mu = mu;
  sol.pot = pot;
  sol.scattering_length = a;
  sol.seed = gap_seed(mu, a);
  sol.grid = build_grid(mu, resolve_grid_params(pot, mu, a, opts.grid));
  auto kernel = std::make_shared<Eigen::MatrixXd>(kernel_matrix(pot, sol.grid));
  sol.kernel = kernel;

  const RadialGrid& g = sol.grid;
  const std::size_t n = g.size();
  const std::vector<double> m = detail::node_scale(g);
  const double change_tol = opts.change_tol > 0.0 ? opts.change_tol : std::min(1e-15, opts.tol * 1e-5);
  const double v0 = pot.vhat(0.0);
  const double omega = opts.damping;

  Eigen::VectorXd work(static_cast<Eigen::Index>(n));
  std::vector<double> next;
  double seed = sol.seed;
  for (int attempt = 0; attempt < 2; ++attempt) {
    sol.delta.assign(n, 0.0);
    for (std::size_t i = 0; i < n; ++i) sol.delta[i] = seed * pot.vhat(g.nodes[i]) / v0;
    std::size_t small_run = 0;
    bool collapsed = false;
    sol.converged = false;
    // the amplitude mode contracts slowly (rho -> 1 as mu -> 0): once successive
    // step ratios settle, jump by the geometric tail rho/(1-rho) of the steps
    std::vector<double> step(n);
    double prev_change = 0.0, prev_rho = 0.0;
    std::size_t stable = 0, since_jump = 0;
    for (std::size_t it = 1; it <= opts.max_iter; ++it) {
      detail::apply_gap_map(*kernel, m, g.xi, sol.delta, work, next);
      double change = 0.0, sup = 0.0;
      for (std::size_t i = 0; i < n; ++i) {
        change = std::max(change, std::abs(next[i] - sol.delta[i]));
        step[i] = omega * (next[i] - sol.delta[i]);
        sol.delta[i] += step[i];
        sup = std::max(sup, std::abs(sol.delta[i]));
      }
      sol.iterations = it;
      sol.last_change = change / sup;
      small_run = sup < 1e-3 * sol.seed ? small_run + 1 : 0;
      if (small_run >= 20) {
        collapsed = true;
        break;
      }
      const double rho = prev_change > 0.0 ? change / prev_change : 0.0;
      stable = std::abs(rho - prev_rho) <= 1e-3 * rho ? stable + 1 : 0;
      prev_rho = rho;
      prev_change = change;
      ++since_jump;
      const double rho_eff = std::clamp(rho, 0.0, 0.999);
      const double error = omega * sol.last_change / (1.0 - rho_eff);
      if (since_jump > 3 && (error < change_tol || sol.last_change < 8.0 * std::numeric_limits<double>::epsilon())) {
        sol.converged = true;
        break;
      }
      if (opts.extrapolate && stable >= 5 && rho > 0.5 && rho < 1.0 && since_jump > 10 &&
          sol.last_change > 1e3 * change_tol * (1.0 - rho)) {
        const double f = rho / (1.0 - rho);
        bool positive = true;
        for (std::size_t i = 0; i < n && positive; ++i) positive = sol.delta[i] + f * step[i] > 0.0;
        if (positive) {
          for (std::size_t i = 0; i < n; ++i) sol.delta[i] += f * step[i];
          ++sol.extrapolations;
          since_jump = 0;
          stable = 0;
          prev_change = 0.0;
        }
      }
    }
    if (!collapsed) break;
    if (attempt == 1)
      throw TrivialSolutionError("gap iteration collapsed to Delta = 0 (sup Delta < 1e-3 xi_0 for 20 iterations)",
                                 detail::sup_abs(sol.delta));
    ++sol.restarts;
    seed *= 10.0;
  }
  if (!sol.converged)
    throw NonConvergenceError("gap iteration exceeded max_iter", sol.last_change);

  sol.profile = NystromProfile(pot, g.nodes, g.weights, sol.delta, detail::dispersion_of(g, sol.delta));
  detail::finalize_solution(sol);
  if (opts.certify) {
    sol.residual = doubled_grid_residual(sol);
    sol.converged = sol.residual <= opts.tol;
  } else {
    sol.residual = sol.last_change;
  }
  return sol;
}

/// A solution object carrying an externally prescribed Delta (for tests and oracles).
inline GapSolution synthetic_solution(const Potential& pot, double mu, const RadialGrid& grid, DeltaProfile profile) {
  GapSolution sol;
  sol.mu = mu;
  sol.pot = pot;
  sol.grid = grid;
  sol.delta.resize(grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i) sol.delta[i] = profile(grid.nodes[i]);
  sol.profile = std::move(profile);
  sol.kernel = std::make_shared<Eigen::MatrixXd>(kernel_matrix(pot, grid));
  sol.converged = true;
  sol.residual = std::numeric_limits<double>::quiet_NaN();
  detail::finalize_solution(sol);
  return sol;
}

/// Delta_{1, sqrt(mu) V_{sqrt(mu)}}(p / sqrt(mu)) * mu: maps a solution of the
/// rescaled problem back to the original variables.
inline double rescaled_delta(const GapSolution& unit_solution, double mu, double p) {
  return mu * unit_solution.profile(p / std::sqrt(mu));
}

// ---------------------------------------------------------------------------
// BCS functional
//
//   F(alpha) = 1/2 \int |p^2 - mu| (1 - sqrt(1 - 4 alpha^2)) dp + \int V |alpha|^2 dx
//
// with the interaction written in momentum space as \int alpha (2pi)^{-3/2} (Vhat * alpha).

struct BcsTerms {
  double kinetic = 0.0;
  double interaction = 0.0;
  double total() const noexcept { return kinetic + interaction; }
};

namespace detail {

inline double interaction_term(const Eigen::MatrixXd& k, const std::vector<double>& m,
                               const std::vector<double>& alpha) {
  Eigen::VectorXd v(static_cast<Eigen::Index>(m.size()));
  for (std::size_t i = 0; i < m.size(); ++i) v[i] = alpha[i] * m[i];
  return 4.0 * pi * v.dot(k * v);
}

}  // namespace detail

/// F at alpha = Delta/(2E), for which 1 - sqrt(1 - 4 alpha^2) = Delta^2 / (E (E + |xi|)).
inline BcsTerms bcs_terms(const RadialGrid& g, const Eigen::MatrixXd& k, const std::vector<double>& delta) {
  const std::vector<double> m = detail::node_scale(g);
  BcsTerms t;
  std::vector<double> alpha(g.size());
  for (std::size_t i = 0; i < g.size(); ++i) {
    const double ax = std::abs(g.xi[i]);
    const double e = std::hypot(g.xi[i], delta[i]);
    alpha[i] = e > 0.0 ? delta[i] / (2.0 * e) : 0.0;
    if (e > 0.0) t.kinetic += 0.5 * ax * delta[i] * delta[i] / (e * (e + ax)) * 4.0 * pi * m[i] * m[i];
  }
  t.interaction = detail::interaction_term(k, m, alpha);
  return t;
}

inline double bcs_functional(const GapSolution& sol) {
  return bcs_terms(sol.grid, *sol.kernel, sol.delta).total();
}

/// F at a prescribed pairing function alpha (node values of alpha-hat).
inline BcsTerms bcs_terms_alpha(const RadialGrid& g, const Eigen::MatrixXd& k, const std::vector<double>& alpha) {
  const std::vector<double> m = detail::node_scale(g);
  BcsTerms t;
  for (std::size_t i = 0; i < g.size(); ++i) {
    const double q = 4.0 * alpha[i] * alpha[i];
    if (q > 1.0) throw InconsistentSolutionError("|2 alpha| > 1 at a grid node", std::sqrt(q));
    t.kinetic += 0.5 * std::abs(g.xi[i]) * q / (1.0 + std::sqrt(1.0 - q)) * 4.0 * pi * m[i] * m[i];
  }
  t.interaction = detail::interaction_term(k, m, alpha);
  return t;
}

/// Gradient of F with respect to the node values of alpha, split into its
/// kinetic and interaction parts.
struct BcsGradient {
  std::vector<double> kinetic;
  std::vector<double> interaction;
};

inline BcsGradient bcs_gradient_alpha(const RadialGrid& g, const Eigen::MatrixXd& k,
                                      const std::vector<double>& alpha) {
  const std::vector<double> m = detail::node_scale(g);
  const std::size_t n = g.size();
  BcsGradient grad{std::vector<double>(n), std::vector<double>(n)};
  Eigen::VectorXd v(static_cast<Eigen::Index>(n));
  for (std::size_t i = 0; i < n; ++i) v[i] = alpha[i] * m[i];
  const Eigen::VectorXd kv = k * v;
  for (std::size_t i = 0; i < n; ++i) {
    const double q = 4.0 * alpha[i] * alpha[i];
    if (q >= 1.0) throw InconsistentSolutionError("|2 alpha| >= 1 at a grid node", std::sqrt(q));
    grad.kinetic[i] = 2.0 * std::abs(g.xi[i]) * alpha[i] / std::sqrt(1.0 - q) * 4.0 * pi * m[i] * m[i];
    grad.interaction[i] = 8.0 * pi * kv[i] * m[i];
  }
  return grad;
}

/// Relative Euler-Lagrange defect of F along a direction h in alpha:
/// |<grad F, h>| / (|<grad_kin, h>| + |<grad_int, h>|).
inline double euler_lagrange_defect(const GapSolution& sol, const std::vector<double>& h) {
  std::vector<double> alpha(sol.grid.size());
  for (std::size_t i = 0; i < alpha.size(); ++i) alpha[i] = sol.delta[i] / (2.0 * sol.dispersion[i]);
  const BcsGradient grad = bcs_gradient_alpha(sol.grid, *sol.kernel, alpha);
  double kin = 0.0, inter = 0.0;
  for (std::size_t i = 0; i < h.size(); ++i) {
    kin += grad.kinetic[i] * h[i];
    inter += grad.interaction[i] * h[i];
  }
  const double scale = std::abs(kin) + std::abs(inter);
  return scale > 0.0 ? std::abs(kin + inter) / scale : 0.0;
}

}  // namespace bcsgap
