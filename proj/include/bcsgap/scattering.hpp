#pragma once

// Scattering length of a radial potential from the Birman-Schwinger resolvent
//
//   a = (1/4pi) < |V|^{1/2}, (1 + V^{1/2} p^{-2} |V|^{1/2})^{-1} V^{1/2} >,
//
// with V^{1/2} = sgn(V)|V|^{1/2}, checked against the zero-energy radial
// equation u'' = V u.  In the s-wave channel p^{-2} acts on radial functions
// through the kernel s^2 / max(r, s).

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <vector>

#include <Eigen/Dense>
#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "bcsgap/constants.hpp"
#include "bcsgap/errors.hpp"
#include "bcsgap/potentials.hpp"

namespace bcsgap {

/// Uniform trapezoid grid on (0, R]; the r = 0 node carries no weight in the
/// s-wave measure and is dropped.
struct RadiusGrid {
  double radius = 0.0;
  std::vector<double> nodes;
  std::vector<double> weights;

  std::size_t size() const noexcept { return nodes.size(); }
};

inline RadiusGrid make_radius_grid(double radius, std::size_t intervals) {
  if (!(radius > 0.0) || intervals < 2) throw InvalidArgument("radius grid needs R > 0 and >= 2 intervals");
  RadiusGrid g;
  g.radius = radius;
  const double h = radius / static_cast<double>(intervals);
  g.nodes.resize(intervals);
  g.weights.assign(intervals, h);
  for (std::size_t k = 0; k < intervals; ++k) g.nodes[k] = h * static_cast<double>(k + 1);
  g.weights.back() = 0.5 * h;
  return g;
}

/// Integration radius for the scattering problem: support edge or |V| < 1e-14.
inline double scattering_radius(const Potential& pot) {
  if (pot.is_zero()) return pot.range();
  return pot.decay_radius(1e-14);
}

namespace detail {

inline double sqrt_signed(double v) { return v < 0.0 ? -std::sqrt(-v) : std::sqrt(v); }

}  // namespace detail

/// Symmetrized s-wave Birman-Schwinger matrix
///   B_ij = V_i^{1/2} |V_j|^{1/2} sqrt(w_i) r_i sqrt(w_j) r_j / max(r_i, r_j),
/// similar to the Nystrom discretization of V^{1/2} p^{-2} |V|^{1/2}.
inline Eigen::MatrixXd bs_matrix(const Potential& pot, const RadiusGrid& grid) {
  const std::size_t n = grid.size();
  Eigen::VectorXd left(n), right(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double v = pot.v_inside(grid.nodes[i]);
    const double m = std::sqrt(grid.weights[i]) * grid.nodes[i];
    left[i] = detail::sqrt_signed(v) * m;
    right[i] = std::sqrt(std::abs(v)) * m;
  }
  Eigen::MatrixXd b(n, n);
  for (std::size_t j = 0; j < n; ++j)
    for (std::size_t i = 0; i < n; ++i)
      b(i, j) = left[i] * right[j] / std::max(grid.nodes[i], grid.nodes[j]);
  return b;
}

/// Lowest (real part of the) eigenvalue of the Birman-Schwinger matrix.
inline double lowest_bs_eigenvalue(const Potential& pot, const RadiusGrid& grid) {
  if (pot.is_zero()) return 0.0;
  const Eigen::MatrixXd b = bs_matrix(pot, grid);
  bool sign_definite = true;
  for (double r : grid.nodes) sign_definite = sign_definite && pot.v_inside(r) <= 0.0;
  if (sign_definite) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(b, Eigen::EigenvaluesOnly);
    return es.eigenvalues()[0];
  }
  Eigen::EigenSolver<Eigen::MatrixXd> es(b, false);
  return es.eigenvalues().real().minCoeff();
}

inline double lowest_bs_eigenvalue(const Potential& pot, std::size_t intervals = 512) {
  return lowest_bs_eigenvalue(pot, make_radius_grid(scattering_radius(pot), intervals));
}

/// a on one grid: solve (1 + B) h = sqrt(w) r V^{1/2}, a = sum sqrt(w) r |V|^{1/2} h.
inline double scattering_length_on_grid(const Potential& pot, const RadiusGrid& grid) {
  if (pot.is_zero()) return 0.0;
  const std::size_t n = grid.size();
  Eigen::MatrixXd m = bs_matrix(pot, grid);
  m += Eigen::MatrixXd::Identity(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
  Eigen::VectorXd rhs(n), probe(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double v = pot.v_inside(grid.nodes[i]);
    const double w = std::sqrt(grid.weights[i]) * grid.nodes[i];
    rhs[i] = detail::sqrt_signed(v) * w;
    probe[i] = std::sqrt(std::abs(v)) * w;
  }
  Eigen::PartialPivLU<Eigen::MatrixXd> lu(m);
  if (!(lu.rcond() > 1e-13))
    throw BoundStateError("1 + B is numerically singular: -1 is an eigenvalue of the Birman-Schwinger operator",
                          lu.rcond());
  return probe.dot(lu.solve(rhs));
}

struct ScatteringGridMeta {
  std::size_t levels = 0;
  std::size_t finest_intervals = 0;
  double radius = 0.0;
  double last_change = 0.0;  // |difference of the last two extrapolated values|
};

struct ScatteringResult {
  double a_bs = 0.0;
  double a_ode = 0.0;
  double a_born = 0.0;
  double lowest_bs_eigenvalue = 0.0;
  ScatteringGridMeta grid_meta;
};

/// Birman-Schwinger scattering length with Richardson extrapolation in h^2 over
/// successively doubled grids; stops once two successive extrapolants agree to
/// rel_tol (relative to max(|a|, range)).
inline double scattering_length(const Potential& pot, ScatteringGridMeta* meta = nullptr,
                                double rel_tol = 1e-8, std::size_t max_intervals = 2048) {
  ScatteringGridMeta local;
  ScatteringGridMeta& info = meta ? *meta : local;
  info = {};
  info.radius = scattering_radius(pot);
  if (pot.is_zero()) return 0.0;

  std::vector<std::vector<double>> table;
  double last = 0.0;
  for (std::size_t n = 64; n <= max_intervals; n *= 2) {
    std::vector<double> row{scattering_length_on_grid(pot, make_radius_grid(info.radius, n))};
    for (std::size_t j = 1; j <= table.size(); ++j) {
      const double factor = std::pow(4.0, static_cast<double>(j)) - 1.0;
      row.push_back(row[j - 1] + (row[j - 1] - table.back()[j - 1]) / factor);
    }
    const double current = row.back();
    table.push_back(std::move(row));
    info.levels = table.size();
    info.finest_intervals = n;
    if (table.size() >= 3) {
      info.last_change = std::abs(current - last);
      if (info.last_change <= rel_tol * std::max(std::abs(current), pot.range())) return current;
    }
    last = current;
  }
  throw NumericError("Birman-Schwinger scattering length did not converge under grid refinement",
                     info.last_change);
}

/// Zero-energy radial solution u'' = V u, u(0) = 0, u'(0) = 1, by classical RK4.
struct ZeroEnergySolution {
  double radius = 0.0;
  double u = 0.0;
  double du = 0.0;
  std::size_t sign_changes = 0;
};

inline ZeroEnergySolution integrate_zero_energy(const Potential& pot, double radius, std::size_t steps) {
  const double h = radius / static_cast<double>(steps);
  double u = 0.0, du = 1.0;
  ZeroEnergySolution out;
  out.radius = radius;
  // evaluate V from inside on the last step so a support edge at R is respected
  auto vv = [&](double r) { return pot.v_inside(std::min(r, radius)); };
  for (std::size_t k = 0; k < steps; ++k) {
    const double r = h * static_cast<double>(k);
    const double rm = r + 0.5 * h;
    const double r1 = (k + 1 == steps) ? radius : r + h;
    const double k1u = du, k1d = vv(r) * u;
    const double k2u = du + 0.5 * h * k1d, k2d = vv(rm) * (u + 0.5 * h * k1u);
    const double k3u = du + 0.5 * h * k2d, k3d = vv(rm) * (u + 0.5 * h * k2u);
    const double k4u = du + h * k3d, k4d = vv(r1) * (u + h * k3u);
    const double un = u + h / 6.0 * (k1u + 2.0 * k2u + 2.0 * k3u + k4u);
    du += h / 6.0 * (k1d + 2.0 * k2d + 2.0 * k3d + k4d);
    if (k > 0 && (un < 0.0) != (u < 0.0)) ++out.sign_changes;
    u = un;
  }
  out.u = u;
  out.du = du;
  return out;
}

/// Independent oracle: a = R - u(R)/u'(R), step halving until stable to rel_tol.
inline double scattering_length_ode(const Potential& pot, double rel_tol = 1e-9) {
  if (pot.is_zero()) return 0.0;
  const double radius = scattering_radius(pot);
  auto a_of = [&](std::size_t steps) {
    const ZeroEnergySolution z = integrate_zero_energy(pot, radius, steps);
    if (std::abs(z.du) * radius <= 1e-12 * std::abs(z.u))
      throw ResonanceError("zero-energy resonance: u'(R) vanishes", z.du);
    return radius - z.u / z.du;
  };
  std::size_t steps = static_cast<std::size_t>(std::ceil(100.0 * radius / pot.range()));
  double prev = a_of(steps);
  for (int k = 0; k < 14; ++k) {
    steps *= 2;
    const double cur = a_of(steps);
    const double extrapolated = cur + (cur - prev) / 15.0;
    if (std::abs(cur - prev) <= rel_tol * std::max(std::abs(cur), pot.range())) return extrapolated;
    prev = cur;
  }
  throw NumericError("ODE scattering length did not stabilize under step halving");
}

/// Number of bound states counted as nodes of the zero-energy solution on (0, infinity).
inline std::size_t zero_energy_nodes(const Potential& pot) {
  if (pot.is_zero()) return 0;
  const double radius = scattering_radius(pot);
  const ZeroEnergySolution z = integrate_zero_energy(
      pot, radius, static_cast<std::size_t>(std::ceil(400.0 * radius / pot.range())));
  std::size_t nodes = z.sign_changes;
  // beyond R, u is linear; it has a further zero iff the asymptote crosses zero at r > R
  if (z.du != 0.0 && radius - z.u / z.du > radius) ++nodes;
  return nodes;
}

/// First Born term \int_0^\infty r^2 V(r) dr = (1/4pi) \int V.
inline double born_term(const Potential& pot) {
  if (pot.is_zero()) return 0.0;
  auto f = [&](double r) { return r * r * pot.v_inside(r); };
  const double upper = pot.compact_support() ? pot.range() : scattering_radius(pot) * 1.5;
  return boost::math::quadrature::gauss_kronrod<double, 61>::integrate(f, 0.0, upper, 15, 1e-14);
}

inline ScatteringResult scatter(const Potential& pot) {
  ScatteringResult r;
  r.a_bs = scattering_length(pot, &r.grid_meta);
  r.a_ode = scattering_length_ode(pot);
  r.a_born = born_term(pot);
  r.lowest_bs_eigenvalue = lowest_bs_eigenvalue(pot);
  return r;
}

}  // namespace bcsgap
