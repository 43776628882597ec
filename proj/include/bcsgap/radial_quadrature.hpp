#pragma once

// Momentum grids clustered at the Fermi surface p^2 = mu and the s-wave
// angular kernel that turns (2pi)^{-3/2} Vhat * f into a 1D radial integral.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <ostream>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "bcsgap/constants.hpp"
#include "bcsgap/errors.hpp"
#include "bcsgap/gauss_legendre.hpp"
#include "bcsgap/potentials.hpp"

namespace bcsgap {

enum class Region { Inner, Wing, Tail };

inline const char* region_name(Region r) {
  switch (r) {
    case Region::Inner: return "inner";
    case Region::Wing: return "wing";
    case Region::Tail: return "tail";
  }
  return "?";
}

/// Node budget of a composite grid.
///
/// n_inner is the number of nodes per decade of |s| = |p^2 - mu|/mu on each side
/// of the Fermi surface, n_wing the number of nodes per decade of p between
/// sqrt(2mu) and p_max/4, n_tail the node count on [p_max/4, p_max].  All counts
/// are rounded up to whole 16-point panels.
struct GridParams {
  double inner_scale = 1e-6;
  double p_max = 40.0;
  std::size_t n_inner = 16;
  std::size_t n_wing = 96;
  std::size_t n_tail = 32;

  GridParams doubled() const {
    GridParams g = *this;
    g.n_inner *= 2;
    g.n_wing *= 2;
    g.n_tail *= 2;
    return g;
  }
};

struct RadialGrid {
  double mu = 0.0;
  GridParams params;
  std::vector<double> nodes;    // p, strictly increasing
  std::vector<double> weights;  // dp weights
  std::vector<double> xi;       // p^2 - mu, exact near the Fermi surface
  std::vector<Region> tags;

  std::size_t size() const noexcept { return nodes.size(); }
  double inner_scale() const noexcept { return params.inner_scale; }
  double p_max() const noexcept { return params.p_max; }
  /// (p^2 - mu)/mu at node i.
  double s(std::size_t i) const noexcept { return xi[i] / mu; }
};

/// Lower bound on the half-width in s of the linear core around the Fermi surface.
inline constexpr double min_core_half_width = 5e-13;

namespace detail {

inline std::size_t panels_for(double decades, std::size_t per_decade) {
  const double n = std::ceil(decades * static_cast<double>(per_decade) / panel_order - 1e-9);
  return std::max<std::size_t>(1, static_cast<std::size_t>(n));
}

}  // namespace detail

/// Composite grid: a linear core |s| < max(inner_scale/100, 5e-13), geometric panels in |s|
/// out to s = -1/2 and s = 1, a short uniform panel set on [0, sqrt(mu/2)],
/// and geometric panels in p on [sqrt(2mu), p_max].
inline RadialGrid build_grid(double mu, const GridParams& params) {
  if (!(mu > 0.0)) throw InvalidArgument("build_grid requires mu > 0");
  if (!(params.inner_scale > 0.0 && params.inner_scale <= 1.0))
    throw InvalidArgument("build_grid requires 0 < inner_scale <= 1");
  if (!(params.p_max * params.p_max > 4.0 * mu))
    throw InvalidArgument("build_grid requires p_max^2 > 4 mu");
  if (params.n_inner == 0 || params.n_wing == 0 || params.n_tail == 0)
    throw InvalidArgument("build_grid requires positive node counts");

  RadialGrid g;
  g.mu = mu;
  g.params = params;
  const double sqmu = std::sqrt(mu);
  // below ~5e-13 the core nodes would no longer be distinct as momenta
  const double s_core = std::max(params.inner_scale / 100.0, min_core_half_width);

  auto push = [&](double p, double w, double xi, Region tag) {
    g.nodes.push_back(p);
    g.weights.push_back(w);
    g.xi.push_back(xi);
    g.tags.push_back(tag);
  };
  // Fermi-side nodes given in s; dp = mu/(2p) ds
  auto push_s = [&](double s, double ws) {
    const double p = sqmu * std::sqrt(1.0 + s);
    push(p, ws * mu / (2.0 * p), mu * s, Region::Inner);
  };

  const std::size_t low_panels = std::max<std::size_t>(1, (params.n_wing + 47) / 48);
  const PanelNodes low = composite_rule(linear_edges(0.0, std::sqrt(0.5 * mu), low_panels));
  for (std::size_t i = 0; i < low.x.size(); ++i)
    push(low.x[i], low.w[i], low.x[i] * low.x[i] - mu, Region::Inner);

  const std::size_t per_decade = params.n_inner;
  const PanelNodes below =
      log_rule(s_core, 0.5, detail::panels_for(std::log10(0.5 / s_core), per_decade));
  for (std::size_t k = below.x.size(); k-- > 0;) push_s(-below.x[k], below.w[k]);

  const std::size_t core_panels = std::max<std::size_t>(1, params.n_inner / panel_order);
  const PanelNodes core = composite_rule(linear_edges(-s_core, s_core, 2 * core_panels));
  for (std::size_t i = 0; i < core.x.size(); ++i) push_s(core.x[i], core.w[i]);

  const PanelNodes above =
      log_rule(s_core, 1.0, detail::panels_for(std::log10(1.0 / s_core), per_decade));
  for (std::size_t i = 0; i < above.x.size(); ++i) push_s(above.x[i], above.w[i]);

  const double p_wing = std::sqrt(2.0 * mu);
  const double p_tail = std::max(params.p_max / 4.0, p_wing);
  if (p_tail > p_wing) {
    const PanelNodes wing = log_rule(
        p_wing, p_tail, detail::panels_for(std::log10(p_tail / p_wing), params.n_wing));
    for (std::size_t i = 0; i < wing.x.size(); ++i)
      push(wing.x[i], wing.w[i], wing.x[i] * wing.x[i] - mu, Region::Wing);
  }
  const std::size_t tail_panels = std::max<std::size_t>(1, (params.n_tail + panel_order - 1) / panel_order);
  const PanelNodes tail = log_rule(p_tail, params.p_max, tail_panels);
  for (std::size_t i = 0; i < tail.x.size(); ++i)
    push(tail.x[i], tail.w[i], tail.x[i] * tail.x[i] - mu, Region::Tail);

  for (std::size_t i = 1; i < g.nodes.size(); ++i)
    if (!(g.nodes[i] > g.nodes[i - 1]))
      throw NumericError("grid nodes not strictly increasing; inner_scale too small for mu");
  return g;
}

inline RadialGrid build_grid(double mu, double inner_scale, double p_max, std::size_t n_inner,
                             std::size_t n_wing, std::size_t n_tail) {
  return build_grid(mu, GridParams{inner_scale, p_max, n_inner, n_wing, n_tail});
}

inline void write_grid_csv(std::ostream& out, const RadialGrid& g) {
  out << "node,weight,tag\n";
  char buf[80];
  for (std::size_t i = 0; i < g.size(); ++i) {
    std::snprintf(buf, sizeof buf, "%.17g,%.17g,", g.nodes[i], g.weights[i]);
    out << buf << region_name(g.tags[i]) << '\n';
  }
}

/// k(p,q) by direct quadrature of t Vhat(t) over [|p-q|, p+q].
inline double angular_kernel_quadrature(const Potential& pot, double p, double q) {
  const double hi = std::max(p, q);
  const double lo = std::min(p, q);
  if (lo <= 1e-12 * hi || hi == 0.0) return fourier_norm * 4.0 * pi * pot.vhat(hi);
  auto f = [&](double t) { return t * pot.vhat(t); };
  double error = 0.0, l1 = 0.0;
  const double integral = boost::math::quadrature::gauss_kronrod<double, 31>::integrate(
      f, hi - lo, hi + lo, 15, 1e-11, &error, &l1);
  // oscillating tails cancel: measure the error against the mass of |t Vhat(t)|
  if (!(error <= 1e-9 * l1 + 1e-300))
    throw NumericError("angular kernel quadrature did not converge", error);
  return fourier_norm * 2.0 * pi / (p * q) * integral;
}

/// Radial kernel k(p,q) = (2pi)^{-3/2} (2pi/(pq)) \int_{|p-q|}^{p+q} Vhat(t) t dt,
/// so that (2pi)^{-3/2} (Vhat * f)(p) = \int_0^\infty k(p,q) f(q) q^2 dq for radial f.
inline double angular_kernel(const Potential& pot, double p, double q) {
  if (pot.is_zero()) return 0.0;
  const double lam = pot.depth();
  const double s = pot.range();
  const double s2 = s * s;
  const double s3 = s2 * s;
  switch (pot.family()) {
    case Family::Gaussian: {
      // -(2pi)^{-3/2} 4pi lam s^3 e^{-s^2 (p-q)^2 / 2} (1 - e^{-2x}) / (2x), x = s^2 p q
      const double x = s2 * p * q;
      const double shape = x < 1e-8 ? 1.0 - x : -std::expm1(-2.0 * x) / (2.0 * x);
      const double d = p - q;
      return -fourier_norm * 4.0 * pi * lam * s3 * std::exp(-0.5 * s2 * d * d) * shape;
    }
    case Family::Exponential: {
      const double a = 1.0 + s2 * (p - q) * (p - q);
      const double b = 1.0 + s2 * (p + q) * (p + q);
      return -32.0 * pi * pi * lam * s3 * fourier_norm * fourier_norm / (a * b);
    }
    case Family::SquareWell: return angular_kernel_quadrature(pot, p, q);
  }
  return 0.0;
}

/// K_ij = k(p_i, p_j) sqrt(w_i p_i^2) sqrt(w_j p_j^2).
inline Eigen::MatrixXd kernel_matrix(const Potential& pot, const RadialGrid& grid) {
  const std::size_t n = grid.size();
  Eigen::VectorXd m(n);
  for (std::size_t i = 0; i < n; ++i) m[i] = std::sqrt(grid.weights[i]) * grid.nodes[i];
  Eigen::MatrixXd k(n, n);
  for (std::size_t j = 0; j < n; ++j) {
    for (std::size_t i = 0; i <= j; ++i) {
      const double v = angular_kernel(pot, grid.nodes[i], grid.nodes[j]) * m[i] * m[j];
      k(i, j) = v;
      k(j, i) = v;
    }
  }
  return k;
}

}  // namespace bcsgap
