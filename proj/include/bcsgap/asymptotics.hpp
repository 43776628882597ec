#pragma once

// Low-density quantities: the renormalized integral
//
//   m_mu(Delta) = (2pi)^{-3} \int (1/E(p) - 1/p^2) dp,
//
// evaluated in the s-substituted split form and directly, the closed-form
// predictions for Xi and T_c, the D diagnostic, and a coarse Hilbert-Schmidt
// norm of the remainder A in V^{1/2} E^{-1} |V|^{1/2} = V^{1/2} p^{-2} |V|^{1/2}
// + m_mu |V^{1/2}><|V|^{1/2}| + A.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <vector>

#include "bcsgap/constants.hpp"
#include "bcsgap/errors.hpp"
#include "bcsgap/gap_solver.hpp"
#include "bcsgap/gauss_legendre.hpp"
#include "bcsgap/radial_quadrature.hpp"

namespace bcsgap {

/// The three bracketed integrals of the split form and the analytic tail of
/// the last one beyond s_max = p_max^2/mu - 1.
struct MSplitParts {
  double lower = 0.0;   // \int_0^1 (sqrt(1-s)-1)/w_- + (sqrt(1+s)-1)/w_+ - 1/sqrt(1-s) - 1/sqrt(1+s)
  double middle = 0.0;  // \int_0^1 1/w_- + 1/w_+
  double upper = 0.0;   // \int_1^{s_max} sqrt(1+s)/w_+ - 1/sqrt(1+s)
  double tail = 0.0;    // \int_{s_max}^\infty with Delta = 0
  double prefactor = 0.0;  // sqrt(mu)/(4 pi^2)
  double value() const noexcept { return prefactor * (lower + middle + upper + tail); }
};

namespace detail {

/// s nodes on [0, 1/2] clustered at s ~ x0, plus the map s = 1 - t^2 on [1/2, 1].
struct SplitRule {
  PanelNodes near;  // s in [0, 1/2]
  PanelNodes far;   // t in [0, sqrt(1/2)], s = 1 - t^2
};

inline SplitRule split_rule(double x0) {
  SplitRule r;
  const double c = std::clamp(x0 * 1e-2, 1e-300, 5e-3);
  std::vector<double> edges = linear_edges(0.0, c, 2);
  const std::size_t decades = static_cast<std::size_t>(std::ceil(std::log10(0.5 / c)));
  const std::vector<double> geo = geometric_edges(c, 0.5, 3 * std::max<std::size_t>(1, decades));
  edges.insert(edges.end(), geo.begin() + 1, geo.end());
  r.near = composite_rule(edges);
  r.far = composite_rule(linear_edges(0.0, std::sqrt(0.5), 6));
  return r;
}

// w(s) = sqrt(s^2 + x^2)
inline double root(double s, double x) { return std::hypot(s, x); }

inline void accumulate_lower_middle(double s, double weight, double xm, double xp, MSplitParts& parts) {
  const double wm = root(s, xm), wp = root(s, xp);
  const double sm = std::sqrt(1.0 - s), sp = std::sqrt(1.0 + s);
  // sqrt(1 -+ s) - 1 written without cancellation
  const double num_m = -s / (sm + 1.0), num_p = s / (sp + 1.0);
  parts.lower += weight * (num_m / wm + num_p / wp - 1.0 / sm - 1.0 / sp);
  parts.middle += weight * (1.0 / wm + 1.0 / wp);
}

}  // namespace detail

/// Split-form m_mu for a radial Delta given as a profile; p_max bounds the
/// numerically integrated part of the s >= 1 integral.
inline MSplitParts m_mu_split_parts(double mu, const DeltaProfile& delta, double p_max) {
  if (!(mu > 0.0)) throw InvalidArgument("m_mu requires mu > 0");
  if (!(p_max * p_max > 2.0 * mu)) throw InvalidArgument("m_mu requires p_max^2 > 2 mu");
  const double sqmu = std::sqrt(mu);
  const double x0 = delta(sqmu) / mu;
  if (!(x0 > 0.0)) throw InvalidArgument("m_mu requires Delta(sqrt(mu)) > 0");

  auto x_minus = [&](double s) { return delta(sqmu * std::sqrt(1.0 - s)) / mu; };
  auto x_plus = [&](double s) { return delta(sqmu * std::sqrt(1.0 + s)) / mu; };

  MSplitParts parts;
  parts.prefactor = sqmu / (4.0 * pi * pi);
  const detail::SplitRule rule = detail::split_rule(x0);
  for (std::size_t k = 0; k < rule.near.x.size(); ++k) {
    const double s = rule.near.x[k];
    detail::accumulate_lower_middle(s, rule.near.w[k], x_minus(s), x_plus(s), parts);
  }
  for (std::size_t k = 0; k < rule.far.x.size(); ++k) {
    const double t = rule.far.x[k];
    const double s = 1.0 - t * t;
    const double xm = x_minus(s), xp = x_plus(s);
    const double wm = detail::root(s, xm), wp = detail::root(s, xp);
    const double sp = std::sqrt(1.0 + s);
    // ds = 2t dt; 1/sqrt(1-s) = 1/t
    const double jac = 2.0 * t * rule.far.w[k];
    parts.lower += jac * ((t - 1.0) / wm + (s / (sp + 1.0)) / wp - 1.0 / sp) - 2.0 * rule.far.w[k];
    parts.middle += jac * (1.0 / wm + 1.0 / wp);
  }

  const double s_max = p_max * p_max / mu - 1.0;
  const std::size_t decades = static_cast<std::size_t>(std::ceil(std::log10(s_max)));
  const PanelNodes up = log_rule(1.0, s_max, 3 * std::max<std::size_t>(1, decades));
  for (std::size_t k = 0; k < up.x.size(); ++k) {
    const double s = up.x[k];
    const double x = x_plus(s);
    const double w = detail::root(s, x);
    // sqrt(1+s)/w - 1/sqrt(1+s) = (1 + s - w) / (sqrt(1+s) w), with s - w = -x^2/(s + w)
    parts.upper += up.w[k] * (1.0 - x * x / (s + w)) / (std::sqrt(1.0 + s) * w);
  }
  const double r = std::sqrt(1.0 + s_max);
  parts.tail = -std::log((r - 1.0) / (r + 1.0));
  return parts;
}

inline double m_mu_split(double mu, const DeltaProfile& delta, double p_max) {
  return m_mu_split_parts(mu, delta, p_max).value();
}

inline double m_mu_split(const GapSolution& sol) { return m_mu_split(sol.mu, sol.profile, sol.grid.p_max()); }

/// (1/(2pi^2)) \int_0^P (p^2/E - 1) dp on the given grid plus the Delta = 0 tail
/// (sqrt(mu)/2) ln((P + sqrt(mu))/(P - sqrt(mu))).
inline double m_mu_direct(double mu, const DeltaProfile& delta, const RadialGrid& grid) {
  if (!(mu > 0.0)) throw InvalidArgument("m_mu requires mu > 0");
  const double sqmu = std::sqrt(mu);
  if (!(delta(sqmu) > 0.0)) throw InvalidArgument("m_mu requires Delta(sqrt(mu)) > 0");
  double acc = 0.0;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const double p = grid.nodes[i];
    const double d = delta(p);
    const double e = std::hypot(grid.xi[i], d);
    // p^2 - E = (mu (2p^2 - mu) - Delta^2) / (p^2 + E)
    acc += grid.weights[i] * (mu * (2.0 * p * p - mu) - d * d) / ((p * p + e) * e);
  }
  const double big = grid.p_max();
  acc += 0.5 * sqmu * std::log((big + sqmu) / (big - sqmu));
  return acc / (2.0 * pi * pi);
}

/// Direct form on the doubled solution grid.
inline double m_mu_direct(const GapSolution& sol) {
  return m_mu_direct(sol.mu, sol.profile, build_grid(sol.mu, sol.grid.params.doubled()));
}

/// (sqrt(mu)/(2 pi^2)) (ln(mu/Delta(sqrt(mu))) - 2 + ln 8).
inline double m_mu_closed(double mu, double delta_fermi) {
  return std::sqrt(mu) / (2.0 * pi * pi) * (std::log(mu / delta_fermi) - 2.0 + std::log(8.0));
}

struct Predictions {
  double xi_pred = 0.0;
  double tc_pred = 0.0;
  double m_pred = 0.0;  // -1/(4 pi a)
  double D_target = gap_constant_target;
  double ratio_target = universal_ratio;
};

inline Predictions predictions(double mu, double a) {
  if (!(a < 0.0)) throw InvalidArgument("predictions require a < 0");
  if (!(mu > 0.0)) throw InvalidArgument("predictions require mu > 0");
  const double e = std::exp(pi / (2.0 * std::sqrt(mu) * a));
  Predictions p;
  p.xi_pred = gap_prefactor * mu * e;
  p.tc_pred = tc_prefactor * mu * e;
  p.m_pred = -1.0 / (4.0 * pi * a);
  return p;
}

/// log(mu/Xi) + pi/(2 sqrt(mu) a).
inline double diagnostic_D(double mu, double xi, double a) {
  if (!(xi > 0.0)) throw InvalidArgument("diagnostic_D requires Xi > 0");
  if (!(mu > 0.0)) throw InvalidArgument("diagnostic_D requires mu > 0");
  return std::log(mu / xi) + pi / (2.0 * std::sqrt(mu) * a);
}

// ---------------------------------------------------------------------------
// Hilbert-Schmidt norm of A:
//   ||A||_2^2 = \int\int |V(x)||V(y)| g(|x-y|)^2 dx dy,
//   g(d) = (1/(2pi^2)) \int_0^\infty (sinc(pd) - 1)(p^2/E - 1) dp.

struct HsOptions {
  std::size_t max_outer_panels = 3;  // 16-point panels per outer variable; 3 gives 48^3
  double rel_tol = 0.1;              // accept once two outer levels agree to this
  std::size_t d_table = 768;
};

struct HsDiagnostic {
  double norm = 0.0;
  double ratio = 0.0;  // ||A||_2 / m_mu
  double error = 0.0;  // |change| between the two finest outer levels
  std::size_t outer_nodes = 0;
};

namespace detail {

inline double sinc_minus_one(double x) {
  if (std::abs(x) < 1e-3) {
    const double x2 = x * x;
    return -x2 / 6.0 + x2 * x2 / 120.0;
  }
  return std::sin(x) / x - 1.0;
}

/// Tabulates g on a uniform d grid over [0, d_max].
class SincKernelTable {
 public:
  SincKernelTable(double mu, const DeltaProfile& delta, const GridParams& params, double d_max, std::size_t n)
      : h_(d_max / static_cast<double>(n - 1)), values_(n) {
    const double sqmu = std::sqrt(mu);
    const double p_max = params.p_max;
    // Fermi-clustered part up to sqrt(2 mu), then panels of width <= pi/(2 d_max)
    const RadialGrid g = build_grid(mu, params);
    std::vector<double> p, w, f;
    for (std::size_t i = 0; i < g.size(); ++i) {
      if (g.tags[i] != Region::Inner) continue;
      const double d = delta(g.nodes[i]);
      const double e = std::hypot(g.xi[i], d);
      p.push_back(g.nodes[i]);
      w.push_back(g.weights[i]);
      f.push_back((mu * (2.0 * g.nodes[i] * g.nodes[i] - mu) - d * d) / ((g.nodes[i] * g.nodes[i] + e) * e));
    }
    const double start = std::sqrt(2.0) * sqmu;
    const double cap = pi / (2.0 * d_max);
    std::vector<double> edges{start};
    while (edges.back() < p_max) edges.push_back(std::min(p_max, edges.back() + std::min(cap, edges.back())));
    const PanelNodes outer = composite_rule(edges);
    for (std::size_t k = 0; k < outer.x.size(); ++k) {
      const double q = outer.x[k];
      const double d = delta(q);
      const double e = std::hypot(q * q - mu, d);
      p.push_back(q);
      w.push_back(outer.w[k]);
      f.push_back((mu * (2.0 * q * q - mu) - d * d) / ((q * q + e) * e));
    }
    for (std::size_t j = 0; j < n; ++j) {
      const double dist = h_ * static_cast<double>(j);
      double acc = 0.0;
      for (std::size_t k = 0; k < p.size(); ++k) acc += w[k] * sinc_minus_one(p[k] * dist) * f[k];
      // beyond p_max: (sinc - 1) mu / p^2 ~ -mu / p
      if (j > 0) acc -= mu / p_max;
      values_[j] = acc / (2.0 * pi * pi);
    }
  }

  /// Cubic Lagrange interpolation in d.
  double operator()(double d) const {
    const double t = d / h_;
    const std::size_t n = values_.size();
    std::size_t i = static_cast<std::size_t>(std::clamp(std::floor(t), 1.0, static_cast<double>(n - 3)));
    const double u = t - static_cast<double>(i);
    const double f0 = values_[i - 1], f1 = values_[i], f2 = values_[i + 1], f3 = values_[i + 2];
    return f1 + 0.5 * u * (f2 - f0 + u * (2.0 * f0 - 5.0 * f1 + 4.0 * f2 - f3 + u * (3.0 * (f1 - f2) + f3 - f0)));
  }

 private:
  double h_;
  std::vector<double> values_;
};

inline double hs_norm_squared(const Potential& pot, const SincKernelTable& g, double radius, std::size_t panels) {
  const PanelNodes rr = composite_rule(linear_edges(0.0, radius, panels));
  const PanelNodes uu = composite_rule(linear_edges(-1.0, 1.0, panels));
  double acc = 0.0;
  for (std::size_t a = 0; a < rr.x.size(); ++a) {
    const double r = rr.x[a];
    const double fr = rr.w[a] * r * r * std::abs(pot.v(r));
    for (std::size_t b = 0; b < rr.x.size(); ++b) {
      const double s = rr.x[b];
      const double fs = rr.w[b] * s * s * std::abs(pot.v(s));
      double inner = 0.0;
      for (std::size_t c = 0; c < uu.x.size(); ++c) {
        const double d = std::sqrt(std::max(0.0, r * r + s * s - 2.0 * r * s * uu.x[c]));
        const double gv = g(d);
        inner += uu.w[c] * gv * gv;
      }
      acc += fr * fs * inner;
    }
  }
  return 8.0 * pi * pi * acc;
}

}  // namespace detail

/// ||A_{Delta,mu}||_2 / m_mu via the radial (r, s, u = cos theta) reduction on
/// coarse outer Gauss-Legendre grids of 16, 32, ... nodes per variable.
inline HsDiagnostic a_hs_norm(const Potential& pot, double mu, const DeltaProfile& delta, const GridParams& params,
                              double m_mu, const HsOptions& opts = {}) {
  if (pot.is_zero()) return {};
  if (opts.max_outer_panels < 2) throw InvalidArgument("a_hs_norm needs at least two outer levels");
  const double radius = pot.compact_support() ? pot.range() : pot.decay_radius(1e-12 * pot.depth());
  const detail::SincKernelTable g(mu, delta, params, 2.0 * radius, opts.d_table);
  HsDiagnostic out;
  double previous = std::numeric_limits<double>::quiet_NaN();
  for (std::size_t panels = 1; panels <= opts.max_outer_panels; ++panels) {
    const double norm = std::sqrt(detail::hs_norm_squared(pot, g, radius, panels));
    out.outer_nodes = panels * panel_order;
    out.norm = norm;
    out.ratio = norm / m_mu;
    if (!std::isnan(previous)) {
      out.error = std::abs(norm - previous) / m_mu;
      if (std::abs(norm - previous) <= opts.rel_tol * norm) return out;
    }
    previous = norm;
  }
  throw PartialResultError("a_hs_norm: outer grid budget exhausted before self-convergence", out.ratio, out.error);
}

inline HsDiagnostic a_hs_norm(const GapSolution& sol, const HsOptions& opts = {}) {
  return a_hs_norm(sol.pot, sol.mu, sol.profile, sol.grid.params, m_mu_split(sol), opts);
}

struct AsymptoticsReport {
  double m_mu = 0.0;
  double m_mu_direct = 0.0;
  double m_pred = 0.0;
  double m_closed = 0.0;
  double D = 0.0;
  double D_target = gap_constant_target;
  double xi_pred = 0.0;
  double tc_pred = 0.0;
  double a_hs_ratio = std::numeric_limits<double>::quiet_NaN();
};

inline AsymptoticsReport asymptotics_report(const GapSolution& sol, bool hs_diagnostic = false) {
  const double a = sol.scattering_length;
  const Predictions pred = predictions(sol.mu, a);
  AsymptoticsReport r;
  r.m_mu = m_mu_split(sol);
  r.m_mu_direct = m_mu_direct(sol);
  r.m_pred = pred.m_pred;
  r.m_closed = m_mu_closed(sol.mu, sol.delta_fermi);
  r.D = diagnostic_D(sol.mu, sol.xi, a);
  r.xi_pred = pred.xi_pred;
  r.tc_pred = pred.tc_pred;
  if (hs_diagnostic) r.a_hs_ratio = a_hs_norm(sol.pot, sol.mu, sol.profile, sol.grid.params, r.m_mu).ratio;
  return r;
}

}  // namespace bcsgap
