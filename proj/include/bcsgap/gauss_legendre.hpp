#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <vector>

#include <boost/math/quadrature/gauss.hpp>

namespace bcsgap {

inline constexpr std::size_t panel_order = 16;

struct Rule {
  std::array<double, panel_order> x;
  std::array<double, panel_order> w;
};

/// 16-point Gauss-Legendre rule on [-1, 1], nodes ascending.
inline const Rule& reference_rule() {
  static const Rule rule = [] {
    using G = boost::math::quadrature::gauss<double, panel_order>;
    const auto& a = G::abscissa();
    const auto& w = G::weights();
    constexpr std::size_t half = panel_order / 2;
    Rule r{};
    for (std::size_t k = 0; k < half; ++k) {
      r.x[half - 1 - k] = -a[k];
      r.w[half - 1 - k] = w[k];
      r.x[half + k] = a[k];
      r.w[half + k] = w[k];
    }
    return r;
  }();
  return rule;
}

/// Nodes and weights of composite Gauss-Legendre panels between consecutive edges.
struct PanelNodes {
  std::vector<double> x;
  std::vector<double> w;
};

inline PanelNodes composite_rule(const std::vector<double>& edges) {
  const Rule& r = reference_rule();
  PanelNodes out;
  if (edges.size() < 2) return out;
  out.x.reserve((edges.size() - 1) * panel_order);
  out.w.reserve((edges.size() - 1) * panel_order);
  for (std::size_t k = 0; k + 1 < edges.size(); ++k) {
    const double mid = 0.5 * (edges[k] + edges[k + 1]);
    const double half = 0.5 * (edges[k + 1] - edges[k]);
    for (std::size_t j = 0; j < panel_order; ++j) {
      out.x.push_back(mid + half * r.x[j]);
      out.w.push_back(half * r.w[j]);
    }
  }
  return out;
}

inline std::vector<double> linear_edges(double a, double b, std::size_t panels) {
  std::vector<double> e(panels + 1);
  for (std::size_t k = 0; k <= panels; ++k)
    e[k] = a + (b - a) * static_cast<double>(k) / static_cast<double>(panels);
  e.back() = b;
  return e;
}

inline std::vector<double> geometric_edges(double a, double b, std::size_t panels) {
  std::vector<double> e(panels + 1);
  const double ratio = b / a;
  for (std::size_t k = 0; k <= panels; ++k)
    e[k] = a * std::pow(ratio, static_cast<double>(k) / static_cast<double>(panels));
  e.front() = a;
  e.back() = b;
  return e;
}

/// Composite rule in log x between a > 0 and b, returned in the x variable.
inline PanelNodes log_rule(double a, double b, std::size_t panels) {
  PanelNodes t = composite_rule(linear_edges(std::log(a), std::log(b), panels));
  for (std::size_t i = 0; i < t.x.size(); ++i) {
    t.x[i] = std::exp(t.x[i]);
    t.w[i] *= t.x[i];
  }
  return t;
}

}  // namespace bcsgap
