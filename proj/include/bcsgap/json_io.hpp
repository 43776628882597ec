#pragma once

// JSON serialization of the single-shot reports.  Non-finite numbers are
// written as null.

#include <cmath>
#include <string>

#include <nlohmann/json.hpp>

#include "bcsgap/admissibility.hpp"
#include "bcsgap/asymptotics.hpp"
#include "bcsgap/gap_solver.hpp"
#include "bcsgap/radial_quadrature.hpp"
#include "bcsgap/scattering.hpp"
#include "bcsgap/sweep.hpp"
#include "bcsgap/tc_solver.hpp"

namespace bcsgap {

using json = nlohmann::ordered_json;

inline constexpr int report_schema_version = 1;

namespace detail {

inline json num(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

}  // namespace detail

inline json to_json(const Potential& pot) {
  return {{"family", family_name(pot.family())},
          {"depth", pot.depth()},
          {"range", pot.range()},
          {"spec", pot.to_string()}};
}

inline json to_json(const GridParams& g) {
  return {{"inner_scale", g.inner_scale},
          {"p_max", g.p_max},
          {"n_inner", g.n_inner},
          {"n_wing", g.n_wing},
          {"n_tail", g.n_tail}};
}

inline json to_json(const AdmissibilityReport& r) {
  using detail::num;
  return {{"l1_finite", r.l1_finite},
          {"weighted_l1_finite", r.weighted_l1_finite},
          {"sobolev_ok", r.sobolev_ok},
          {"vhat_nonpositive", r.vhat_nonpositive},
          {"vhat0_negative", r.vhat0_negative},
          {"scattering_length", num(r.scattering_length)},
          {"a_negative", r.a_negative},
          {"bs_spectrum_ok", r.bs_spectrum_ok},
          {"all_ok", r.all_ok()},
          {"evidence",
           {{"l1", num(r.l1)},
            {"l32", num(r.l32)},
            {"sobolev_constant", sobolev_constant},
            {"l1_weighted", num(r.l1_weighted)},
            {"vhat_samples", vhat_samples},
            {"vhat_max_sample", num(r.vhat_max_sample)},
            {"lowest_bs_eigenvalue", num(r.lowest_bs_eigenvalue)}}}};
}

inline json to_json(const ScatteringResult& r) {
  using detail::num;
  return {{"a_bs", num(r.a_bs)},
          {"a_ode", num(r.a_ode)},
          {"a_born", num(r.a_born)},
          {"lowest_bs_eigenvalue", num(r.lowest_bs_eigenvalue)},
          {"grid_meta",
           {{"levels", r.grid_meta.levels},
            {"finest_intervals", r.grid_meta.finest_intervals},
            {"radius", r.grid_meta.radius},
            {"last_change", num(r.grid_meta.last_change)}}}};
}

inline json to_json(const GapSolution& s) {
  using detail::num;
  return {{"mu", s.mu},
          {"scattering_length", num(s.scattering_length)},
          {"delta_fermi", num(s.delta_fermi)},
          {"delta_fermi_error", num(s.delta_fermi_error)},
          {"xi", num(s.xi)},
          {"xi_location", num(s.xi_location)},
          {"residual", num(s.residual)},
          {"last_change", num(s.last_change)},
          {"iterations", s.iterations},
          {"converged", s.converged},
          {"seed", num(s.seed)},
          {"restarts", s.restarts},
          {"grid", to_json(s.grid.params)},
          {"nodes", s.grid.size()}};
}

inline json to_json(const AsymptoticsReport& r) {
  using detail::num;
  return {{"m_mu", num(r.m_mu)},
          {"m_mu_direct", num(r.m_mu_direct)},
          {"m_pred", num(r.m_pred)},
          {"m_closed", num(r.m_closed)},
          {"D", num(r.D)},
          {"D_target", r.D_target},
          {"xi_pred", num(r.xi_pred)},
          {"tc_pred", num(r.tc_pred)},
          {"a_hs_ratio", num(r.a_hs_ratio)}};
}

inline json to_json(const TcResult& r) {
  using detail::num;
  json trace = json::array();
  for (const auto& [t, lam] : r.lambda_min_trace) trace.push_back({num(t), num(lam)});
  return {{"mu", r.mu},
          {"tc", num(r.tc)},
          {"tc_pred", num(r.tc_pred)},
          {"bracket", {num(r.bracket.first), num(r.bracket.second)}},
          {"converged", r.converged},
          {"monotone", r.monotone},
          {"evaluations", r.evaluations},
          {"grid", to_json(r.grid)},
          {"lambda_min_trace", trace}};
}

inline json to_json(const SweepRow& r) {
  using detail::num;
  return {{"mu", num(r.mu)},
          {"a", num(r.a)},
          {"delta_fermi", num(r.delta_fermi)},
          {"xi", num(r.xi)},
          {"tc", num(r.tc)},
          {"m_mu", num(r.m_mu)},
          {"m_pred", num(r.m_pred)},
          {"D", num(r.D)},
          {"D_target", r.D_target},
          {"ratio", num(r.ratio)},
          {"ratio_target", r.ratio_target},
          {"xi_pred", num(r.xi_pred)},
          {"tc_pred", num(r.tc_pred)},
          {"residual", num(r.residual)},
          {"iterations", r.iterations},
          {"grid_meta",
           {{"nodes", r.grid_meta.nodes},
            {"inner_scale", num(r.grid_meta.inner_scale)},
            {"p_max", num(r.grid_meta.p_max)},
            {"tc_nodes", r.grid_meta.tc_nodes},
            {"tc_inner_scale", num(r.grid_meta.tc_inner_scale)}}},
          {"m_mu_direct", num(r.m_mu_direct)},
          {"a_hs_ratio", num(r.a_hs_ratio)},
          {"status", r.status}};
}

inline json grid_to_json(const RadialGrid& g) {
  json nodes = json::array();
  for (std::size_t i = 0; i < g.size(); ++i)
    nodes.push_back({{"p", g.nodes[i]}, {"w", g.weights[i]}, {"xi", g.xi[i]}, {"region", region_name(g.tags[i])}});
  return {{"mu", g.mu}, {"params", to_json(g.params)}, {"size", g.size()}, {"nodes", nodes}};
}

}  // namespace bcsgap
