#pragma once

// Acceptance criteria as executable checks.  Each criterion contributes one or
// more entries; a criterion passes when all of its entries pass and the report
// passes when every entry does.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "bcsgap/admissibility.hpp"
#include "bcsgap/asymptotics.hpp"
#include "bcsgap/constants.hpp"
#include "bcsgap/gap_solver.hpp"
#include "bcsgap/json_io.hpp"
#include "bcsgap/potentials.hpp"
#include "bcsgap/scattering.hpp"
#include "bcsgap/sweep.hpp"
#include "bcsgap/tc_solver.hpp"

namespace bcsgap {

enum class Profile { Quick, Full };

inline Profile parse_profile(const std::string& s) {
  if (s == "quick") return Profile::Quick;
  if (s == "full") return Profile::Full;
  throw InvalidArgument("profile must be quick or full, got '" + s + "'");
}

/// Comparison applied to measured vs target.
enum class Check { AtMost, Below, AtLeast, Above, Equal };

struct VerifyEntry {
  int criterion = 0;  // 0: golden-file regression
  std::string name;
  double measured = 0.0;
  double target = 0.0;
  double tolerance = 0.0;
  Check check = Check::AtMost;
  bool pass = false;
  std::string detail;
};

struct VerifyReport {
  std::string profile;
  std::vector<VerifyEntry> entries;
  std::map<int, double> seconds;

  bool overall() const {
    return !entries.empty() && std::all_of(entries.begin(), entries.end(), [](const auto& e) { return e.pass; });
  }
  bool criterion_pass(int c) const {
    bool any = false;
    for (const auto& e : entries)
      if (e.criterion == c) {
        any = true;
        if (!e.pass) return false;
      }
    return any;
  }
  std::vector<int> criteria() const {
    std::vector<int> ids;
    for (const auto& e : entries)
      if (std::find(ids.begin(), ids.end(), e.criterion) == ids.end()) ids.push_back(e.criterion);
    return ids;
  }
};

struct VerifyConfig {
  Potential pot = make_potential(Family::Gaussian, 1.0, 1.0);
  // deeper well for the sweep: sqrt(mu)|a| reaches the floor at smaller Delta/mu
  Potential sweep_pot = make_potential(Family::Gaussian, 1.3, 1.0);
  std::size_t sweep_points = 8;
  double sweep_mu_max = 0.3;
  bool hs_diagnostic = true;
  std::string golden_path;  // empty: skip the golden-file entry
  std::size_t threads = 0;
  std::function<void(const std::string&)> log;
};

inline const std::vector<double>& criterion2_mus() {
  static const std::vector<double> mus{0.3, 0.1, 0.04};
  return mus;
}

namespace detail {

inline double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

inline VerifyEntry entry(int criterion, std::string name, double measured, double target, double tolerance,
                         Check check, std::string detail = {}) {
  VerifyEntry e{criterion, std::move(name), measured, target, tolerance, check, false, std::move(detail)};
  switch (check) {
    case Check::AtMost: e.pass = measured <= target + tolerance; break;
    case Check::Below: e.pass = measured < target; break;
    case Check::AtLeast: e.pass = measured >= target - tolerance; break;
    case Check::Above: e.pass = measured > target; break;
    case Check::Equal: e.pass = std::abs(measured - target) <= tolerance; break;
  }
  if (std::isnan(measured)) e.pass = false;
  return e;
}

inline VerifyEntry flag(int criterion, std::string name, bool ok, std::string detail = {}) {
  return entry(criterion, std::move(name), ok ? 1.0 : 0.0, 1.0, 0.0, Check::Equal, std::move(detail));
}

inline std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

/// True when |v| is strictly decreasing along the sequence.
inline bool strictly_decreasing_abs(const std::vector<double>& v) {
  for (std::size_t i = 1; i < v.size(); ++i)
    if (!(std::abs(v[i]) < std::abs(v[i - 1]))) return false;
  return v.size() >= 2;
}

inline std::string list(const std::vector<double>& v) {
  std::string s;
  for (double x : v) s += (s.empty() ? "" : ", ") + fmt("%.3e", x);
  return "[" + s + "]";
}

/// Least-squares fit y = c0 + c1 x.
inline std::pair<double, double> linear_fit(const std::vector<double>& x, const std::vector<double>& y) {
  const double n = static_cast<double>(x.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sx += x[i];
    sy += y[i];
    sxx += x[i] * x[i];
    sxy += x[i] * y[i];
  }
  const double c1 = (n * sxy - sx * sy) / (n * sxx - sx * sx);
  return {(sy - c1 * sx) / n, c1};
}

}  // namespace detail

// ---------------------------------------------------------------------------

/// Criterion 1: Birman-Schwinger vs ODE scattering length across the catalog.
inline std::vector<VerifyEntry> verify_scattering() {
  using detail::entry;
  std::vector<VerifyEntry> out;
  double worst = 0.0;
  std::string worst_case;
  for (Family f : {Family::Gaussian, Family::Exponential, Family::SquareWell}) {
    const double lam_max = sobolev_constant / make_potential(f, 1.0, 1.0).norms().l32;
    for (double lam : {1.0, 0.1 * lam_max, 0.5 * lam_max, 0.95 * lam_max}) {
      const Potential pot = make_potential(f, lam, 1.0);
      const double a_bs = scattering_length(pot);
      const double a_ode = scattering_length_ode(pot);
      const double rel = std::abs(a_bs - a_ode) / std::max(std::abs(a_ode), pot.range());
      if (rel >= worst) {
        worst = rel;
        worst_case = pot.to_string();
      }
    }
  }
  out.push_back(entry(1, "max |a_bs - a_ode| / max(|a|, sigma)", worst, 0.0, 1e-6, Check::AtMost,
                      "worst case " + worst_case));
  const double a_sw = scattering_length(make_potential(Family::SquareWell, 1.0, 1.0));
  const double exact = 1.0 - std::tan(1.0);
  out.push_back(entry(1, "squarewell(1,1) a_bs vs R - tan(sqrt(V0) R)/sqrt(V0)", a_sw, exact, 1e-8, Check::Equal));
  return out;
}

/// Criterion 2: converged gap solutions for pot at mu in {0.3, 0.1, 0.04}.
inline std::vector<VerifyEntry> verify_gap_residual(const std::vector<GapSolution>& sols) {
  using detail::entry;
  double res = 0.0, min_delta = std::numeric_limits<double>::infinity(), max_f = -std::numeric_limits<double>::infinity();
  double gap_excess = -std::numeric_limits<double>::infinity();
  bool converged = true;
  for (const auto& s : sols) {
    res = std::max(res, s.residual);
    converged = converged && s.converged;
    for (double d : s.delta) min_delta = std::min(min_delta, d);
    max_f = std::max(max_f, bcs_functional(s));
    gap_excess = std::max(gap_excess, s.xi - s.delta_fermi);
  }
  return {detail::flag(2, "all solves converged", converged),
          entry(2, "max doubled-grid relative residual", res, 1e-10, 0.0, Check::AtMost),
          entry(2, "min Delta over nodes (> 0)", min_delta, 0.0, 0.0, Check::Above),
          entry(2, "max BCS functional (< 0)", max_f, 0.0, 0.0, Check::Below),
          entry(2, "max (Xi - Delta(sqrt mu)) (<= 0)", gap_excess, 0.0, 0.0, Check::AtMost)};
}

/// Criterion 3: Delta_{mu,V}(p) against mu Delta_{1, sqrt(mu) V_sqrt(mu)}(p / sqrt(mu)).
inline std::vector<VerifyEntry> verify_scaling(const Potential& pot, std::vector<GapSolution>* solutions = nullptr) {
  double worst = 0.0;
  std::string where;
  for (double mu : {0.25, 0.04}) {
    const GapSolution direct = solve_gap(pot, mu);
    const GapSolution unit = solve_gap(scale_potential(pot, mu), 1.0);
    const double sq = std::sqrt(mu);
    const double p_hi = std::min(20.0 * sq, 0.5 * direct.grid.p_max());
    for (int k = 0; k < 20; ++k) {
      const double p = 0.02 * sq * std::pow(p_hi / (0.02 * sq), k / 19.0);
      const double lhs = direct.profile(p);
      const double rhs = rescaled_delta(unit, mu, p);
      const double rel = std::abs(lhs - rhs) / std::abs(lhs);
      if (rel >= worst) {
        worst = rel;
        where = "mu = " + detail::fmt("%g", mu) + ", p = " + detail::fmt("%.4g", p);
      }
    }
    if (solutions) {
      solutions->push_back(direct);
      solutions->push_back(unit);
    }
  }
  return {detail::entry(3, "max relative deviation at 20 p for mu in {0.25, 0.04}", worst, 0.0, 1e-6, Check::AtMost,
                        "worst at " + where)};
}

/// Constant-Delta defect m_mu 2 pi^2 / sqrt(mu) - (ln(1/x) - 2 + ln 8) at Delta = x mu.
inline double constant_delta_defect(double x, double mu = 1.0, double p_max = 200.0) {
  const double m = m_mu_split(mu, [d = x * mu](double) { return d; }, p_max);
  return m * 2.0 * pi * pi / std::sqrt(mu) - (std::log(1.0 / x) - 2.0 + std::log(8.0));
}

/// Criterion 4: split vs direct m_mu on every solution, and the constant-Delta defect.
inline std::vector<VerifyEntry> verify_m_mu(const std::vector<GapSolution>& sols,
                                           const std::vector<SweepRow>& rows = {}) {
  double worst = 0.0;
  std::size_t count = 0;
  for (const auto& s : sols) {
    const double split = m_mu_split(s), direct = m_mu_direct(s);
    worst = std::max(worst, std::abs(split - direct) / std::abs(split));
    ++count;
  }
  for (const auto& r : rows) {
    if (!std::isfinite(r.m_mu) || !std::isfinite(r.m_mu_direct)) continue;
    worst = std::max(worst, std::abs(r.m_mu - r.m_mu_direct) / std::abs(r.m_mu));
    ++count;
  }
  std::vector<double> defects;
  for (double x : {1e-3, 1e-5, 1e-7}) defects.push_back(constant_delta_defect(x));
  return {detail::entry(4, "max |m_split - m_direct| / |m_split| over " + std::to_string(count) + " solutions", worst,
                        0.0, 1e-6, Check::AtMost),
          detail::flag(4, "constant-Delta defect decreasing over x in {1e-3, 1e-5, 1e-7}",
                       detail::strictly_decreasing_abs(defects), "defects " + detail::list(defects))};
}

// ---------------------------------------------------------------------------
// sweep criteria

struct SweepData {
  Potential pot = Potential::zero();
  double a = 0.0;
  std::vector<SweepRow> rows;
  double seconds = 0.0;
};

inline SweepData run_acceptance_sweep(const VerifyConfig& cfg) {
  SweepData data;
  data.pot = cfg.sweep_pot;
  data.a = scattering_length(cfg.sweep_pot);
  // a hair above the floor so rounding cannot push the last point below it
  const double mu_min = mu_floor(data.a) * (1.0 + 1e-9);
  SweepOptions opts;
  opts.gap.scattering_length = data.a;
  opts.hs_diagnostic = cfg.hs_diagnostic;
  opts.threads = cfg.threads;
  const auto t0 = std::chrono::steady_clock::now();
  data.rows = sweep(cfg.sweep_pot, geometric_mu_list(cfg.sweep_mu_max, mu_min, cfg.sweep_points), opts,
                    [&](const SweepRow& r) {
                      if (cfg.log) cfg.log("  sweep mu = " + detail::fmt("%.4e", r.mu) + ": " + r.status);
                    });
  data.seconds = detail::seconds_since(t0);
  return data;
}

namespace detail {

inline std::vector<double> tail_values(const std::vector<SweepRow>& rows, std::size_t n,
                                       const std::function<double(const SweepRow&)>& f) {
  std::vector<double> v;
  for (std::size_t i = rows.size() - std::min(n, rows.size()); i < rows.size(); ++i) v.push_back(f(rows[i]));
  return v;
}

}  // namespace detail

/// Criterion 5: D(mu) -> 2 - ln 8 over the sweep.
inline std::vector<VerifyEntry> verify_constant(const SweepData& d) {
  using detail::entry;
  std::vector<VerifyEntry> out;
  const auto& rows = d.rows;
  const bool all_ok = std::all_of(rows.begin(), rows.end(), [](const SweepRow& r) { return r.ok(); });
  std::string failures;
  for (const auto& r : rows)
    if (!r.ok()) failures += detail::fmt("mu=%.3e: ", r.mu) + r.status + "; ";
  out.push_back(detail::flag(5, "every sweep point solved", all_ok, failures));
  out.push_back(entry(5, "sweep points", static_cast<double>(rows.size()), 8.0, 0.0, Check::AtLeast));
  if (rows.size() < 4) return out;
  const SweepRow& last = rows.back();
  out.push_back(entry(5, "sqrt(mu_min)|a| (>= floor)", std::sqrt(last.mu) * std::abs(d.a), representable_floor,
                      1e-6 * representable_floor, Check::AtLeast));
  const auto x = detail::tail_values(rows, 4, [](const SweepRow& r) { return std::sqrt(r.mu); });
  const auto y = detail::tail_values(rows, 4, [](const SweepRow& r) { return r.D; });
  const auto [d_inf, slope] = detail::linear_fit(x, y);
  out.push_back(entry(5, "|D_inf - (2 - ln 8)|, fit D = D_inf + c sqrt(mu) on the smallest four", std::abs(d_inf - gap_constant_target),
                      0.0, 0.05, Check::AtMost, "D_inf = " + detail::fmt("%.6f", d_inf) + ", c = " + detail::fmt("%.4f", slope)));
  out.push_back(entry(5, "|D(mu_min) - (2 - ln 8)|", std::abs(last.D - gap_constant_target), 0.0, 0.15, Check::AtMost,
                      "D(mu_min) = " + detail::fmt("%.6f", last.D)));
  out.push_back(entry(5, "sweep wall time [s]", d.seconds, 900.0, 0.0, Check::AtMost));
  return out;
}

/// Criterion 6: Xi / T_c -> pi e^{-gamma}.
inline std::vector<VerifyEntry> verify_ratio(const SweepData& d) {
  using detail::entry;
  const auto& rows = d.rows;
  if (rows.size() < 4) return {detail::flag(6, "sweep long enough", false)};
  const auto x = detail::tail_values(rows, 4, [](const SweepRow& r) { return std::sqrt(r.mu); });
  const auto y = detail::tail_values(rows, 4, [](const SweepRow& r) { return r.ratio; });
  const double r_inf = detail::linear_fit(x, y).first;
  const auto dev = detail::tail_values(rows, 3, [](const SweepRow& r) { return r.ratio - universal_ratio; });
  return {entry(6, "|ratio_inf - pi e^-gamma| / pi e^-gamma", std::abs(r_inf - universal_ratio) / universal_ratio, 0.0,
                0.05, Check::AtMost, "ratio_inf = " + detail::fmt("%.12f", r_inf)),
          detail::flag(6, "|ratio - pi e^-gamma| decreasing on the smallest three", detail::strictly_decreasing_abs(dev),
                       "deviations " + detail::list(dev))};
}

/// Criterion 7: m_mu -> -1/(4 pi a).
inline std::vector<VerifyEntry> verify_bs_link(const SweepData& d) {
  const auto err = detail::tail_values(d.rows, 3, [](const SweepRow& r) { return r.m_error(); });
  return {detail::flag(7, "|m_mu + 1/(4 pi a)| / |1/(4 pi a)| decreasing on the smallest three",
                       detail::strictly_decreasing_abs(err), "errors " + detail::list(err))};
}

/// Criterion 8: Delta(sqrt mu)/mu -> 0 and ||A||_2 / m_mu decreasing.
inline std::vector<VerifyEntry> verify_diagnostics(const SweepData& d, bool hs) {
  std::vector<double> x;
  for (const auto& r : d.rows) x.push_back(r.delta_fermi / r.mu);
  // at large mu the ratio may first grow; the limit statement concerns the small-mu end
  const std::vector<double> half(x.begin() + static_cast<std::ptrdiff_t>(x.size() / 2), x.end());
  const double peak = x.empty() ? NAN : *std::max_element(x.begin(), x.end());
  std::vector<VerifyEntry> out{
      detail::flag(8, "Delta(sqrt mu)/mu decreasing on the small-mu half of the sweep",
                   detail::strictly_decreasing_abs(half), "values " + detail::list(x)),
      detail::entry(8, "Delta(sqrt mu_min)/mu_min relative to its sweep maximum", x.empty() ? NAN : x.back() / peak,
                    1e-3, 0.0, Check::AtMost)};
  if (hs) {
    const auto ratio = detail::tail_values(d.rows, 3, [](const SweepRow& r) { return r.a_hs_ratio; });
    out.push_back(detail::flag(8, "||A||_2 / m_mu decreasing over the smallest three", detail::strictly_decreasing_abs(ratio),
                               "ratios " + detail::list(ratio)));
    out.push_back(detail::entry(8, "sweep wall time with diagnostic [s]", d.seconds, 1800.0, 0.0, Check::AtMost));
  }
  return out;
}

// ---------------------------------------------------------------------------
// golden file

struct GoldenQuantity {
  std::string name;
  double value = 0.0;
  double rel_tol = 0.0;
};

inline std::vector<GoldenQuantity> golden_quantities() {
  std::vector<GoldenQuantity> q;
  for (const char* spec : {"gaussian:1:1", "exponential:1:1", "squarewell:1:1"})
    q.push_back({std::string("a_bs ") + spec, scattering_length(parse_potential(spec)), 1e-9});
  const Potential g = make_potential(Family::Gaussian, 1.0, 1.0);
  q.push_back({"l32 gaussian:1:1", g.norms().l32, 1e-12});
  const double mu = 0.1;
  const GapSolution sol = solve_gap(g, mu);
  q.push_back({"delta_fermi gaussian:1:1 mu=0.1", sol.delta_fermi, 1e-8});
  q.push_back({"xi gaussian:1:1 mu=0.1", sol.xi, 1e-8});
  q.push_back({"m_mu gaussian:1:1 mu=0.1", m_mu_split(sol), 1e-8});
  const TcResult tc = critical_temperature(g, mu);
  q.push_back({"tc gaussian:1:1 mu=0.1", tc.tc, 1e-8});
  return q;
}

inline nlohmann::ordered_json golden_document(const std::vector<GoldenQuantity>& q) {
  nlohmann::ordered_json doc;
  doc["schema"] = 1;
  doc["settings"] = {{"gap_tol", GapOptions{}.tol},
                     {"grid", to_json(GridParams{0.0, 0.0, 16, 96, 32})},
                     {"grid_note", "zero inner_scale and p_max select the automatic values"},
                     {"scattering_rel_tol", 1e-8},
                     {"tc_rel_width", TcOptions{}.rel_width}};
  auto& arr = doc["values"] = nlohmann::ordered_json::array();
  for (const auto& g : q) arr.push_back({{"name", g.name}, {"value", g.value}, {"rel_tol", g.rel_tol}});
  return doc;
}

inline std::vector<VerifyEntry> verify_golden(const std::string& path) {
  std::vector<VerifyEntry> out;
  nlohmann::json doc;
  try {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path);
    doc = nlohmann::json::parse(in);
  } catch (const std::exception& e) {
    return {detail::flag(0, "golden file readable", false, e.what())};
  }
  std::map<std::string, std::pair<double, double>> stored;
  try {
    for (const auto& v : doc.at("values"))
      stored[v.at("name").get<std::string>()] = {v.at("value").get<double>(), v.at("rel_tol").get<double>()};
  } catch (const std::exception& e) {
    return {detail::flag(0, "golden file well-formed", false, e.what())};
  }
  for (const auto& q : golden_quantities()) {
    const auto it = stored.find(q.name);
    if (it == stored.end()) {
      out.push_back(detail::flag(0, "golden " + q.name, false, "missing from golden file"));
      continue;
    }
    const auto [value, tol] = it->second;
    out.push_back(detail::entry(0, "golden " + q.name, std::abs(q.value - value) / std::abs(value), 0.0, tol,
                                Check::AtMost, "computed " + detail::fmt("%.15g", q.value) + ", stored " +
                                                   detail::fmt("%.15g", value)));
  }
  return out;
}

// ---------------------------------------------------------------------------

inline VerifyReport verify(const VerifyConfig& cfg, Profile profile) {
  VerifyReport rep;
  rep.profile = profile == Profile::Quick ? "quick" : "full";
  auto log = [&](const std::string& s) {
    if (cfg.log) cfg.log(s);
  };
  auto timed = [&](int c, const std::function<std::vector<VerifyEntry>()>& fn) {
    const auto t0 = std::chrono::steady_clock::now();
    std::vector<VerifyEntry> es;
    try {
      es = fn();
    } catch (const std::exception& e) {
      es = {detail::flag(c, "criterion ran", false, std::string("exception: ") + e.what())};
    }
    const double s = detail::seconds_since(t0);
    rep.seconds[c] += s;
    for (auto& e : es) rep.entries.push_back(std::move(e));
    log("criterion " + std::to_string(c) + " done in " + detail::fmt("%.1f", s) + " s");
  };

  timed(1, [&] {
    const auto t0 = std::chrono::steady_clock::now();
    auto es = verify_scattering();
    es.push_back(detail::entry(1, "wall time [s]", detail::seconds_since(t0), 30.0, 0.0, Check::AtMost));
    return es;
  });

  std::vector<GapSolution> base;
  timed(2, [&] {
    const auto t0 = std::chrono::steady_clock::now();
    for (double mu : criterion2_mus()) base.push_back(solve_gap(cfg.pot, mu));
    auto es = verify_gap_residual(base);
    es.push_back(detail::entry(2, "wall time [s]", detail::seconds_since(t0), 120.0, 0.0, Check::AtMost));
    return es;
  });

  std::vector<GapSolution> scaled;
  timed(3, [&] { return verify_scaling(cfg.pot, &scaled); });

  std::optional<SweepData> data;
  if (profile == Profile::Full) {
    log("running the low-density sweep on " + cfg.sweep_pot.to_string());
    try {
      data = run_acceptance_sweep(cfg);
    } catch (const std::exception& e) {
      for (int c = 5; c <= 8; ++c)
        rep.entries.push_back(detail::flag(c, "sweep ran", false, std::string("exception: ") + e.what()));
    }
  }

  timed(4, [&] {
    std::vector<GapSolution> all = base;
    all.insert(all.end(), scaled.begin(), scaled.end());
    return verify_m_mu(all, data ? data->rows : std::vector<SweepRow>{});
  });

  if (data) {
    timed(5, [&] { return verify_constant(*data); });
    timed(6, [&] { return verify_ratio(*data); });
    timed(7, [&] { return verify_bs_link(*data); });
    timed(8, [&] { return verify_diagnostics(*data, cfg.hs_diagnostic); });
  }

  if (!cfg.golden_path.empty()) timed(0, [&] { return verify_golden(cfg.golden_path); });
  return rep;
}

inline const char* check_name(Check c) {
  switch (c) {
    case Check::AtMost: return "<=";
    case Check::Below: return "<";
    case Check::AtLeast: return ">=";
    case Check::Above: return ">";
    case Check::Equal: return "==";
  }
  return "?";
}

inline nlohmann::ordered_json to_json(const VerifyReport& rep) {
  nlohmann::ordered_json j;
  j["schema"] = report_schema_version;
  j["profile"] = rep.profile;
  auto& arr = j["entries"] = nlohmann::ordered_json::array();
  for (const auto& e : rep.entries)
    arr.push_back({{"criterion", e.criterion},
                   {"name", e.name},
                   {"measured", detail::num(e.measured)},
                   {"target", e.target},
                   {"tolerance", e.tolerance},
                   {"comparison", check_name(e.check)},
                   {"pass", e.pass},
                   {"detail", e.detail}});
  auto& crit = j["criteria"] = nlohmann::ordered_json::object();
  for (int c : rep.criteria()) crit[std::to_string(c)] = rep.criterion_pass(c);
  j["overall"] = rep.overall();
  return j;
}

}  // namespace bcsgap
