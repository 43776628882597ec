#pragma once

// Low-density sweep: gap, energy gap, T_c and m_mu at each mu of a list,
// solved in parallel and emitted in list order.

#include <algorithm>
#include <atomic>
#include <cmath>
#include <condition_variable>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <limits>
#include <mutex>
#include <ostream>
#include <string>
#include <string_view>
#include <thread>
#include <vector>

#include "bcsgap/asymptotics.hpp"
#include "bcsgap/errors.hpp"
#include "bcsgap/gap_solver.hpp"
#include "bcsgap/potentials.hpp"
#include "bcsgap/scattering.hpp"
#include "bcsgap/tc_solver.hpp"

namespace bcsgap {

inline constexpr int sweep_csv_version = 1;

struct SweepGridMeta {
  std::size_t nodes = 0;
  double inner_scale = 0.0;
  double p_max = 0.0;
  std::size_t tc_nodes = 0;
  double tc_inner_scale = 0.0;

  std::string to_string() const;
};

struct SweepRow {
  static constexpr double nan = std::numeric_limits<double>::quiet_NaN();

  double mu = nan;
  double a = nan;
  double delta_fermi = nan;
  double xi = nan;
  double tc = nan;
  double m_mu = nan;
  double m_pred = nan;
  double D = nan;
  double D_target = gap_constant_target;
  double ratio = nan;
  double ratio_target = universal_ratio;
  double xi_pred = nan;
  double tc_pred = nan;
  double residual = nan;
  std::size_t iterations = 0;
  SweepGridMeta grid_meta;

  double m_mu_direct = nan;
  double a_hs_ratio = nan;
  std::string status = "ok";

  bool ok() const noexcept { return status == "ok"; }
  /// |m_mu + 1/(4 pi a)| / |1/(4 pi a)|
  double m_error() const { return std::abs(m_mu - m_pred) / std::abs(m_pred); }
};

struct SweepOptions {
  GapOptions gap;
  TcOptions tc;
  bool hs_diagnostic = false;
  HsOptions hs;
  std::size_t threads = 0;  // 0: BCSGAP_THREADS or the hardware count
};

/// n values geometric from a to b inclusive.
inline std::vector<double> geometric_mu_list(double a, double b, std::size_t n) {
  if (!(a > 0.0 && b > 0.0)) throw InvalidArgument("geometric mu range needs positive endpoints");
  std::vector<double> mus;
  if (n == 0) return mus;
  if (n == 1) return {a};
  for (std::size_t i = 0; i < n; ++i)
    mus.push_back(a * std::pow(b / a, static_cast<double>(i) / static_cast<double>(n - 1)));
  mus.back() = b;
  return mus;
}

/// "a:b:n" -> geometric_mu_list(a, b, n).
inline std::vector<double> parse_mu_range(std::string_view text) {
  const std::string s(text);
  const auto c1 = s.find(':');
  const auto c2 = c1 == std::string::npos ? std::string::npos : s.find(':', c1 + 1);
  if (c2 == std::string::npos) throw InvalidArgument("mu range must be a:b:n, got '" + s + "'");
  try {
    std::size_t used = 0;
    const std::string sa = s.substr(0, c1), sb = s.substr(c1 + 1, c2 - c1 - 1), sn = s.substr(c2 + 1);
    const double a = std::stod(sa, &used);
    if (used != sa.size()) throw std::invalid_argument(sa);
    const double b = std::stod(sb, &used);
    if (used != sb.size()) throw std::invalid_argument(sb);
    const long n = std::stol(sn, &used);
    if (used != sn.size() || n < 0) throw std::invalid_argument(sn);
    return geometric_mu_list(a, b, static_cast<std::size_t>(n));
  } catch (const std::logic_error&) {
    throw InvalidArgument("mu range must be a:b:n, got '" + s + "'");
  }
}

inline std::size_t sweep_threads(std::size_t requested) {
  std::size_t n = requested;
  if (n == 0) {
    n = std::max(1u, std::thread::hardware_concurrency());
    if (const char* env = std::getenv("BCSGAP_THREADS")) {
      const long cap = std::strtol(env, nullptr, 10);
      if (cap > 0) n = std::min(n, static_cast<std::size_t>(cap));
    }
  }
  return std::max<std::size_t>(1, n);
}

/// One row; failures are recorded in status.
inline SweepRow sweep_point(const Potential& pot, double mu, double a, const SweepOptions& opts) {
  SweepRow row;
  row.mu = mu;
  row.a = a;
  try {
    const Predictions pred = predictions(mu, a);
    row.m_pred = pred.m_pred;
    row.xi_pred = pred.xi_pred;
    row.tc_pred = pred.tc_pred;

    GapOptions gopts = opts.gap;
    gopts.scattering_length = a;
    const GapSolution sol = solve_gap(pot, mu, gopts);
    row.delta_fermi = sol.delta_fermi;
    row.xi = sol.xi;
    row.residual = sol.residual;
    row.iterations = sol.iterations;
    row.grid_meta.nodes = sol.grid.size();
    row.grid_meta.inner_scale = sol.grid.inner_scale();
    row.grid_meta.p_max = sol.grid.p_max();
    row.m_mu = m_mu_split(sol);
    row.m_mu_direct = m_mu_direct(sol);
    row.D = diagnostic_D(mu, sol.xi, a);
    if (!sol.converged) {
      row.status = "unconverged: residual above tolerance";
      return row;
    }

    TcOptions topts = opts.tc;
    topts.scattering_length = a;
    const TcResult tc = critical_temperature(pot, mu, topts);
    row.tc = tc.tc;
    row.ratio = sol.xi / tc.tc;
    row.grid_meta.tc_inner_scale = tc.grid.inner_scale;
    row.grid_meta.tc_nodes = build_grid(mu, tc.grid).size();
    if (!tc.monotone) row.status = "warning: lambda_min not monotone across the T_c bracket";

    if (opts.hs_diagnostic) {
      try {
        row.a_hs_ratio = a_hs_norm(sol, opts.hs).ratio;
      } catch (const PartialResultError& e) {
        row.a_hs_ratio = e.estimate();
        row.status = std::string("partial: ") + e.what();
      }
    }
  } catch (const std::exception& e) {
    row.status = std::string("error: ") + e.what();
  }
  return row;
}

/// Solves every mu (in parallel) and hands rows to on_row in list order as soon
/// as each prefix is complete.  The scattering length is computed once.
inline std::vector<SweepRow> sweep(const Potential& pot, const std::vector<double>& mus, const SweepOptions& opts = {},
                                   const std::function<void(const SweepRow&)>& on_row = {}) {
  std::vector<SweepRow> rows(mus.size());
  if (mus.empty()) return rows;
  double a = opts.gap.scattering_length;
  if (std::isnan(a)) a = scattering_length(pot);

  std::vector<char> done(mus.size(), 0);
  std::mutex mtx;
  std::condition_variable cv;
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < mus.size(); i = next++) {
      SweepRow row = sweep_point(pot, mus[i], a, opts);
      std::lock_guard<std::mutex> lock(mtx);
      rows[i] = std::move(row);
      done[i] = 1;
      cv.notify_all();
    }
  };
  const std::size_t n_threads = std::min(sweep_threads(opts.threads), mus.size());
  std::vector<std::thread> pool;
  for (std::size_t t = 0; t < n_threads; ++t) pool.emplace_back(worker);
  for (std::size_t i = 0; i < mus.size(); ++i) {
    std::unique_lock<std::mutex> lock(mtx);
    cv.wait(lock, [&] { return done[i] != 0; });
    lock.unlock();
    if (on_row) on_row(rows[i]);
  }
  for (auto& t : pool) t.join();
  return rows;
}

// CSV

namespace detail {

inline std::string fmt_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

inline std::string csv_quote(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c == '\n' ? ' ' : c;
  }
  return out + "\"";
}

}  // namespace detail

inline std::string SweepGridMeta::to_string() const {
  return "nodes=" + std::to_string(nodes) + ";inner_scale=" + detail::fmt_double(inner_scale) +
         ";p_max=" + detail::fmt_double(p_max) + ";tc_nodes=" + std::to_string(tc_nodes) +
         ";tc_inner_scale=" + detail::fmt_double(tc_inner_scale);
}

inline void write_sweep_csv_header(std::ostream& os) {
  os << "# bcsgap sweep v" << sweep_csv_version << "\n"
     << "mu,a,delta_fermi,xi,tc,m_mu,m_pred,D,D_target,ratio,ratio_target,xi_pred,tc_pred,residual,iterations,"
        "grid_meta,m_mu_direct,a_hs_ratio,status\n";
}

inline void write_sweep_csv_row(std::ostream& os, const SweepRow& r) {
  using detail::fmt_double;
  const double fields[] = {r.mu, r.a, r.delta_fermi, r.xi, r.tc, r.m_mu, r.m_pred, r.D, r.D_target,
                           r.ratio, r.ratio_target, r.xi_pred, r.tc_pred, r.residual};
  for (double f : fields) os << fmt_double(f) << ',';
  os << r.iterations << ',' << r.grid_meta.to_string() << ',' << fmt_double(r.m_mu_direct) << ','
     << fmt_double(r.a_hs_ratio) << ',' << detail::csv_quote(r.status) << '\n';
}

}  // namespace bcsgap
