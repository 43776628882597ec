// bcsgap: command-line front end.
//
// Exit codes: 0 success, 1 verification failure, 2 invalid arguments,
// 3 numeric failure.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "bcsgap/admissibility.hpp"
#include "bcsgap/asymptotics.hpp"
#include "bcsgap/errors.hpp"
#include "bcsgap/gap_solver.hpp"
#include "bcsgap/json_io.hpp"
#include "bcsgap/potentials.hpp"
#include "bcsgap/radial_quadrature.hpp"
#include "bcsgap/scattering.hpp"
#include "bcsgap/sweep.hpp"
#include "bcsgap/tc_solver.hpp"
#include "bcsgap/verify.hpp"

#ifndef BCSGAP_GOLDEN_DEFAULT
#define BCSGAP_GOLDEN_DEFAULT ""
#endif

namespace {

using namespace bcsgap;

enum Exit { ok = 0, verification_failed = 1, invalid_args = 2, numeric_failure = 3 };

struct Common {
  std::string potential = "gaussian:1:1";
  std::optional<double> mu;
  std::string mu_range;
  std::vector<double> mu_list;
  double tol = GapOptions{}.tol;
  std::size_t max_iter = GapOptions{}.max_iter;
  double damping = GapOptions{}.damping;
  std::string out;
  std::string format = "json";
  bool hs = false;
};

/// stdout or the --out file.
class Output {
 public:
  explicit Output(const std::string& path) {
    if (!path.empty()) {
      file_ = std::make_unique<std::ofstream>(path);
      if (!*file_) throw InvalidArgument("cannot open output file " + path);
    }
  }
  std::ostream& stream() { return file_ ? *file_ : std::cout; }

 private:
  std::unique_ptr<std::ofstream> file_;
};

GapOptions gap_options(const Common& c) {
  GapOptions o;
  o.tol = c.tol;
  o.max_iter = c.max_iter;
  o.damping = c.damping;
  return o;
}

double require_mu(const Common& c) {
  if (!c.mu) throw InvalidArgument("--mu is required");
  return *c.mu;
}

void print_json(const Common& c, const json& j) {
  Output out(c.out);
  out.stream() << j.dump(2) << '\n';
}

// "a:b:n" where b may be the word floor
std::vector<double> mu_values(const Common& c, double a) {
  std::vector<double> mus = c.mu_list;
  if (c.mu) mus.push_back(*c.mu);
  if (!c.mu_range.empty()) {
    std::string range = c.mu_range;
    const auto c1 = range.find(':');
    const auto c2 = c1 == std::string::npos ? c1 : range.find(':', c1 + 1);
    if (c2 != std::string::npos && range.substr(c1 + 1, c2 - c1 - 1) == "floor") {
      char buf[40];
      std::snprintf(buf, sizeof buf, "%.17g", mu_floor(a) * (1.0 + 1e-9));
      range = range.substr(0, c1 + 1) + buf + range.substr(c2);
    }
    const auto r = parse_mu_range(range);
    mus.insert(mus.end(), r.begin(), r.end());
  }
  return mus;
}

int cmd_scatlen(const Common& c) {
  const Potential pot = parse_potential(c.potential);
  const ScatteringResult r = scatter(pot);
  json j{{"potential", to_json(pot)}};
  j.update(to_json(r));
  print_json(c, j);
  return ok;
}

int cmd_check(const Common& c) {
  const Potential pot = parse_potential(c.potential);
  json j{{"potential", to_json(pot)}};
  j.update(to_json(check_admissible(pot)));
  print_json(c, j);
  return ok;
}

int cmd_gap(const Common& c) {
  const Potential pot = parse_potential(c.potential);
  const GapSolution sol = solve_gap(pot, require_mu(c), gap_options(c));
  if (c.format == "csv") {
    Output out(c.out);
    auto& os = out.stream();
    os << "p,weight,xi,delta,E\n";
    for (std::size_t i = 0; i < sol.grid.size(); ++i) {
      char buf[160];
      std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g,%.17g,%.17g\n", sol.grid.nodes[i], sol.grid.weights[i],
                    sol.grid.xi[i], sol.delta[i], sol.dispersion[i]);
      os << buf;
    }
    return sol.converged ? ok : numeric_failure;
  }
  json j{{"potential", to_json(pot)}, {"solution", to_json(sol)}};
  j["bcs_functional"] = detail::num(bcs_functional(sol));
  j["asymptotics"] = to_json(asymptotics_report(sol, c.hs));
  print_json(c, j);
  return sol.converged ? ok : numeric_failure;
}

int cmd_tc(const Common& c) {
  const Potential pot = parse_potential(c.potential);
  const TcResult r = critical_temperature(pot, require_mu(c));
  json j{{"potential", to_json(pot)}};
  j.update(to_json(r));
  print_json(c, j);
  return ok;
}

int cmd_sweep(const Common& c) {
  const Potential pot = parse_potential(c.potential);
  SweepOptions opts;
  opts.gap = gap_options(c);
  opts.hs_diagnostic = c.hs;
  std::vector<double> mus;
  if (!c.mu_list.empty() || c.mu || !c.mu_range.empty()) {
    opts.gap.scattering_length = scattering_length(pot);
    mus = mu_values(c, opts.gap.scattering_length);
  }
  Output out(c.out);
  auto& os = out.stream();
  if (c.format == "csv") {
    if (!mus.empty()) write_sweep_csv_header(os);
    sweep(pot, mus, opts, [&](const SweepRow& r) {
      write_sweep_csv_row(os, r);
      os.flush();
    });
  } else {
    json rows = json::array();
    for (const auto& r : sweep(pot, mus, opts)) rows.push_back(to_json(r));
    os << json{{"schema", report_schema_version}, {"potential", to_json(pot)}, {"rows", rows}}.dump(2) << '\n';
  }
  return ok;
}

int cmd_grid_dump(const Common& c, GridParams params) {
  const Potential pot = parse_potential(c.potential);
  const double mu = require_mu(c);
  if (!(params.p_max > 0.0)) params.p_max = pot.default_p_max();
  const RadialGrid g = build_grid(mu, params);
  if (c.format == "csv") {
    Output out(c.out);
    write_grid_csv(out.stream(), g);
  } else {
    print_json(c, grid_to_json(g));
  }
  return ok;
}

struct VerifyArgs {
  std::string profile = "quick";
  std::string sweep_potential;
  std::string golden = BCSGAP_GOLDEN_DEFAULT;
  std::string write_golden;
  std::size_t sweep_points = 8;
  bool quiet = false;
};

int cmd_verify(const Common& c, const VerifyArgs& v) {
  if (!v.write_golden.empty()) {
    std::ofstream f(v.write_golden);
    if (!f) throw InvalidArgument("cannot open " + v.write_golden);
    f << golden_document(golden_quantities()).dump(2) << '\n';
    return ok;
  }
  VerifyConfig cfg;
  cfg.pot = parse_potential(c.potential);
  if (!v.sweep_potential.empty()) cfg.sweep_pot = parse_potential(v.sweep_potential);
  cfg.sweep_points = v.sweep_points;
  cfg.hs_diagnostic = c.hs;
  cfg.golden_path = v.golden;
  if (!v.quiet) cfg.log = [](const std::string& s) { std::cerr << s << std::endl; };
  const VerifyReport rep = verify(cfg, parse_profile(v.profile));
  print_json(c, to_json(rep));
  return rep.overall() ? ok : verification_failed;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"BCS gap equation, scattering length and low-density asymptotics"};
  app.require_subcommand(1);
  Common c;
  GridParams grid{1e-6, 0.0, 16, 96, 32};
  VerifyArgs v;

  auto add_potential = [&](CLI::App* sub) {
    sub->add_option("potential", c.potential, "family:depth:range, e.g. gaussian:1:1")->capture_default_str();
  };
  std::string gap_format = "json", sweep_format = "csv", dump_format = "csv";
  auto add_out = [&](CLI::App* sub, std::string* format) {
    sub->add_option("--out", c.out, "write to this file instead of stdout");
    if (format)
      sub->add_option("--format", *format, "csv or json")->check(CLI::IsMember({"csv", "json"}))->capture_default_str();
  };
  auto add_solver = [&](CLI::App* sub) {
    sub->add_option("--tol", c.tol, "doubled-grid residual tolerance")->capture_default_str();
    sub->add_option("--max-iter", c.max_iter, "iteration cap")->capture_default_str();
    sub->add_option("--damping", c.damping, "fixed-point damping in (0, 1]")->capture_default_str();
  };

  auto* scat = app.add_subcommand("scatlen", "scattering length (Birman-Schwinger and ODE oracle)");
  add_potential(scat);
  add_out(scat, nullptr);

  auto* check = app.add_subcommand("check-potential", "admissibility report");
  add_potential(check);
  add_out(check, nullptr);

  auto* gap = app.add_subcommand("gap", "solve the zero-temperature gap equation at one mu");
  add_potential(gap);
  gap->add_option("--mu", c.mu, "chemical potential")->required();
  add_solver(gap);
  add_out(gap, &gap_format);
  gap->add_flag("--hs-diagnostic", c.hs, "also evaluate ||A||_2 / m_mu");

  auto* tc = app.add_subcommand("tc", "critical temperature at one mu");
  add_potential(tc);
  tc->add_option("--mu", c.mu, "chemical potential")->required();
  add_out(tc, nullptr);

  auto* sw = app.add_subcommand("sweep", "low-density sweep over a list of mu");
  add_potential(sw);
  sw->add_option("--mu", c.mu_list, "mu value (repeatable)");
  sw->add_option("--mu-range", c.mu_range, "a:b:n, n values geometric from a to b; b may be 'floor'");
  add_solver(sw);
  add_out(sw, &sweep_format);
  sw->add_flag("--hs-diagnostic", c.hs, "add the ||A||_2 / m_mu column");

  auto* ver = app.add_subcommand("verify", "run the acceptance criteria");
  add_potential(ver);
  ver->add_option("--profile", v.profile, "quick or full")->check(CLI::IsMember({"quick", "full"}))->capture_default_str();
  ver->add_option("--sweep-potential", v.sweep_potential, "potential for the low-density sweep (default gaussian:1.3:1)");
  ver->add_option("--sweep-points", v.sweep_points, "number of sweep points")->capture_default_str();
  ver->add_option("--golden", v.golden, "golden reference file ('' to skip)")->capture_default_str();
  ver->add_option("--write-golden", v.write_golden, "regenerate the golden file at this path and exit");
  ver->add_flag("--hs-diagnostic", c.hs, "include the ||A||_2 / m_mu decay check");
  ver->add_flag("--quiet", v.quiet, "no progress on stderr");
  add_out(ver, nullptr);

  auto* dump = app.add_subcommand("grid-dump", "print the momentum grid");
  add_potential(dump);
  dump->add_option("--mu", c.mu, "chemical potential")->required();
  dump->add_option("--inner-scale", grid.inner_scale, "Fermi-surface resolution in |p^2-mu|/mu")->capture_default_str();
  dump->add_option("--p-max", grid.p_max, "cutoff (default from the potential)");
  dump->add_option("--n-inner", grid.n_inner, "nodes per decade near the Fermi surface")->capture_default_str();
  dump->add_option("--n-wing", grid.n_wing, "nodes per decade in the wing")->capture_default_str();
  dump->add_option("--n-tail", grid.n_tail, "nodes in the tail")->capture_default_str();
  add_out(dump, &dump_format);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? ok : invalid_args;
  }

  try {
    if (*scat) return cmd_scatlen(c);
    if (*check) return cmd_check(c);
    if (*gap) return c.format = gap_format, cmd_gap(c);
    if (*tc) return cmd_tc(c);
    if (*sw) return c.format = sweep_format, cmd_sweep(c);
    if (*ver) return cmd_verify(c, v);
    if (*dump) return c.format = dump_format, cmd_grid_dump(c, grid);
  } catch (const InvalidArgument& e) {
    std::cerr << "error: " << e.what() << '\n';
    return invalid_args;
  } catch (const RangeError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return invalid_args;
  } catch (const NumericError& e) {
    std::cerr << "numeric failure: " << e.what() << '\n';
    return numeric_failure;
  } catch (const std::exception& e) {
    std::cerr << "numeric failure: " << e.what() << '\n';
    return numeric_failure;
  }
  return invalid_args;
}
