#pragma once

// Numerical check of the hypotheses on V: L^1 and weighted L^1 integrability,
// ||V||_{3/2} < S_3, Vhat <= 0 with Vhat(0) < 0, a < 0 and the Birman-Schwinger
// spectrum above -1.

#include <cmath>
#include <cstddef>
#include <limits>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "bcsgap/constants.hpp"
#include "bcsgap/errors.hpp"
#include "bcsgap/potentials.hpp"
#include "bcsgap/scattering.hpp"

namespace bcsgap {

struct AdmissibilityReport {
  bool l1_finite = false;
  bool weighted_l1_finite = false;
  bool sobolev_ok = false;
  bool vhat_nonpositive = false;
  bool vhat0_negative = false;
  double scattering_length = std::numeric_limits<double>::quiet_NaN();
  bool a_negative = false;
  bool bs_spectrum_ok = false;

  // evidence
  double l1 = std::numeric_limits<double>::quiet_NaN();
  double l32 = std::numeric_limits<double>::quiet_NaN();
  double l1_weighted = std::numeric_limits<double>::quiet_NaN();
  double vhat_max_sample = std::numeric_limits<double>::quiet_NaN();
  double lowest_bs_eigenvalue = std::numeric_limits<double>::quiet_NaN();

  bool all_ok() const noexcept {
    return l1_finite && weighted_l1_finite && sobolev_ok && vhat_nonpositive && vhat0_negative && a_negative &&
           bs_spectrum_ok;
  }
};

/// Number of Vhat samples on [0, 50/sigma].
inline constexpr std::size_t vhat_samples = 10000;

namespace detail {

inline double weighted_l1(const Potential& pot) {
  auto f = [&](double r) { return 4.0 * pi * r * r * (1.0 + r) * std::abs(pot.v_inside(r)); };
  const double upper = pot.compact_support() ? pot.range() : std::numeric_limits<double>::infinity();
  double error = 0.0;
  const double value = boost::math::quadrature::gauss_kronrod<double, 61>::integrate(f, 0.0, upper, 15, 1e-14, &error);
  if (!(error <= 1e-10 * std::abs(value))) throw NumericError("weighted L1 quadrature did not converge", error);
  return value;
}

}  // namespace detail

inline AdmissibilityReport check_admissible(const Potential& pot) {
  AdmissibilityReport rep;
  try {
    rep.l1 = lp_norm(pot, 1.0);
    rep.l1_finite = std::isfinite(rep.l1);
  } catch (const NumericError&) {
  }
  try {
    rep.l1_weighted = detail::weighted_l1(pot);
    rep.weighted_l1_finite = std::isfinite(rep.l1_weighted);
  } catch (const NumericError&) {
  }
  try {
    rep.l32 = lp_norm(pot, 1.5);
    rep.sobolev_ok = rep.l32 < sobolev_constant;
  } catch (const NumericError&) {
  }

  // Vhat <= 0 on a uniform sample of [0, 50/sigma]; beyond it the catalog
  // transforms with a definite sign decay monotonically, which the last
  // samples must confirm
  const double p_end = 50.0 / pot.range();
  double vmax = -std::numeric_limits<double>::infinity();
  bool tail_monotone = true;
  double prev = pot.vhat(0.0);
  for (std::size_t k = 0; k < vhat_samples; ++k) {
    const double p = p_end * static_cast<double>(k) / static_cast<double>(vhat_samples - 1);
    const double v = pot.vhat(p);
    vmax = std::max(vmax, v);
    if (k >= vhat_samples - vhat_samples / 10 && v < prev) tail_monotone = false;
    prev = v;
  }
  rep.vhat_max_sample = vmax;
  rep.vhat_nonpositive = vmax <= 0.0 && tail_monotone && pot.vhat_sign_definite();
  rep.vhat0_negative = pot.vhat(0.0) < 0.0;

  try {
    rep.scattering_length = scattering_length(pot);
    rep.a_negative = rep.scattering_length < 0.0;
  } catch (const NumericError&) {
  }
  if (!pot.is_zero()) {
    rep.lowest_bs_eigenvalue = lowest_bs_eigenvalue(pot);
    rep.bs_spectrum_ok = rep.lowest_bs_eigenvalue > -1.0;
  }
  return rep;
}

}  // namespace bcsgap
