#pragma once

// Catalog of radial model potentials with closed-form position and momentum
// space evaluators.  Units: hbar = 1, 2m = 1, kinetic energy p^2.  Fourier
// convention: Vhat(p) = (2pi)^{-3/2} \int V(x) e^{-ipx} dx.

#include <cmath>
#include <cstdio>
#include <limits>
#include <string>
#include <string_view>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "bcsgap/constants.hpp"
#include "bcsgap/errors.hpp"

namespace bcsgap {

enum class Family { Gaussian, Exponential, SquareWell };

inline std::string family_name(Family f) {
  switch (f) {
    case Family::Gaussian: return "gaussian";
    case Family::Exponential: return "exponential";
    case Family::SquareWell: return "squarewell";
  }
  return "unknown";
}

inline Family parse_family(std::string_view name) {
  if (name == "gaussian") return Family::Gaussian;
  if (name == "exponential") return Family::Exponential;
  if (name == "squarewell" || name == "square_well" || name == "square") return Family::SquareWell;
  throw InvalidArgument("unknown potential family '" + std::string(name) + "'");
}

/// Closed-form norms: l1 = ||V||_1, l32 = ||V||_{3/2}, l1_weighted = \int |V|(1+|x|).
struct Norms {
  double l1 = 0.0;
  double l32 = 0.0;
  double l1_weighted = 0.0;
};

class Potential {
 public:
  /// The identically vanishing potential.  Only reachable through this factory;
  /// make_potential insists on a positive depth.
  static Potential zero() { return Potential(Family::Gaussian, 0.0, 1.0); }

  Family family() const noexcept { return family_; }
  double depth() const noexcept { return depth_; }
  double range() const noexcept { return range_; }
  bool is_zero() const noexcept { return depth_ == 0.0; }
  const Norms& norms() const noexcept { return norms_; }

  double v(double r) const {
    switch (family_) {
      case Family::Gaussian: return -depth_ * std::exp(-r * r / (2.0 * range_ * range_));
      case Family::Exponential: return -depth_ * std::exp(-r / range_);
      case Family::SquareWell: return r < range_ ? -depth_ : 0.0;
    }
    return 0.0;
  }

  /// Left limit V(r^-); differs from v() only at the edge of a compact support.
  double v_inside(double r) const {
    if (family_ == Family::SquareWell) return r <= range_ ? -depth_ : 0.0;
    return v(r);
  }

  double vhat(double p) const {
    const double s = range_;
    const double s3 = s * s * s;
    switch (family_) {
      case Family::Gaussian: return -depth_ * s3 * std::exp(-0.5 * s * s * p * p);
      case Family::Exponential: {
        const double d = 1.0 + s * s * p * p;
        return -8.0 * pi * depth_ * s3 * fourier_norm / (d * d);
      }
      case Family::SquareWell: {
        const double x = p * s;
        double shape;  // (sin x - x cos x) / x^3
        if (x < 1.0) {
          // sum_k (-1)^{k+1} 2k x^{2k-2} / (2k+1)!, continuous with the closed form to ~1e-16
          const double x2 = x * x;
          double term = 1.0 / 3.0;
          shape = term;
          for (int k = 2; k <= 10; ++k) {
            term *= -x2 * k / ((k - 1.0) * (2.0 * k) * (2.0 * k + 1.0));
            shape += term;
          }
        } else {
          shape = (std::sin(x) - x * std::cos(x)) / (x * x * x);
        }
        return -depth_ * 4.0 * pi * s3 * fourier_norm * shape;
      }
    }
    return 0.0;
  }

  /// Vhat has a definite sign for every p (true for the Gaussian and exponential wells).
  bool vhat_sign_definite() const noexcept { return family_ != Family::SquareWell; }

  bool compact_support() const noexcept { return family_ == Family::SquareWell; }

  /// Radius beyond which |V| < threshold (the support edge for a square well).
  double decay_radius(double threshold = 1e-14) const {
    if (is_zero()) return range_;
    if (depth_ <= threshold) return 0.0;
    switch (family_) {
      case Family::Gaussian: return range_ * std::sqrt(2.0 * std::log(depth_ / threshold));
      case Family::Exponential: return range_ * std::log(depth_ / threshold);
      case Family::SquareWell: return range_;
    }
    return range_;
  }

  /// Momentum cutoff at which every quantity of the gap equation is negligible.
  double default_p_max() const {
    return family_ == Family::Exponential ? 400.0 / range_ : 40.0 / range_;
  }

  std::string to_string() const {
    char buf[96];
    std::snprintf(buf, sizeof buf, "%s:%.17g:%.17g", family_name(family_).c_str(), depth_, range_);
    return buf;
  }

  friend Potential make_potential(Family family, double depth, double range);

 private:
  Potential(Family f, double depth, double range) : family_(f), depth_(depth), range_(range) {
    norms_.l1 = closed_form_norm(1.0);
    norms_.l32 = closed_form_norm(1.5);
    norms_.l1_weighted = norms_.l1 + closed_form_first_moment();
  }

  // (\int |V|^q d^3x)^{1/q}
  double closed_form_norm(double q) const {
    if (is_zero()) return 0.0;
    const double s3 = range_ * range_ * range_;
    double integral = 0.0;
    switch (family_) {
      case Family::Gaussian: integral = std::pow(2.0 * pi * range_ * range_ / q, 1.5); break;
      case Family::Exponential: integral = 8.0 * pi * s3 / (q * q * q); break;
      case Family::SquareWell: integral = 4.0 * pi / 3.0 * s3; break;
    }
    return depth_ * std::pow(integral, 1.0 / q);
  }

  // \int |V(x)| |x| d^3x
  double closed_form_first_moment() const {
    const double s4 = range_ * range_ * range_ * range_;
    switch (family_) {
      case Family::Gaussian: return 8.0 * pi * depth_ * s4;
      case Family::Exponential: return 24.0 * pi * depth_ * s4;
      case Family::SquareWell: return pi * depth_ * s4;
    }
    return 0.0;
  }

  Family family_;
  double depth_;
  double range_;
  Norms norms_;
};

inline Potential make_potential(Family family, double depth, double range) {
  if (!(depth > 0.0) || !std::isfinite(depth))
    throw InvalidArgument("potential depth must be positive and finite");
  if (!(range > 0.0) || !std::isfinite(range))
    throw InvalidArgument("potential range must be positive and finite");
  return Potential(family, depth, range);
}

/// Parses "family:depth:range", e.g. "gaussian:1.0:1.0".
inline Potential parse_potential(std::string_view spec) {
  const auto c1 = spec.find(':');
  const auto c2 = c1 == std::string_view::npos ? c1 : spec.find(':', c1 + 1);
  if (c1 == std::string_view::npos || c2 == std::string_view::npos)
    throw InvalidArgument("potential must be given as family:depth:range, got '" +
                          std::string(spec) + "'");
  const Family f = parse_family(spec.substr(0, c1));
  auto number = [&](std::string_view s) {
    std::string str(s);
    std::size_t used = 0;
    double v = 0.0;
    try {
      v = std::stod(str, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used == 0 || used != str.size())
      throw InvalidArgument("malformed number '" + str + "' in potential spec");
    return v;
  };
  return make_potential(f, number(spec.substr(c1 + 1, c2 - c1 - 1)), number(spec.substr(c2 + 1)));
}

inline double evaluate_v(const Potential& pot, double r) { return pot.v(r); }
inline double evaluate_vhat(const Potential& pot, double p) { return pot.vhat(p); }

/// (4pi \int_0^\infty r^2 |V(r)|^q dr)^{1/q} by adaptive Gauss-Kronrod quadrature.
inline double lp_norm(const Potential& pot, double q) {
  if (!(q == 1.0 || q == 1.5)) throw InvalidArgument("lp_norm supports q = 1 and q = 3/2");
  if (pot.is_zero()) return 0.0;
  auto integrand = [&](double r) { return r * r * std::pow(std::abs(pot.v_inside(r)), q); };
  const double upper = pot.compact_support() ? pot.range() : std::numeric_limits<double>::infinity();
  double error = 0.0;
  const double value = boost::math::quadrature::gauss_kronrod<double, 61>::integrate(
      integrand, 0.0, upper, 15, 1e-14, &error);
  if (!(error <= 1e-11 * std::abs(value)))
    throw NumericError("lp_norm quadrature did not converge", error / std::abs(value));
  return std::pow(4.0 * pi * value, 1.0 / q);
}

/// sqrt(mu) V_{sqrt(mu)}(x) = mu^{-1} V(x / sqrt(mu)); same family, depth/mu, range*sqrt(mu).
inline Potential scale_potential(const Potential& pot, double mu) {
  if (!(mu > 0.0)) throw InvalidArgument("scale_potential requires mu > 0");
  if (pot.is_zero()) return pot;
  return make_potential(pot.family(), pot.depth() / mu, pot.range() * std::sqrt(mu));
}

/// V_{sqrt(mu)}(x) = mu^{-3/2} V(x / sqrt(mu)), the L^1-preserving dilation.
inline Potential dilate_potential(const Potential& pot, double mu) {
  if (!(mu > 0.0)) throw InvalidArgument("dilate_potential requires mu > 0");
  if (pot.is_zero()) return pot;
  return make_potential(pot.family(), pot.depth() * std::pow(mu, -1.5), pot.range() * std::sqrt(mu));
}

}  // namespace bcsgap
