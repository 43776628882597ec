#pragma once

// Frozen oracle values and small random generators shared by the unit tests.

#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

#include "bcsgap/potentials.hpp"

namespace oracle {

// closed forms, evaluated once in extended precision
inline constexpr double universal_ratio = 1.7638769888620456;      // pi e^{-gamma}
inline constexpr double gap_constant = -0.07944154167983575;       // 2 - ln 8
inline constexpr double sobolev = 5.477904089531331;               // (3/4) 2^{2/3} pi^{4/3}
inline constexpr double gap_prefactor = 1.0826822658929016;        // 8 e^{-2}
inline constexpr double tc_prefactor = 0.6138082602865561;         // (8/pi) e^{gamma-2}
inline constexpr double squarewell_a = -0.5574077246549023;        // 1 - tan 1
inline constexpr double k00_gaussian = -0.7978845608028653;        // -4 pi (2 pi)^{-3/2}
inline constexpr double gaussian_moment = 0.44311346272637897;     // sqrt(pi)/4
inline constexpr double gaussian_born = -1.2533141373155001;       // -sqrt(pi/2)
inline constexpr double gaussian_l32 = 4.1887902047863905;         // 4 pi / 3

// from independent ODE shooting (RK4, 2^14 steps, Richardson)
inline constexpr double gaussian_a = -4.712670510618;
inline constexpr double exponential_a = -6.007062635764;

}  // namespace oracle

namespace gen {

/// Deterministic source of test inputs.
class Source {
 public:
  explicit Source(std::uint64_t seed) : rng_(seed) {}

  double uniform(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng_); }
  double log_uniform(double lo, double hi) { return std::exp(uniform(std::log(lo), std::log(hi))); }
  int integer(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng_); }

  bcsgap::Family family(bool with_squarewell = true) {
    const int k = integer(0, with_squarewell ? 2 : 1);
    return k == 0 ? bcsgap::Family::Gaussian : k == 1 ? bcsgap::Family::Exponential : bcsgap::Family::SquareWell;
  }

  bcsgap::Potential potential(bool with_squarewell = true) {
    return bcsgap::make_potential(family(with_squarewell), log_uniform(0.05, 2.0), log_uniform(0.3, 3.0));
  }

  /// Smooth radial bump sum_k c_k exp(-(p - p_k)^2 / (2 w_k^2)) sampled at nodes.
  std::vector<double> smooth_perturbation(const std::vector<double>& nodes, double center, double scale) {
    const int terms = integer(1, 3);
    std::vector<double> c(terms), p0(terms), w(terms);
    for (int k = 0; k < terms; ++k) {
      c[k] = uniform(-1.0, 1.0);
      p0[k] = center * uniform(0.5, 1.5);
      w[k] = scale * uniform(0.2, 2.0);
    }
    std::vector<double> h(nodes.size(), 0.0);
    for (std::size_t i = 0; i < nodes.size(); ++i)
      for (int k = 0; k < terms; ++k) {
        const double z = (nodes[i] - p0[k]) / w[k];
        h[i] += c[k] * std::exp(-0.5 * z * z);
      }
    return h;
  }

 private:
  std::mt19937_64 rng_;
};

}  // namespace gen
