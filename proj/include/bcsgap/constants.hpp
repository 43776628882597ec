#pragma once

#include <cmath>
#include <numbers>

namespace bcsgap {

inline constexpr double pi = std::numbers::pi;
inline constexpr double euler_gamma = std::numbers::egamma;

/// (2pi)^{-3/2}, the Fourier normalization used throughout.
inline const double fourier_norm = std::pow(2.0 * pi, -1.5);

/// Best constant in the 3D Sobolev inequality, (3/4) 2^{2/3} pi^{4/3}.
inline const double sobolev_constant = 0.75 * std::pow(2.0, 2.0 / 3.0) * std::pow(pi, 4.0 / 3.0);

/// Limit of log(mu/Xi) + pi/(2 sqrt(mu) a) as mu -> 0.
inline const double gap_constant_target = 2.0 - std::log(8.0);

/// Prefactor of the energy gap, 8 e^{-2}.
inline const double gap_prefactor = 8.0 * std::exp(-2.0);

/// Prefactor of the critical temperature, (8/pi) e^{gamma-2}.
inline const double tc_prefactor = 8.0 / pi * std::exp(euler_gamma - 2.0);

/// Universal ratio Xi/T_c = pi e^{-gamma}.
inline const double universal_ratio = pi * std::exp(-euler_gamma);

/// Smallest admissible value of exp(pi/(2 sqrt(mu) a)).
inline constexpr double exponential_floor = 1e-12;

/// sqrt(mu)|a| must be at least this for the solver to accept mu.
inline const double representable_floor = pi / (2.0 * std::log(1.0 / exponential_floor));

}  // namespace bcsgap
