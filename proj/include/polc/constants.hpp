#pragma once

// CODATA-2018 exact/recommended values, SI units throughout.

namespace polc::constants {

inline constexpr double hbar = 1.054571817e-34;  // reduced Planck constant [J s]
inline constexpr double k_B  = 1.380649e-23;     // Boltzmann constant [J/K] (exact)
inline constexpr double c    = 2.99792458e8;     // speed of light in vacuum [m/s] (exact)

}  // namespace polc::constants
