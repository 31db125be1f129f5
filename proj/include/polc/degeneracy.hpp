#pragma once

#include <cmath>
#include <numbers>
#include <stdexcept>

#include "polc/constants.hpp"

namespace polc {

// Thermodynamic state of the 1D lower-polariton gas.
struct GasState {
    double n1 = 0.0;  // 1D polariton density [1/m]
    double T = 0.0;   // temperature [K]
    double m2 = 0.0;  // lower-polariton mass [kg]
};

// T_d = 2 pi hbar^2 n1^2 / (m2 k_B): the gas is quantum degenerate below T_d.
inline double degeneracy_temperature(double n1, double m2) {
    if (!(n1 > 0.0)) throw std::invalid_argument("n1 <= 0");
    if (!(m2 > 0.0)) throw std::invalid_argument("m2 <= 0");
    const double h = constants::hbar;
    return 2.0 * std::numbers::pi * h * h * n1 * n1 / (m2 * constants::k_B);
}

// Thermal de Broglie wavelength Lambda_T = sqrt(2 pi hbar^2 / (m2 k_B T)).
inline double thermal_wavelength(double m2, double T) {
    if (!(m2 > 0.0)) throw std::invalid_argument("m2 <= 0");
    if (!(T > 0.0)) throw std::invalid_argument("T <= 0");
    const double h = constants::hbar;
    return std::sqrt(2.0 * std::numbers::pi * h * h / (m2 * constants::k_B * T));
}

// Degeneracy parameter n1 * Lambda_T; >> 1 flags a highly degenerate gas,
// and exactly 1 at T = T_d by construction of the two formulas.
inline double degeneracy_parameter(double n1, double T, double m2) {
    if (!(n1 > 0.0)) throw std::invalid_argument("n1 <= 0");
    return n1 * thermal_wavelength(m2, T);
}

inline double degeneracy_parameter(const GasState& s) {
    return degeneracy_parameter(s.n1, s.T, s.m2);
}

}  // namespace polc
