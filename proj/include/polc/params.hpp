#pragma once

#include <cmath>
#include <numbers>
#include <sstream>
#include <stdexcept>
#include <string>

#include "polc/constants.hpp"

namespace polc {

// All physical inputs of the 1D polaritonic crystal. SI units throughout
// (rad/s, m, kg, s); unit-friendly conversions belong at the CLI boundary.
//
// g already includes the sqrt(N) collective enhancement. beta is the
// effective atomic hopping (difference of the upper- and lower-level
// tunnelling rates). omega_ab is the bare atomic transition frequency.
struct CrystalParams {
    int M = 0;             // cell count of the periodic ring (>= 3)
    double l = 0.0;        // lattice constant [m]
    double g = 0.0;        // atom-photon coupling [rad/s]
    double alpha = 0.0;    // photon inter-cell hopping [rad/s]
    double beta = 0.0;     // effective atomic hopping [rad/s]
    double omega_ph = 0.0; // bare cavity frequency [rad/s]
    double omega_ab = 0.0; // bare atomic transition [rad/s]

    // Bare detuning Delta = omega_ab - omega_ph [rad/s].
    double detuning() const { return omega_ab - omega_ph; }

    static CrystalParams from_hoppings(int M, double l, double g, double alpha, double beta,
                                       double omega_ph, double omega_ab) {
        return CrystalParams{M, l, g, alpha, beta, omega_ph, omega_ab};
    }

    // The headline parameter sets quote lattice effective masses rather than
    // hoppings; invert m = hbar / (2 * hopping * l^2).
    static CrystalParams from_masses(int M, double l, double g, double m_ph, double m_at,
                                     double omega_ph, double omega_ab) {
        if (!(l > 0.0)) throw std::invalid_argument("l <= 0");
        if (!(m_ph > 0.0)) throw std::invalid_argument("m_ph <= 0");
        if (!(m_at > 0.0)) throw std::invalid_argument("m_at <= 0");
        const double alpha = constants::hbar / (2.0 * m_ph * l * l);
        const double beta = constants::hbar / (2.0 * m_at * l * l);
        return CrystalParams{M, l, g, alpha, beta, omega_ph, omega_ab};
    }
};

// Scales derived from CrystalParams: lattice effective masses and detunings.
struct DerivedScales {
    double m_at = 0.0;        // atomic lattice effective mass hbar/(2 beta l^2) [kg]
    double m_ph = 0.0;        // photonic lattice effective mass hbar/(2 alpha l^2) [kg]
    double Delta = 0.0;       // bare detuning omega_ab - omega_ph [rad/s]
    double Delta_tilde = 0.0; // effective detuning Delta - 2(beta - alpha) [rad/s]
};

namespace detail {

inline std::string name_value(const char* relation, double value) {
    std::ostringstream os;
    os << relation << " (got " << value << ")";
    return os.str();
}

}  // namespace detail

// Returns p unchanged if every invariant holds; otherwise throws
// std::invalid_argument naming the first violated invariant ("M < 3",
// "g <= 0", ...).
inline CrystalParams validate_params(const CrystalParams& p) {
    if (p.M < 3) throw std::invalid_argument(detail::name_value("M < 3", p.M));
    const struct {
        const char* name;
        double value;
    } positives[] = {
        {"l", p.l},   {"g", p.g},           {"alpha", p.alpha},
        {"beta", p.beta}, {"omega_ph", p.omega_ph}, {"omega_ab", p.omega_ab},
    };
    for (const auto& f : positives) {
        if (!std::isfinite(f.value))
            throw std::invalid_argument(std::string(f.name) + " not finite");
        if (!(f.value > 0.0))
            throw std::invalid_argument(detail::name_value((std::string(f.name) + " <= 0").c_str(), f.value));
    }
    return p;
}

inline DerivedScales derive_scales(const CrystalParams& p) {
    DerivedScales s;
    s.m_at = constants::hbar / (2.0 * p.beta * p.l * p.l);
    s.m_ph = constants::hbar / (2.0 * p.alpha * p.l * p.l);
    s.Delta = p.detuning();
    s.Delta_tilde = s.Delta - 2.0 * (p.beta - p.alpha);
    return s;
}

// Strong-coupling advisory: the tight-binding polariton model is trusted only
// when coupling * coherence time >> 1. Never gates any computation.
inline double strong_coupling_ratio(double kappa, double tau_coh) {
    if (!(kappa > 0.0)) throw std::invalid_argument("kappa <= 0");
    if (!(tau_coh > 0.0)) throw std::invalid_argument("tau_coh <= 0");
    return kappa * tau_coh;
}

// Built-in default parameter set: a sodium-vapour coupled-cavity chain at
// optical resonance (the bundled fig2.json preset carries the same values).
// l = 2.24 um, g = 2*pi*2 GHz, m_ph = 5e-36 kg, m_at = 38.5e-27 kg,
// omega_ph = omega_ab = 2*pi*500 THz.
inline CrystalParams sodium_cavity_params(int M = 8) {
    const double two_pi = 2.0 * std::numbers::pi;
    return CrystalParams::from_masses(M, 2.24e-6, two_pi * 2.0e9, 5.0e-36, 38.5e-27,
                                      two_pi * 5.0e14, two_pi * 5.0e14);
}

}  // namespace polc
