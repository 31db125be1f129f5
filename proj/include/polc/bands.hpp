#pragma once

#include <cmath>
#include <numbers>
#include <ostream>
#include <stdexcept>
#include <tuple>
#include <utility>
#include <vector>

#include "polc/io.hpp"
#include "polc/params.hpp"

namespace polc {

// One quasi-momentum point of the polariton band structure.
struct BandSample {
    double k = 0.0;           // quasi-momentum [rad/m]
    double kl = 0.0;          // reduced quasi-momentum k*l [rad]
    double omega_ph_k = 0.0;  // bare photonic dispersion [rad/s]
    double omega_at_k = 0.0;  // bare atomic dispersion [rad/s]
    double delta_omega = 0.0; // k-dependent detuning [rad/s]
    double Omega_1 = 0.0;     // upper branch frequency [rad/s]
    double Omega_2 = 0.0;     // lower branch frequency [rad/s]
    double mu1_sq = 0.0;      // Hopfield fraction, upper-branch weight
    double mu2_sq = 0.0;      // Hopfield fraction, lower-branch weight
    double v1 = 0.0;          // upper-branch group velocity [m/s]
    double v2 = 0.0;          // lower-branch group velocity [m/s]
};

// Branch 1 is always the upper (larger-frequency) branch; no label swaps
// across crossings.
enum class Branch { upper = 1, lower = 2 };

enum class VelocityRegime { photon, intermediate, atom };

// omega_ph(k) = omega_ph - 2 alpha cos(kl), omega_at(k) = omega_ab - 2 beta cos(kl).
inline std::pair<double, double> bare_dispersions(const CrystalParams& p, double k) {
    const double c = std::cos(k * p.l);
    return {p.omega_ph - 2.0 * p.alpha * c, p.omega_ab - 2.0 * p.beta * c};
}

// delta_omega(k) = Delta - 2 (beta - alpha) cos(kl). Equals the bare detuning
// Delta at kl = pi/2 and the effective detuning Delta_tilde at kl = 0.
inline double delta_omega(const CrystalParams& p, double k) {
    return p.detuning() - 2.0 * (p.beta - p.alpha) * std::cos(k * p.l);
}

// Branch splitting sqrt(delta_omega^2 + 4 g^2). Computed directly (not as
// Omega_1 - Omega_2, which loses ~5 digits at optical carrier frequencies).
inline double rabi_splitting(const CrystalParams& p, double k) {
    return std::hypot(delta_omega(p, k), 2.0 * p.g);
}

// Omega_{1,2}(k) = [omega_at(k) + omega_ph(k) +- sqrt(delta_omega^2 + 4g^2)] / 2.
inline std::pair<double, double> branch_frequencies(const CrystalParams& p, double k) {
    const auto [w_ph, w_at] = bare_dispersions(p, k);
    const double s = rabi_splitting(p, k);
    return {0.5 * (w_at + w_ph + s), 0.5 * (w_at + w_ph - s)};
}

// Squared Hopfield fractions mu_{1,2}^2 = [1 -+ delta_omega / splitting] / 2;
// they sum to 1 identically.
inline std::pair<double, double> hopfield_fractions(const CrystalParams& p, double k) {
    const double ratio = delta_omega(p, k) / rabi_splitting(p, k);
    return {0.5 * (1.0 - ratio), 0.5 * (1.0 + ratio)};
}

namespace detail {

// (m_1, m_2) from the band-edge mass formula at effective detuning dt:
//   m_{1,2} = 2 m_at m_ph S / [ (m_at + m_ph) S -+ (m_at - m_ph) dt ],
// S = sqrt(dt^2 + 4 g^2). The denominators regroup into m_at (S -+ dt) +
// m_ph (S +- dt); for |dt| >> g one of S +- dt cancels catastrophically, so
// that factor is rationalized via (S - dt)(S + dt) = 4 g^2 before use.
inline std::pair<double, double> masses_from_scales(double m_at, double m_ph, double g,
                                                    double dt) {
    const double s = std::hypot(dt, 2.0 * g);
    double s_plus, s_minus;  // S + dt, S - dt
    if (dt >= 0.0) {
        s_plus = s + dt;
        s_minus = 4.0 * g * g / s_plus;
    } else {
        s_minus = s - dt;
        s_plus = 4.0 * g * g / s_minus;
    }
    const double num = 2.0 * m_at * m_ph * s;
    const double m1 = num / (m_at * s_minus + m_ph * s_plus);
    const double m2 = num / (m_at * s_plus + m_ph * s_minus);
    return {m1, m2};
}

}  // namespace detail

// Band-edge effective masses (m_1, m_2) at an explicit effective detuning
// [rad/s]. The protocol drives this overload with Delta_tilde = 2|g| D.
inline std::pair<double, double> polariton_masses(const CrystalParams& p, double Delta_tilde) {
    const DerivedScales ds = derive_scales(p);
    return detail::masses_from_scales(ds.m_at, ds.m_ph, p.g, Delta_tilde);
}

// Band-edge effective masses at the crystal's own Delta_tilde.
inline std::pair<double, double> polariton_masses(const CrystalParams& p) {
    return polariton_masses(p, derive_scales(p).Delta_tilde);
}

// Group velocity of one branch,
//   v_{1,2}(k) = l sin(kl) [ (alpha + beta) -+ (alpha - beta) delta_omega / S ],
// the exact k-derivative of the branch frequencies (equivalently the
// hbar sin(kl)/(2 l m_ph) [1 + m_ph/m_at -+ ...] form).
inline double group_velocity(const CrystalParams& p, double k, Branch branch) {
    const double ratio = delta_omega(p, k) / rabi_splitting(p, k);
    const double sign = (branch == Branch::upper) ? -1.0 : +1.0;
    return p.l * std::sin(k * p.l) * ((p.alpha + p.beta) + sign * (p.alpha - p.beta) * ratio);
}

// Closed-form small-k regime approximations of the lower-branch velocity:
// photon-like 2 alpha l^2 k, intermediate 2 alpha l^2 k g^2/Delta_tilde^2,
// atom-like 2 beta l^2 k.
inline double regime_velocity(const CrystalParams& p, double k, VelocityRegime regime) {
    switch (regime) {
        case VelocityRegime::photon:
            return 2.0 * p.alpha * p.l * p.l * k;
        case VelocityRegime::intermediate: {
            const double dt = derive_scales(p).Delta_tilde;
            if (dt == 0.0)
                throw std::invalid_argument("intermediate regime undefined at Delta_tilde = 0");
            return 2.0 * p.alpha * p.l * p.l * k * (p.g / dt) * (p.g / dt);
        }
        case VelocityRegime::atom:
            return 2.0 * p.beta * p.l * p.l * k;
    }
    throw std::invalid_argument("unknown velocity regime");
}

inline BandSample band_sample(const CrystalParams& p, double k) {
    BandSample s;
    s.k = k;
    s.kl = k * p.l;
    std::tie(s.omega_ph_k, s.omega_at_k) = bare_dispersions(p, k);
    s.delta_omega = delta_omega(p, k);
    std::tie(s.Omega_1, s.Omega_2) = branch_frequencies(p, k);
    std::tie(s.mu1_sq, s.mu2_sq) = hopfield_fractions(p, k);
    s.v1 = group_velocity(p, k, Branch::upper);
    s.v2 = group_velocity(p, k, Branch::lower);
    return s;
}

// Uniform sweep of kl over [-pi, pi] inclusive, emitted in increasing k.
// Point evaluations elsewhere accept extended-zone k unfolded.
inline std::vector<BandSample> band_scan(const CrystalParams& p, int n_points) {
    if (n_points < 2) throw std::invalid_argument("n_points < 2");
    std::vector<BandSample> out;
    out.reserve(static_cast<std::size_t>(n_points));
    const double pi = std::numbers::pi;
    const double step = 2.0 * pi / (n_points - 1);
    for (int i = 0; i < n_points; ++i) {
        const double kl = (i == n_points - 1) ? pi : -pi + step * i;
        out.push_back(band_sample(p, kl / p.l));
    }
    return out;
}

inline void write_band_scan_csv(std::ostream& os, const std::vector<BandSample>& scan) {
    os << "kl,omega_ph_k,omega_at_k,delta_omega,Omega_1,Omega_2,mu1_sq,mu2_sq,v1,v2\n";
    for (const BandSample& s : scan) {
        os << fmt_g17(s.kl) << ',' << fmt_g17(s.omega_ph_k) << ',' << fmt_g17(s.omega_at_k)
           << ',' << fmt_g17(s.delta_omega) << ',' << fmt_g17(s.Omega_1) << ','
           << fmt_g17(s.Omega_2) << ',' << fmt_g17(s.mu1_sq) << ',' << fmt_g17(s.mu2_sq) << ','
           << fmt_g17(s.v1) << ',' << fmt_g17(s.v2) << '\n';
    }
}

}  // namespace polc
