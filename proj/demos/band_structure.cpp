// Minimal library walkthrough: derived scales, branch structure at selected
// quasi-momenta, effective masses and regime velocities for the built-in
// sodium-cavity parameter set.

#include <cstdio>

#include "polc/bands.hpp"
#include "polc/params.hpp"

int main() {
    using namespace polc;
    const CrystalParams p = validate_params(sodium_cavity_params());
    const DerivedScales ds = derive_scales(p);

    std::printf("lattice constant      l        = %.6g m\n", p.l);
    std::printf("coupling              g        = %.6g rad/s\n", p.g);
    std::printf("photon hopping        alpha    = %.6g rad/s\n", p.alpha);
    std::printf("atomic hopping        beta     = %.6g rad/s\n", p.beta);
    std::printf("effective detuning    Dtilde   = %.6g rad/s\n\n", ds.Delta_tilde);

    std::printf("%8s %22s %22s %14s %14s\n", "kl", "Omega_1 [rad/s]", "Omega_2 [rad/s]",
                "mu1^2", "mu2^2");
    for (double kl : {-3.141592653589793, -1.5707963267948966, 0.0, 1.5707963267948966,
                      3.141592653589793}) {
        const BandSample s = band_sample(p, kl / p.l);
        std::printf("%8.4f %22.15e %22.15e %14.6g %14.6g\n", s.kl, s.Omega_1, s.Omega_2,
                    s.mu1_sq, s.mu2_sq);
    }

    const auto [m1, m2] = polariton_masses(p);
    std::printf("\npolariton masses      m_1 = %.6g kg, m_2 = %.6g kg\n", m1, m2);
    std::printf("rabi gap at resonance 2g  = %.6g rad/s\n", 2.0 * p.g);

    const double k = 1e5;  // rad/m
    std::printf("\nlower-branch velocity at k = %.3g rad/m: %.6g m/s\n", k,
                group_velocity(p, k, Branch::lower));
    std::printf("photon-regime closed form 2*alpha*l^2*k: %.6g m/s\n",
                regime_velocity(p, k, VelocityRegime::photon));
    std::printf("atom-regime closed form   2*beta*l^2*k:  %.6g m/s\n",
                regime_velocity(p, k, VelocityRegime::atom));
    return 0;
}
