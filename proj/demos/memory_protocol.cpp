// Runs the default write/store/read detuning protocol on a Gaussian packet
// and prints the stage-by-stage transport summary.

#include <cstdio>

#include "polc/packet.hpp"
#include "polc/params.hpp"

int main() {
    using namespace polc;
    const CrystalParams p = validate_params(sodium_cavity_params());

    const Grid grid{2048, 64.0};
    const WavePacket initial = gaussian_packet(grid, /*carrier=*/10.0, /*width=*/1.0,
                                               /*f=*/1e-4);
    const DetuningSchedule schedule = default_protocol();
    const ProtocolTrace trace =
        evolve(initial, schedule, p, EvolutionMode::parabolic, /*steps_per_segment=*/2000,
               {0.0, 0.25, 0.75, 1.0});

    std::printf("steps recorded: %zu, final tau = %.3f\n", trace.times.size(),
                trace.times.back());
    std::printf("norm drift: max |norm - 1| = %.3e\n", [&] {
        double m = 0.0;
        for (double n : trace.norms) m = std::max(m, std::abs(n - 1.0));
        return m;
    }());

    std::printf("\n%10s %10s %14s %14s\n", "tau0", "tau1", "v measured", "v expected");
    for (const PlateauVelocity& v : plateau_velocities(trace, p))
        std::printf("%10.3f %10.3f %14.6g %14.6g\n", v.tau0, v.tau1, v.measured, v.expected);

    std::printf("\nstorage condition t_stor/tau_b = %.3e (must be << 1)\n",
                trace.t_stor_over_tau_b);
    std::printf("round-trip recentred overlap   = %.6f\n",
                round_trip_overlap(initial, trace.final_state));
    std::printf("final center = %.4f, final width = %.4f (initial 0, 1)\n",
                trace.final_state.center(), trace.final_state.width());
    return 0;
}
