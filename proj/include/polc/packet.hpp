#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <limits>
#include <map>
#include <numbers>
#include <ostream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "polc/bands.hpp"
#include "polc/constants.hpp"
#include "polc/errors.hpp"
#include "polc/fft.hpp"
#include "polc/io.hpp"
#include "polc/params.hpp"

// Write/store/read memory-protocol simulator.
//
// Normalized units throughout this module:
//   X   = x / f                    (f = physical packet width scale, m)
//   tau = hbar t / (m_ph f^2)      (m_ph = photonic lattice mass of the crystal)
//   kappa = k f                    (dual grid of X)
//   D   = Delta_tilde / (2|g|)     (normalized effective detuning, the control knob)
// The lower-branch Hamiltonian is diagonal in kappa at all times, so evolution
// is exact time-ordered phase accumulation in momentum space — no splitting
// error. Adiabatic following is assumed: ramps never populate the upper branch
// (a stated model limitation, not checked dynamically).

namespace polc {

// Periodic spatial grid in normalized units. Point n is identified with
// point 0; x runs over [-L/2, L/2).
struct Grid {
    std::size_t n = 0;  // number of points, power of two, >= 16
    double L = 0.0;     // domain length [units of f]

    double dx() const { return L / static_cast<double>(n); }
    double x(std::size_t j) const { return -0.5 * L + dx() * static_cast<double>(j); }

    // Dual quasi-momentum in standard discrete-transform ordering:
    // j = 0..n/2-1 map to 0..+kappa_max, j = n/2..n-1 to the negative half.
    double kappa(std::size_t j) const {
        const auto half = n / 2;
        const double m = (j < half) ? static_cast<double>(j)
                                    : static_cast<double>(j) - static_cast<double>(n);
        return 2.0 * std::numbers::pi * m / L;
    }
};

inline void validate_grid(const Grid& g) {
    if (!is_power_of_two(g.n) || g.n < 16)
        throw std::invalid_argument("grid n must be a power of two >= 16");
    if (!(g.L > 0.0) || !std::isfinite(g.L)) throw std::invalid_argument("grid L <= 0");
}

// One linear piece of the detuning drive: D goes from d0 at tau0 to d1 at tau1.
struct DetuningSegment {
    double tau0 = 0.0, tau1 = 0.0;
    double d0 = 0.0, d1 = 0.0;

    bool is_plateau() const { return d0 == d1; }
    double duration() const { return tau1 - tau0; }
};

// Piecewise-linear normalized detuning D(tau) driving the protocol.
struct DetuningSchedule {
    std::vector<DetuningSegment> segments;

    double duration() const { return segments.empty() ? 0.0 : segments.back().tau1; }

    // Segments must be contiguous and continuous bit-exactly: run configs
    // carry exact doubles and the built-in protocol constructs each boundary
    // value once, so any mismatch is a config error, not roundoff.
    void validate() const {
        if (segments.empty()) throw std::invalid_argument("schedule has no segments");
        if (segments.front().tau0 != 0.0)
            throw std::invalid_argument("schedule must start at tau = 0");
        for (std::size_t i = 0; i < segments.size(); ++i) {
            const DetuningSegment& s = segments[i];
            if (!std::isfinite(s.tau0) || !std::isfinite(s.tau1) || !std::isfinite(s.d0) ||
                !std::isfinite(s.d1))
                throw std::invalid_argument("schedule segment " + std::to_string(i) +
                                            " has non-finite values");
            if (!(s.tau1 > s.tau0))
                throw std::invalid_argument("schedule segment " + std::to_string(i) +
                                            " has tau1 <= tau0");
            if (i > 0) {
                if (segments[i - 1].tau1 != s.tau0)
                    throw std::invalid_argument("schedule gap/overlap at join " +
                                                std::to_string(i));
                if (segments[i - 1].d1 != s.d0)
                    throw std::invalid_argument("detuning discontinuity at join " +
                                                std::to_string(i));
            }
        }
    }

    // D(tau), clamped to the schedule's ends outside [0, duration].
    double at(double tau) const {
        if (segments.empty()) throw std::invalid_argument("schedule has no segments");
        if (tau <= segments.front().tau0) return segments.front().d0;
        for (const DetuningSegment& s : segments) {
            if (tau <= s.tau1)
                return s.d0 + (s.d1 - s.d0) * (tau - s.tau0) / (s.tau1 - s.tau0);
        }
        return segments.back().d1;
    }
};

// The three-step drive: write plateau at +plateau, ramp down, storage plateau
// at -plateau, ramp up, read plateau at +plateau again. The reverse switch
// occupies [store_end, store_end + ramp]; the forward switch mirrors the same
// ramp width ending at write_end.
inline DetuningSchedule default_protocol(double plateau = 5.0, double ramp = 0.05,
                                         double write_end = 0.25, double store_end = 0.75,
                                         double total = 1.0) {
    if (!(ramp > 0.0)) throw std::invalid_argument("ramp <= 0");
    if (!(write_end - ramp > 0.0)) throw std::invalid_argument("write plateau has no room");
    if (!(store_end > write_end)) throw std::invalid_argument("store_end <= write_end");
    if (!(total > store_end + ramp)) throw std::invalid_argument("read plateau has no room");
    const double ramp_down = write_end - ramp;
    const double ramp_up_end = store_end + ramp;
    DetuningSchedule sch;
    sch.segments = {
        {0.0, ramp_down, plateau, plateau},
        {ramp_down, write_end, plateau, -plateau},
        {write_end, store_end, -plateau, -plateau},
        {store_end, ramp_up_end, -plateau, plateau},
        {ramp_up_end, total, plateau, plateau},
    };
    return sch;
}

namespace detail {

// Wrap a displacement onto the periodic domain, into [-L/2, L/2].
inline double wrap_displacement(double d, double L) { return d - L * std::round(d / L); }

struct CircularMoments {
    double center = 0.0;
    double width = 0.0;
};

// First circular moment of the density w_j >= 0 on the periodic grid.
// center = arg(z) L / 2pi and width = sqrt(-2 ln |z|) L / 2pi with
// z = sum w_j e^{2pi i x_j / L} / sum w_j. For a wrapped Gaussian |z| =
// exp(-sigma_theta^2 / 2) exactly, so the width estimator is bias-free —
// required by the 1e-6 spreading-law contract (the small-angle variant
// sqrt(2(1-|z|)) carries an O(sigma^2) bias three orders over budget).
inline CircularMoments circular_moments(const Grid& g, const std::vector<double>& w) {
    double re = 0.0, im = 0.0, total = 0.0;
    for (std::size_t j = 0; j < g.n; ++j) {
        const double theta = 2.0 * std::numbers::pi * g.x(j) / g.L;
        re += w[j] * std::cos(theta);
        im += w[j] * std::sin(theta);
        total += w[j];
    }
    CircularMoments cm;
    if (total <= 0.0) return cm;
    const double scale = g.L / (2.0 * std::numbers::pi);
    cm.center = std::atan2(im, re) * scale;
    const double r = std::min(std::hypot(re, im) / total, 1.0);
    cm.width = (r > 0.0) ? scale * std::sqrt(-2.0 * std::log(r))
                         : std::numeric_limits<double>::infinity();
    return cm;
}

}  // namespace detail

// Complex amplitude field on a periodic normalized grid.
struct WavePacket {
    Grid grid;
    std::vector<std::complex<double>> amplitudes;  // one per grid point
    double carrier = 0.0;  // k_x f, dimensionless
    double f = 1e-4;       // physical width scale [m]

    double norm() const {
        double s = 0.0;
        for (const auto& z : amplitudes) s += std::norm(z);
        return s * grid.dx();
    }

    std::vector<double> density() const {
        std::vector<double> w(amplitudes.size());
        for (std::size_t j = 0; j < w.size(); ++j) w[j] = std::norm(amplitudes[j]);
        return w;
    }

    // Circular (periodic) center of mass of |Psi|^2, in X units.
    double center() const { return detail::circular_moments(grid, density()).center; }

    // Circular root-variance of |Psi|^2, in X units.
    double width() const { return detail::circular_moments(grid, density()).width; }
};

// Gaussian packet Psi(X) ~ exp(-X^2 / (4 width^2)) exp(i carrier X), unit
// norm. `width` is the standard deviation of the *density* |Psi|^2, so the
// measured width() of a fresh packet equals `width` and the spreading law
// applies to it verbatim.
inline WavePacket gaussian_packet(const Grid& grid, double carrier = 10.0, double width = 1.0,
                                  double f = 1e-4) {
    validate_grid(grid);
    if (!(width > 0.0)) throw std::invalid_argument("width <= 0");
    if (!(f > 0.0)) throw std::invalid_argument("f <= 0");
    const double nyquist = std::numbers::pi * static_cast<double>(grid.n) / grid.L;
    if (!(std::abs(carrier) < nyquist))
        throw std::invalid_argument("carrier exceeds the Nyquist momentum pi*n/L = " +
                                    fmt_g17(nyquist));
    WavePacket p;
    p.grid = grid;
    p.carrier = carrier;
    p.f = f;
    p.amplitudes.resize(grid.n);
    for (std::size_t j = 0; j < grid.n; ++j) {
        const double x = grid.x(j);
        p.amplitudes[j] = std::polar(std::exp(-x * x / (4.0 * width * width)), carrier * x);
    }
    const double s = 1.0 / std::sqrt(p.norm());
    for (auto& z : p.amplitudes) z *= s;
    return p;
}

// Lower-branch mass at normalized detuning D, i.e. Eq.-(21)-style mass with
// Delta_tilde = 2|g|D.
inline double mass_of_detuning(const CrystalParams& p, double D) {
    return polariton_masses(p, 2.0 * std::abs(p.g) * D).second;
}

// Characteristic wave-packet broadening time tau_b = m2 f^2 / hbar.
inline double broadening_time(double m2, double f) {
    if (!(m2 > 0.0)) throw std::invalid_argument("m2 <= 0");
    if (!(f > 0.0)) throw std::invalid_argument("f <= 0");
    return m2 * f * f / constants::hbar;
}

enum class EvolutionMode { full_band, parabolic };

// Envelope snapshot S(X) = |Psi(X, tau)|^2 / |Psi(0, 0)|^2.
struct Snapshot {
    double tau_requested = 0.0;
    double tau = 0.0;       // nearest recorded step time actually captured
    std::vector<double> S;  // one value per grid point
};

struct ProtocolTrace {
    DetuningSchedule schedule;
    EvolutionMode mode = EvolutionMode::parabolic;
    int steps_per_segment = 0;

    std::vector<double> times;    // tau at every recorded step (times[0] = 0)
    std::vector<double> centers;  // circular mean of X
    std::vector<double> widths;   // circular root-variance of X
    std::vector<double> norms;

    // times index of each segment boundary; size = segments + 1
    std::vector<std::size_t> segment_boundary_index;

    std::vector<Snapshot> snapshots;
    WavePacket final_state;

    // (storage plateau duration) / tau_b(m2 at storage D); NaN when the
    // schedule has no plateau. The storage condition requires << 1.
    double t_stor_over_tau_b = std::numeric_limits<double>::quiet_NaN();
};

namespace detail {

// Omega_2(k; Delta_tilde) - Omega_2(0; Delta_tilde) [rad/s] for cosk = cos(kl),
// with the crystal's own detuning replaced by the drive value. Subtracting the
// k = 0 branch bottom keeps accumulated phases small at optical frequencies;
// |Psi|^2 observables are blind to the dropped global phase.
inline double lower_branch_rate(const CrystalParams& p, double cos_kl, double delta_tilde) {
    const double sum_shift = 2.0 * (p.alpha + p.beta) * (1.0 - cos_kl);
    const double dw_k = delta_tilde + 2.0 * (p.beta - p.alpha) * (1.0 - cos_kl);
    const double s_k = std::hypot(dw_k, 2.0 * p.g);
    const double s_0 = std::hypot(delta_tilde, 2.0 * p.g);
    return 0.5 * (sum_shift - s_k + s_0);
}

}  // namespace detail

// Spectral lower-branch evolution of `packet` under `schedule`.
//
// The field is transformed to momentum space once; every step multiplies mode
// j by exp(-i phi_j) with D sampled at the step midpoint:
//   full_band:  phi_j = [Omega_2(kappa_j/f; 2|g|D) - Omega_2(0; 2|g|D)] (m_ph f^2/hbar) dtau
//   parabolic:  phi_j = (m_ph / m2(D)) kappa_j^2 / 2 dtau
// A step large enough that max_j |phi_j| > pi/4 cannot resolve the phase
// winding and raises numerical_error naming the offending segment.
//
// Snapshots are captured at the recorded step time nearest each requested tau.
inline ProtocolTrace evolve(const WavePacket& packet, const DetuningSchedule& schedule,
                            const CrystalParams& p, EvolutionMode mode, int steps_per_segment,
                            const std::vector<double>& snapshot_taus = {}) {
    validate_params(p);
    validate_grid(packet.grid);
    schedule.validate();
    if (steps_per_segment < 1) throw std::invalid_argument("steps_per_segment < 1");
    if (packet.amplitudes.size() != packet.grid.n)
        throw std::invalid_argument("packet amplitude count does not match its grid");
    if (!(packet.f > 0.0)) throw std::invalid_argument("packet f <= 0");

    const Grid& grid = packet.grid;
    const std::size_t n = grid.n;
    const DerivedScales ds = derive_scales(p);
    const double tau_scale = ds.m_ph * packet.f * packet.f / constants::hbar;  // seconds per tau

    ProtocolTrace trace;
    trace.schedule = schedule;
    trace.mode = mode;
    trace.steps_per_segment = steps_per_segment;

    // Pass 1: the exact step times that will be recorded (segment ends are
    // recorded exactly, not as accumulated sums).
    const std::size_t n_segments = schedule.segments.size();
    trace.times.reserve(1 + n_segments * static_cast<std::size_t>(steps_per_segment));
    trace.times.push_back(0.0);
    trace.segment_boundary_index.push_back(0);
    for (const DetuningSegment& seg : schedule.segments) {
        const double dtau = seg.duration() / steps_per_segment;
        for (int i = 1; i <= steps_per_segment; ++i)
            trace.times.push_back(i == steps_per_segment ? seg.tau1 : seg.tau0 + dtau * i);
        trace.segment_boundary_index.push_back(trace.times.size() - 1);
    }

    // Map requested snapshot times onto recorded indices.
    std::multimap<std::size_t, double> wanted;  // record index -> tau_requested
    for (double tr : snapshot_taus) {
        if (!(tr >= -1e-9) || !(tr <= schedule.duration() + 1e-9))
            throw std::invalid_argument("snapshot tau " + fmt_g17(tr) +
                                        " outside the schedule [0, " +
                                        fmt_g17(schedule.duration()) + "]");
        const auto it = std::lower_bound(trace.times.begin(), trace.times.end(), tr);
        std::size_t idx = static_cast<std::size_t>(it - trace.times.begin());
        if (idx == trace.times.size()) idx--;
        if (idx > 0 && std::abs(trace.times[idx - 1] - tr) <= std::abs(trace.times[idx] - tr))
            idx--;
        wanted.emplace(idx, tr);
    }

    const double rho0 = std::norm(packet.amplitudes[n / 2]);  // |Psi(X=0, 0)|^2
    if (!wanted.empty() && !(rho0 > 0.0))
        throw std::invalid_argument("initial envelope vanishes at X = 0; snapshot "
                                    "normalization S = |Psi|^2/|Psi(0,0)|^2 is undefined");

    trace.centers.reserve(trace.times.size());
    trace.widths.reserve(trace.times.size());
    trace.norms.reserve(trace.times.size());

    // Circular-statistics kernels are tau-independent; precompute them once
    // instead of re-evaluating 2n trig calls per recorded step.
    std::vector<double> cos_theta(n), sin_theta(n);
    for (std::size_t j = 0; j < n; ++j) {
        const double theta = 2.0 * std::numbers::pi * grid.x(j) / grid.L;
        cos_theta[j] = std::cos(theta);
        sin_theta[j] = std::sin(theta);
    }
    const double angle_scale = grid.L / (2.0 * std::numbers::pi);

    std::vector<std::complex<double>> field = packet.amplitudes;  // real space, current
    std::vector<double> dens(n);

    std::size_t record_index = 0;
    auto record = [&](const std::vector<std::complex<double>>& psi) {
        double s = 0.0, re = 0.0, im = 0.0;
        for (std::size_t j = 0; j < n; ++j) {
            dens[j] = std::norm(psi[j]);
            s += dens[j];
            re += dens[j] * cos_theta[j];
            im += dens[j] * sin_theta[j];
        }
        trace.norms.push_back(s * grid.dx());
        trace.centers.push_back(std::atan2(im, re) * angle_scale);
        const double r = std::min(std::hypot(re, im) / s, 1.0);
        trace.widths.push_back((r > 0.0) ? angle_scale * std::sqrt(-2.0 * std::log(r))
                                         : std::numeric_limits<double>::infinity());
        for (auto [it, end] = wanted.equal_range(record_index); it != end; ++it) {
            Snapshot snap;
            snap.tau_requested = it->second;
            snap.tau = trace.times[record_index];
            snap.S.resize(n);
            for (std::size_t j = 0; j < n; ++j) snap.S[j] = dens[j] / rho0;
            trace.snapshots.push_back(std::move(snap));
        }
        ++record_index;
    };
    record(field);

    std::vector<std::complex<double>> momentum = packet.amplitudes;
    fft_radix2(momentum, false);

    std::vector<std::complex<double>> mult(n);  // exp(-i phi_j), reused on plateaus
    const double guard = 0.25 * std::numbers::pi;

    auto fill_multipliers = [&](double D, double dtau) {
        const double delta_tilde = 2.0 * std::abs(p.g) * D;
        double max_abs = 0.0;
        if (mode == EvolutionMode::parabolic) {
            const double r = ds.m_ph /
                             detail::masses_from_scales(ds.m_at, ds.m_ph, p.g, delta_tilde).second;
            for (std::size_t j = 0; j < n; ++j) {
                const double kap = grid.kappa(j);
                const double phi = 0.5 * r * kap * kap * dtau;
                max_abs = std::max(max_abs, std::abs(phi));
                mult[j] = std::polar(1.0, -phi);
            }
        } else {
            for (std::size_t j = 0; j < n; ++j) {
                const double kl = grid.kappa(j) * p.l / packet.f;
                const double rate = detail::lower_branch_rate(p, std::cos(kl), delta_tilde);
                const double phi = rate * tau_scale * dtau;
                max_abs = std::max(max_abs, std::abs(phi));
                mult[j] = std::polar(1.0, -phi);
            }
        }
        return max_abs;
    };

    for (std::size_t si = 0; si < n_segments; ++si) {
        const DetuningSegment& seg = schedule.segments[si];
        const double dtau = seg.duration() / steps_per_segment;
        bool multipliers_ready = false;
        for (int i = 1; i <= steps_per_segment; ++i) {
            if (!multipliers_ready || !seg.is_plateau()) {
                const double tau_mid = seg.tau0 + dtau * (i - 0.5);
                const double d_mid =
                    seg.d0 + (seg.d1 - seg.d0) * (tau_mid - seg.tau0) / seg.duration();
                const double max_phase = fill_multipliers(d_mid, dtau);
                if (max_phase > guard)
                    throw numerical_error(
                        "phase-resolution guard tripped in schedule segment " +
                        std::to_string(si) + " [" + fmt_g17(seg.tau0) + ", " +
                        fmt_g17(seg.tau1) + "]: max |phase| per step = " + fmt_g17(max_phase) +
                        " rad > pi/4; increase steps_per_segment");
                multipliers_ready = true;
            }
            for (std::size_t j = 0; j < n; ++j) momentum[j] *= mult[j];
            field = momentum;
            fft_radix2(field, true);
            record(field);
        }
    }

    trace.final_state = WavePacket{grid, std::move(field), packet.carrier, packet.f};

    // Storage diagnostic: the plateau with the lowest D is the storage stage.
    const DetuningSegment* storage = nullptr;
    for (const DetuningSegment& seg : schedule.segments)
        if (seg.is_plateau() && (storage == nullptr || seg.d0 < storage->d0)) storage = &seg;
    if (storage != nullptr) {
        const double m2 = detail::masses_from_scales(ds.m_at, ds.m_ph, p.g,
                                                     2.0 * std::abs(p.g) * storage->d0)
                              .second;
        trace.t_stor_over_tau_b = storage->duration() * ds.m_ph / m2;
    }
    return trace;
}

// Recentred round-trip fidelity |<final(X + shift) | initial(X)>|^2, both
// states unit-normalized; the shift removes the transport displacement so the
// overlap measures shape (storage/retrieval) degradation only.
inline double round_trip_overlap(const WavePacket& initial, const WavePacket& final_state) {
    if (initial.grid.n != final_state.grid.n || initial.grid.L != final_state.grid.L)
        throw std::invalid_argument("round_trip_overlap requires matching grids");
    validate_grid(initial.grid);
    const Grid& grid = initial.grid;
    const std::size_t n = grid.n;
    const double shift = detail::wrap_displacement(final_state.center() - initial.center(),
                                                   grid.L);
    std::vector<std::complex<double>> mom = final_state.amplitudes;
    fft_radix2(mom, false);
    for (std::size_t j = 0; j < n; ++j)
        mom[j] *= std::polar(1.0, grid.kappa(j) * shift);  // psi(X) -> psi(X + shift)
    fft_radix2(mom, true);
    std::complex<double> ip(0.0, 0.0);
    for (std::size_t j = 0; j < n; ++j) ip += std::conj(initial.amplitudes[j]) * mom[j];
    const double fidelity = std::norm(ip) * grid.dx() * grid.dx() /
                            (initial.norm() * final_state.norm());
    return fidelity;
}

// Measured vs expected drift velocity on each constant-D plateau. Expected is
// d<X>/dtau = carrier * m_ph / m2(D), valid while the packet's momentum
// support sits in the parabolic part of the band.
struct PlateauVelocity {
    double tau0 = 0.0, tau1 = 0.0;
    double D = 0.0;
    double measured = 0.0;
    double expected = 0.0;
};

inline std::vector<PlateauVelocity> plateau_velocities(const ProtocolTrace& trace,
                                                       const CrystalParams& p) {
    const DerivedScales ds = derive_scales(p);
    const double L = trace.final_state.grid.L;
    std::vector<PlateauVelocity> out;
    for (std::size_t si = 0; si < trace.schedule.segments.size(); ++si) {
        const DetuningSegment& seg = trace.schedule.segments[si];
        if (!seg.is_plateau()) continue;
        const std::size_t i0 = trace.segment_boundary_index[si];
        const std::size_t i1 = trace.segment_boundary_index[si + 1];
        PlateauVelocity pv;
        pv.tau0 = seg.tau0;
        pv.tau1 = seg.tau1;
        pv.D = seg.d0;
        pv.measured = detail::wrap_displacement(trace.centers[i1] - trace.centers[i0], L) /
                      seg.duration();
        const double m2 = detail::masses_from_scales(ds.m_at, ds.m_ph, p.g,
                                                     2.0 * std::abs(p.g) * seg.d0)
                              .second;
        pv.expected = trace.final_state.carrier * ds.m_ph / m2;
        out.push_back(pv);
    }
    return out;
}

inline void write_trace_csv(std::ostream& os, const ProtocolTrace& trace) {
    os << "tau,center_X,sigma_X,norm\n";
    for (std::size_t i = 0; i < trace.times.size(); ++i)
        os << fmt_g17(trace.times[i]) << ',' << fmt_g17(trace.centers[i]) << ','
           << fmt_g17(trace.widths[i]) << ',' << fmt_g17(trace.norms[i]) << '\n';
}

inline void write_envelope_csv(std::ostream& os, const Grid& grid, const Snapshot& snap) {
    os << "X,S\n";
    for (std::size_t j = 0; j < snap.S.size(); ++j)
        os << fmt_g17(grid.x(j)) << ',' << fmt_g17(snap.S[j]) << '\n';
}

}  // namespace polc
