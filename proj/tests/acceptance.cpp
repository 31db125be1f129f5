// Acceptance gate: one pass/fail line per criterion, nonzero exit on any
// failure. Each criterion is independent and carries a wall-clock budget.

#include <polc/bands.hpp>
#include <polc/cli.hpp>
#include <polc/degeneracy.hpp>
#include <polc/lattice.hpp>
#include <polc/packet.hpp>
#include <polc/params.hpp>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <numbers>
#include <random>
#include <sstream>
#include <string>
#include <vector>

namespace {

constexpr double pi = std::numbers::pi;

struct Outcome {
    bool ok = false;
    std::string detail;
};

std::string fmt(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.3g", v);
    return buf;
}

polc::CrystalParams fig2_params() {
    return polc::load_params((std::filesystem::path(POLC_PRESET_DIR) / "fig2.json").string());
}

// --- criterion bodies ------------------------------------------------------

Outcome c1_rabi_gap() {
    auto p = fig2_params();
    const double k = 0.5 * pi / p.l;  // delta_omega crosses zero here for Delta = 0
    const double gap = polc::rabi_splitting(p, k);
    const double dev = std::abs(gap - 2.0 * p.g) / (2.0 * p.g);
    return {dev <= 1e-12, "min gap vs 2g rel dev " + fmt(dev) + " (<= 1e-12)"};
}

Outcome c2_resonant_mass() {
    auto p = fig2_params();
    const double m2 = polc::polariton_masses(p, 0.0).second;
    const double dev = std::abs(m2 - 1e-35) / 1e-35;
    return {dev <= 0.01, "m2(Delta_tilde=0) = " + fmt(m2) + " kg, dev from 1e-35 " + fmt(dev)};
}

Outcome c3_regime_velocities() {
    auto p = fig2_params();
    const double k = 1e5;
    const double v_ph = polc::group_velocity(p, k, polc::Branch::lower);
    const double dev_ph = std::abs(v_ph - 2e6) / 2e6;

    // Atom-like crystal: same masses, photon band raised so Delta_tilde = -1e16.
    auto q = p;
    const double delta = -1e16 + 2.0 * (q.beta - q.alpha);
    q.omega_ph = q.omega_ab - delta;
    const double v_at = polc::group_velocity(q, k, polc::Branch::lower);
    const double dev_at = std::abs(v_at - 2.6e-4) / 2.6e-4;

    return {dev_ph <= 0.10 && dev_at <= 0.10,
            "photon-like " + fmt(v_ph) + " m/s (dev " + fmt(dev_ph) + "), atom-like " +
                fmt(v_at) + " m/s (dev " + fmt(dev_at) + ")"};
}

Outcome c4_broadening_time() {
    auto ds = polc::derive_scales(fig2_params());
    const double tb = polc::broadening_time(ds.m_at, 1e-4);
    const double dev = std::abs(tb - 3.7) / 3.7;
    return {dev <= 0.05, "tau_b(m_at, f=1e-4) = " + fmt(tb) + " s, dev from 3.7 s " + fmt(dev)};
}

Outcome c5_degeneracy() {
    const double n1 = 1e6, m2 = 1e-35;
    const double td = polc::degeneracy_temperature(n1, m2);
    const double par = polc::degeneracy_parameter(n1, td, m2);
    const double dev = std::abs(par - 1.0);
    return {td >= 300.0 && dev <= 1e-12,
            "T_d = " + fmt(td) + " K (>= 300), |n1 Lambda_T(T_d) - 1| = " + fmt(dev)};
}

Outcome c6_oracle_random() {
    std::mt19937 rng(12345);
    std::uniform_real_distribution<double> rate(0.01, 10.0);
    double worst = 0.0;
    int worst_m = 0;
    int draws = 0;
    for (int rep = 0; rep < 7; ++rep) {
        for (int m : {4, 8, 16}) {
            auto p = polc::CrystalParams::from_hoppings(m, 1.0, rate(rng), rate(rng),
                                                        rate(rng), rate(rng), rate(rng));
            auto cmp = polc::compare_to_analytic(p);
            if (cmp.max_rel_dev > worst) {
                worst = cmp.max_rel_dev;
                worst_m = m;
            }
            ++draws;
        }
    }
    return {worst < polc::spectrum_pass_threshold,
            std::to_string(draws) + " random draws, worst max_rel_dev " + fmt(worst) + " (M=" +
                std::to_string(worst_m) + ", threshold 1e-9)"};
}

Outcome c7_band_edge_velocity() {
    auto p = fig2_params();
    const double vscale = p.l * (p.alpha + p.beta);  // tight-binding velocity unit
    double worst = 0.0;
    for (auto branch : {polc::Branch::upper, polc::Branch::lower}) {
        for (double kl : {0.0, pi, -pi}) {
            const double v = polc::group_velocity(p, kl / p.l, branch);
            worst = std::max(worst, std::abs(v) / vscale);
        }
    }
    return {worst <= 1e-12,
            "max |v|/(l(alpha+beta)) at band center/edge = " + fmt(worst) + " (<= 1e-12)"};
}

Outcome c8_fd_convergence() {
    // Reduced units, small lattice constant: the h^2 law has three clean
    // decades before hitting the rounding floor.
    auto p = polc::CrystalParams::from_hoppings(8, 1e-3, 0.5, 1.0, 0.1, 10.0, 10.0);
    std::mt19937 rng(777);
    std::uniform_real_distribution<double> klu(0.15, pi - 0.15);
    const double hs[3] = {100.0, 10.0, 1.0};  // in k units; h*l = 1e-1..1e-3
    double rms[3] = {0.0, 0.0, 0.0};
    int count = 0;
    for (int i = 0; i < 100; ++i) {
        const double k = klu(rng) / p.l;
        for (auto branch : {polc::Branch::upper, polc::Branch::lower}) {
            const double v = polc::group_velocity(p, k, branch);
            auto omega = [&](double kk) {
                auto [w1, w2] = polc::branch_frequencies(p, kk);
                return branch == polc::Branch::upper ? w1 : w2;
            };
            for (int hi = 0; hi < 3; ++hi) {
                const double fd = (omega(k + hs[hi]) - omega(k - hs[hi])) / (2.0 * hs[hi]);
                const double rel = std::abs(fd - v) / std::abs(v);
                rms[hi] += rel * rel;
            }
            ++count;
        }
    }
    for (double& r : rms) r = std::sqrt(r / count);
    const double slope1 = std::log10(rms[0] / rms[1]);  // h: 100 -> 10
    const double slope2 = std::log10(rms[1] / rms[2]);  // h: 10 -> 1
    const bool ok = slope1 >= 1.9 && slope1 <= 2.1 && slope2 >= 1.9 && slope2 <= 2.1;
    return {ok, "rms rel errors {" + fmt(rms[0]) + ", " + fmt(rms[1]) + ", " + fmt(rms[2]) +
                    "}, decade slopes " + fmt(slope1) + ", " + fmt(slope2) + " (want ~2)"};
}

Outcome c9_memory_protocol() {
    auto p = fig2_params();
    polc::Grid grid{2048, 64.0};
    auto packet = polc::gaussian_packet(grid, 10.0, 1.0, 1e-4);

    // (a), (c), (d): the full write/store/read protocol.
    auto trace = polc::evolve(packet, polc::default_protocol(), p,
                              polc::EvolutionMode::parabolic, 2000);
    double norm_dev = 0.0;
    for (double nrm : trace.norms) norm_dev = std::max(norm_dev, std::abs(nrm - 1.0));

    double vel_dev = 0.0;
    for (const auto& v : polc::plateau_velocities(trace, p))
        vel_dev = std::max(vel_dev, std::abs(v.measured - v.expected) / std::abs(v.expected));

    const double overlap = polc::round_trip_overlap(packet, trace.final_state);

    // (b): free spreading on a constant plateau against the analytic law.
    polc::DetuningSchedule flat;
    flat.segments = {{0.0, 1.0, 5.0, 5.0}};
    auto spread = polc::evolve(packet, flat, p, polc::EvolutionMode::parabolic, 8000);
    const double R = polc::derive_scales(p).m_ph / polc::mass_of_detuning(p, 5.0);
    double spread_dev = 0.0;
    for (std::size_t i = 0; i < spread.times.size(); ++i) {
        const double tau = spread.times[i];
        const double expect = std::sqrt(1.0 + 0.25 * R * R * tau * tau);
        spread_dev = std::max(spread_dev, std::abs(spread.widths[i] - expect) / expect);
    }

    const bool ok = norm_dev <= 1e-10 && spread_dev <= 1e-6 && vel_dev <= 0.02 &&
                    overlap >= 0.99;
    return {ok, "norm dev " + fmt(norm_dev) + " (<=1e-10), spreading dev " + fmt(spread_dev) +
                    " (<=1e-6), plateau velocity dev " + fmt(vel_dev) +
                    " (<=0.02), round-trip overlap " + fmt(overlap) + " (>=0.99)"};
}

Outcome c10_cli_band_scan() {
    namespace fs = std::filesystem;
    const fs::path dir = fs::temp_directory_path() / "polc_acceptance";
    fs::create_directories(dir);
    const fs::path csv = dir / "scan.csv";

    auto cfg = [&] {
        std::ostringstream sink;
        auto* old = std::cerr.rdbuf(sink.rdbuf());
        auto c = polc::cli::parse_config(
            {"bands", "--params",
             (fs::path(POLC_PRESET_DIR) / "fig2.json").string(), "--n-points", "1001", "--out",
             csv.string(), "--quiet"});
        std::cerr.rdbuf(old);
        return c;
    }();
    std::ostringstream out, err;
    const int code = polc::cli::run(cfg, out, err);
    if (code != 0) return {false, "CLI exit code " + std::to_string(code)};

    std::ifstream in(csv);
    if (!in) return {false, "missing output CSV"};
    std::string line;
    std::getline(in, line);  // header
    double min_gap = 1e300, min_gap_kl = 0.0;
    double min_o2 = 1e300, min_o2_kl = 0.0;
    std::size_t rows = 0;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        // columns: kl, omega_ph_k, omega_at_k, delta_omega, Omega_1, Omega_2, ...
        double col[6];
        std::istringstream ls(line);
        std::string tok;
        for (double& c : col) {
            if (!std::getline(ls, tok, ',')) return {false, "short CSV row"};
            c = std::strtod(tok.c_str(), nullptr);
        }
        ++rows;
        const double gap = col[4] - col[5];
        if (gap < min_gap) {
            min_gap = gap;
            min_gap_kl = col[0];
        }
        if (col[5] < min_o2) {
            min_o2 = col[5];
            min_o2_kl = col[0];
        }
    }
    if (rows != 1001) return {false, "expected 1001 rows, got " + std::to_string(rows)};

    const double g = cfg.params.g;
    const double gap_dev = std::abs(min_gap - 2.0 * g) / (2.0 * g);
    const double half_step = pi / 1000.0;  // half the kl grid spacing
    const bool gap_at_quarter = std::abs(std::abs(min_gap_kl) - 0.5 * pi) <= half_step;
    const bool o2_at_center = std::abs(min_o2_kl) <= half_step;
    const bool ok = gap_dev <= 1e-9 && gap_at_quarter && o2_at_center;
    return {ok, "min gap rel dev " + fmt(gap_dev) + " (<=1e-9) at kl = " + fmt(min_gap_kl) +
                    " (want +-pi/2), Omega_2 minimum at kl = " + fmt(min_o2_kl) +
                    " (want 0)"};
}

} // namespace

int main() {
    struct Entry {
        int id;
        const char* label;
        double budget_s;
        std::function<Outcome()> body;
    };
    const std::vector<Entry> criteria = {
        {1, "resonant Rabi splitting equals 2g", 1.0, c1_rabi_gap},
        {2, "lower-polariton mass at zero effective detuning", 1.0, c2_resonant_mass},
        {3, "photon-like and atom-like transport velocities", 1.0, c3_regime_velocities},
        {4, "atomic broadening time at f = 100 um", 1.0, c4_broadening_time},
        {5, "room-temperature quantum degeneracy", 1.0, c5_degeneracy},
        {6, "lattice oracle vs analytic spectrum, random draws", 10.0, c6_oracle_random},
        {7, "group velocity vanishes at band center and edge", 1.0, c7_band_edge_velocity},
        {8, "O(h^2) finite-difference consistency of velocities", 5.0, c8_fd_convergence},
        {9, "write/store/read protocol invariants", 30.0, c9_memory_protocol},
        {10, "CLI band scan: gap location and magnitude", 2.0, c10_cli_band_scan},
    };

    int failures = 0;
    for (const Entry& e : criteria) {
        Outcome outcome;
        const auto t0 = std::chrono::steady_clock::now();
        try {
            outcome = e.body();
        } catch (const std::exception& ex) {
            outcome = {false, std::string("exception: ") + ex.what()};
        }
        const double elapsed =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        const bool in_budget = elapsed <= e.budget_s;
        const bool pass = outcome.ok && in_budget;
        if (!pass) ++failures;
        std::printf("[%s] criterion %2d: %s — %s%s [%.2f s / budget %.0f s]\n",
                    pass ? "PASS" : "FAIL", e.id, e.label, outcome.detail.c_str(),
                    in_budget ? "" : " — OVER BUDGET", elapsed, e.budget_s);
    }
    if (failures == 0) {
        std::printf("acceptance: all %zu criteria passed\n", criteria.size());
        return 0;
    }
    std::printf("acceptance: %d criteria FAILED\n", failures);
    return 1;
}
