#pragma once

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "polc/bands.hpp"
#include "polc/degeneracy.hpp"
#include "polc/errors.hpp"
#include "polc/io.hpp"
#include "polc/lattice.hpp"
#include "polc/packet.hpp"
#include "polc/param_io.hpp"
#include "polc/params.hpp"

namespace polc::cli {

enum class Command { bands, masses, oracle, degeneracy, packet };

inline const char* command_name(Command c) {
    switch (c) {
        case Command::bands: return "bands";
        case Command::masses: return "masses";
        case Command::oracle: return "oracle";
        case Command::degeneracy: return "degeneracy";
        case Command::packet: return "packet";
    }
    throw std::invalid_argument("unknown command");
}

inline Command command_from_name(const std::string& s) {
    for (Command c : {Command::bands, Command::masses, Command::oracle, Command::degeneracy,
                      Command::packet})
        if (s == command_name(c)) return c;
    throw std::invalid_argument("unknown command '" + s + "'");
}

inline EvolutionMode mode_from_string(const std::string& s) {
    if (s == "parabolic") return EvolutionMode::parabolic;
    if (s == "full-band") return EvolutionMode::full_band;
    throw std::invalid_argument("mode must be 'parabolic' or 'full-band', got '" + s + "'");
}

// Fully resolved options of the packet subcommand. `schedule` is always
// populated after parsing (protocol knobs expand into explicit segments).
struct PacketOptions {
    Grid grid{2048, 64.0};
    double carrier = 10.0;
    double width = 1.0;
    double f = 1e-4;  // physical packet width scale [m]
    std::string mode = "parabolic";
    int steps_per_segment = 2000;
    std::vector<double> snapshots;
    std::vector<DetuningSegment> schedule;
};

// One parsed invocation. All values are resolved: parameter files are loaded,
// defaults expanded, overrides applied.
struct RunConfig {
    Command command = Command::bands;
    std::string params_path;  // empty = built-in sodium-cavity defaults
    CrystalParams params;
    std::string out_path;  // bands/oracle/masses/degeneracy: file; packet: directory
    bool quiet = false;

    int n_points = 1001;  // bands
    int M_override = 0;   // oracle; 0 = keep params.M

    double n1 = 0.0, T = 0.0, m2 = 0.0;  // degeneracy (m2 resolved)

    PacketOptions packet;
};

inline nlohmann::json to_json(const RunConfig& cfg) {
    nlohmann::json j{{"command", command_name(cfg.command)},
                     {"params_path", cfg.params_path},
                     {"params", params_to_json(cfg.params)},
                     {"out", cfg.out_path},
                     {"quiet", cfg.quiet}};
    switch (cfg.command) {
        case Command::bands:
            j["n_points"] = cfg.n_points;
            break;
        case Command::masses:
            break;
        case Command::oracle:
            j["M_override"] = cfg.M_override;
            break;
        case Command::degeneracy:
            j["n1_per_m"] = cfg.n1;
            j["T_K"] = cfg.T;
            j["m2_kg"] = cfg.m2;
            break;
        case Command::packet: {
            nlohmann::json segs = nlohmann::json::array();
            for (const DetuningSegment& s : cfg.packet.schedule)
                segs.push_back({{"tau0", s.tau0}, {"tau1", s.tau1}, {"d0", s.d0}, {"d1", s.d1}});
            j["packet"] = {{"grid", {{"n", cfg.packet.grid.n}, {"L", cfg.packet.grid.L}}},
                           {"carrier", cfg.packet.carrier},
                           {"width", cfg.packet.width},
                           {"f_m", cfg.packet.f},
                           {"mode", cfg.packet.mode},
                           {"steps_per_segment", cfg.packet.steps_per_segment},
                           {"snapshots", cfg.packet.snapshots},
                           {"schedule", segs}};
            break;
        }
    }
    return j;
}

// Inverse of to_json; the stderr provenance echo re-parses to an equivalent
// config through this function.
inline RunConfig config_from_json(const nlohmann::json& j) {
    RunConfig cfg;
    cfg.command = command_from_name(j.at("command").get<std::string>());
    cfg.params_path = j.at("params_path").get<std::string>();
    cfg.params = params_from_json(j.at("params"));
    cfg.out_path = j.at("out").get<std::string>();
    cfg.quiet = j.at("quiet").get<bool>();
    switch (cfg.command) {
        case Command::bands:
            cfg.n_points = j.at("n_points").get<int>();
            break;
        case Command::masses:
            break;
        case Command::oracle:
            cfg.M_override = j.at("M_override").get<int>();
            break;
        case Command::degeneracy:
            cfg.n1 = j.at("n1_per_m").get<double>();
            cfg.T = j.at("T_K").get<double>();
            cfg.m2 = j.at("m2_kg").get<double>();
            break;
        case Command::packet: {
            const nlohmann::json& p = j.at("packet");
            cfg.packet.grid.n = p.at("grid").at("n").get<std::size_t>();
            cfg.packet.grid.L = p.at("grid").at("L").get<double>();
            cfg.packet.carrier = p.at("carrier").get<double>();
            cfg.packet.width = p.at("width").get<double>();
            cfg.packet.f = p.at("f_m").get<double>();
            cfg.packet.mode = p.at("mode").get<std::string>();
            mode_from_string(cfg.packet.mode);
            cfg.packet.steps_per_segment = p.at("steps_per_segment").get<int>();
            cfg.packet.snapshots = p.at("snapshots").get<std::vector<double>>();
            for (const nlohmann::json& s : p.at("schedule"))
                cfg.packet.schedule.push_back({s.at("tau0").get<double>(),
                                               s.at("tau1").get<double>(),
                                               s.at("d0").get<double>(),
                                               s.at("d1").get<double>()});
            break;
        }
    }
    return cfg;
}

namespace detail {

// Raw option storage bound to CLI11; finalize() resolves it into a RunConfig.
struct CliState {
    CLI::App app{"polaritonic-crystal band structure, oracle, degeneracy and "
                 "memory-protocol simulator",
                 "polc"};
    CLI::App* cmd_bands = nullptr;
    CLI::App* cmd_masses = nullptr;
    CLI::App* cmd_oracle = nullptr;
    CLI::App* cmd_degeneracy = nullptr;
    CLI::App* cmd_packet = nullptr;

    std::string params_path, out_path;
    bool quiet = false;
    int n_points = 1001;
    int M_override = 0;
    double n1 = 0.0, T = 0.0, m2 = 0.0;

    std::string packet_config;
    std::string mode = "parabolic";
    int steps = 2000;
    std::size_t grid_n = 2048;
    double grid_L = 64.0, carrier = 10.0, width = 1.0, f = 1e-4;
    std::vector<double> snapshots;
    double plateau = 5.0, ramp = 0.05, write_end = 0.25, store_end = 0.75, total = 1.0;

    CliState() {
        app.require_subcommand(1);
        auto add_common = [&](CLI::App* sub) {
            sub->add_option("--params", params_path,
                            "crystal parameter JSON (default: built-in sodium-cavity set)")
                ->check(CLI::ExistingFile);
            sub->add_option("--out", out_path, "output path (packet: output directory)");
            sub->add_flag("--quiet", quiet, "suppress the stderr config echo and diagnostics");
        };

        cmd_bands = app.add_subcommand("bands", "Brillouin-zone scan of the polariton bands");
        cmd_bands->add_option("--n-points", n_points, "grid points over kl in [-pi, pi]")
            ->check(CLI::Range(2, 100000000));
        add_common(cmd_bands);

        cmd_masses = app.add_subcommand("masses", "polariton effective masses and Rabi gap");
        add_common(cmd_masses);

        cmd_oracle = app.add_subcommand(
            "oracle", "tight-binding eigensolver vs analytic branch spectrum");
        cmd_oracle->add_option("--M", M_override, "override the cell count of the ring")
            ->check(CLI::Range(3, 2048));
        add_common(cmd_oracle);

        cmd_degeneracy =
            app.add_subcommand("degeneracy", "quantum-degeneracy diagnostics of the gas");
        cmd_degeneracy->add_option("--n1", n1, "1D polariton density [1/m]")
            ->required()
            ->check(CLI::PositiveNumber);
        cmd_degeneracy->add_option("--T", T, "temperature [K]")
            ->required()
            ->check(CLI::PositiveNumber);
        cmd_degeneracy
            ->add_option("--m2", m2,
                         "lower-polariton mass [kg] (default: from the parameter set)")
            ->check(CLI::PositiveNumber);
        add_common(cmd_degeneracy);

        cmd_packet =
            app.add_subcommand("packet", "write/store/read memory-protocol simulation");
        cmd_packet->add_option("--config", packet_config, "packet run-config JSON")
            ->check(CLI::ExistingFile);
        cmd_packet->add_option("--mode", mode, "evolution mode")
            ->check(CLI::IsMember({"parabolic", "full-band"}));
        cmd_packet->add_option("--steps", steps, "time steps per schedule segment")
            ->check(CLI::Range(1, 100000000));
        cmd_packet->add_option("--grid-n", grid_n, "grid points (power of two >= 16)");
        cmd_packet->add_option("--grid-L", grid_L, "domain length in units of f")
            ->check(CLI::PositiveNumber);
        cmd_packet->add_option("--carrier", carrier, "carrier momentum k_x f");
        cmd_packet->add_option("--width", width, "initial density std in units of f")
            ->check(CLI::PositiveNumber);
        cmd_packet->add_option("--f", f, "physical packet width scale [m]")
            ->check(CLI::PositiveNumber);
        cmd_packet->add_option("--snapshots", snapshots, "envelope snapshot times (tau)")
            ->delimiter(',');
        cmd_packet->add_option("--plateau", plateau, "protocol plateau |D|");
        cmd_packet->add_option("--ramp", ramp, "protocol ramp width (tau)")
            ->check(CLI::PositiveNumber);
        cmd_packet->add_option("--write-end", write_end, "end of the write stage (tau)")
            ->check(CLI::PositiveNumber);
        cmd_packet->add_option("--store-end", store_end, "end of the storage stage (tau)")
            ->check(CLI::PositiveNumber);
        cmd_packet->add_option("--total", total, "total protocol duration (tau)")
            ->check(CLI::PositiveNumber);
        add_common(cmd_packet);
    }

    void apply_packet_config_file(PacketOptions& po, bool& protocol_in_file,
                                  bool& snapshots_specified) const {
        std::ifstream in(packet_config);
        if (!in)
            throw std::invalid_argument("cannot open packet config '" + packet_config + "'");
        nlohmann::json j;
        try {
            in >> j;
        } catch (const nlohmann::json::exception& e) {
            throw std::invalid_argument("packet config '" + packet_config +
                                        "' is not valid JSON: " + e.what());
        }
        if (!j.is_object())
            throw std::invalid_argument("packet config must be a JSON object");
        for (const auto& item : j.items()) {
            static const char* known[] = {"grid",      "carrier",  "width",
                                          "f_m",       "mode",     "steps_per_segment",
                                          "snapshots", "protocol", "schedule"};
            bool ok = false;
            for (const char* k : known) ok = ok || (item.key() == k);
            if (!ok)
                throw std::invalid_argument("unknown packet config key '" + item.key() + "'");
        }
        if (j.contains("protocol") && j.contains("schedule"))
            throw std::invalid_argument(
                "packet config: give either 'protocol' knobs or an explicit 'schedule', "
                "not both");
        if (j.contains("grid")) {
            const auto& gj = j.at("grid");
            for (const auto& item : gj.items())
                if (item.key() != "n" && item.key() != "L")
                    throw std::invalid_argument("unknown grid key '" + item.key() + "'");
            if (gj.contains("n")) po.grid.n = gj.at("n").get<std::size_t>();
            if (gj.contains("L")) po.grid.L = gj.at("L").get<double>();
        }
        if (j.contains("carrier")) po.carrier = j.at("carrier").get<double>();
        if (j.contains("width")) po.width = j.at("width").get<double>();
        if (j.contains("f_m")) po.f = j.at("f_m").get<double>();
        if (j.contains("mode")) po.mode = j.at("mode").get<std::string>();
        if (j.contains("steps_per_segment"))
            po.steps_per_segment = j.at("steps_per_segment").get<int>();
        if (j.contains("snapshots")) {
            po.snapshots = j.at("snapshots").get<std::vector<double>>();
            snapshots_specified = true;
        }
        if (j.contains("schedule")) {
            for (const nlohmann::json& s : j.at("schedule")) {
                for (const auto& item : s.items())
                    if (item.key() != "tau0" && item.key() != "tau1" && item.key() != "d0" &&
                        item.key() != "d1")
                        throw std::invalid_argument("unknown schedule key '" + item.key() +
                                                    "'");
                po.schedule.push_back({s.at("tau0").get<double>(), s.at("tau1").get<double>(),
                                       s.at("d0").get<double>(), s.at("d1").get<double>()});
            }
        }
        if (j.contains("protocol")) {
            const auto& pj = j.at("protocol");
            static const char* pk[] = {"plateau", "ramp", "write_end", "store_end", "total"};
            for (const auto& item : pj.items()) {
                bool ok = false;
                for (const char* k : pk) ok = ok || (item.key() == k);
                if (!ok)
                    throw std::invalid_argument("unknown protocol key '" + item.key() + "'");
            }
            protocol_in_file = true;
        }
    }

    // Protocol knob values after overlaying the config file and flags.
    struct ProtocolKnobs {
        double plateau, ramp, write_end, store_end, total;
    };

    RunConfig finalize() {
        RunConfig cfg;
        if (app.got_subcommand(cmd_bands)) cfg.command = Command::bands;
        else if (app.got_subcommand(cmd_masses)) cfg.command = Command::masses;
        else if (app.got_subcommand(cmd_oracle)) cfg.command = Command::oracle;
        else if (app.got_subcommand(cmd_degeneracy)) cfg.command = Command::degeneracy;
        else if (app.got_subcommand(cmd_packet)) cfg.command = Command::packet;
        else throw std::invalid_argument("no subcommand given");

        cfg.params_path = params_path;
        cfg.params = params_path.empty() ? sodium_cavity_params() : load_params(params_path);
        cfg.out_path = out_path;
        cfg.quiet = quiet;

        switch (cfg.command) {
            case Command::bands:
                cfg.n_points = n_points;
                break;
            case Command::masses:
                break;
            case Command::oracle:
                cfg.M_override = cmd_oracle->count("--M") ? M_override : 0;
                break;
            case Command::degeneracy:
                cfg.n1 = n1;
                cfg.T = T;
                cfg.m2 = cmd_degeneracy->count("--m2") ? m2
                                                       : polariton_masses(cfg.params).second;
                break;
            case Command::packet: {
                PacketOptions po;
                ProtocolKnobs knobs{plateau, ramp, write_end, store_end, total};
                bool protocol_in_file = false;
                bool snapshots_specified = false;
                nlohmann::json file_protocol;
                if (cmd_packet->count("--config")) {
                    apply_packet_config_file(po, protocol_in_file, snapshots_specified);
                    if (protocol_in_file) {
                        std::ifstream in(packet_config);
                        nlohmann::json j;
                        in >> j;
                        const auto& pj = j.at("protocol");
                        if (pj.contains("plateau")) knobs.plateau = pj.at("plateau").get<double>();
                        if (pj.contains("ramp")) knobs.ramp = pj.at("ramp").get<double>();
                        if (pj.contains("write_end"))
                            knobs.write_end = pj.at("write_end").get<double>();
                        if (pj.contains("store_end"))
                            knobs.store_end = pj.at("store_end").get<double>();
                        if (pj.contains("total")) knobs.total = pj.at("total").get<double>();
                    }
                }
                if (cmd_packet->count("--mode")) po.mode = mode;
                if (cmd_packet->count("--steps")) po.steps_per_segment = steps;
                if (cmd_packet->count("--grid-n")) po.grid.n = grid_n;
                if (cmd_packet->count("--grid-L")) po.grid.L = grid_L;
                if (cmd_packet->count("--carrier")) po.carrier = carrier;
                if (cmd_packet->count("--width")) po.width = width;
                if (cmd_packet->count("--f")) po.f = f;
                if (cmd_packet->count("--snapshots")) {
                    po.snapshots = snapshots;
                    snapshots_specified = true;
                }
                const bool knob_flags = cmd_packet->count("--plateau") ||
                                        cmd_packet->count("--ramp") ||
                                        cmd_packet->count("--write-end") ||
                                        cmd_packet->count("--store-end") ||
                                        cmd_packet->count("--total");
                if (!po.schedule.empty() && knob_flags)
                    throw std::invalid_argument(
                        "the config file fixes an explicit schedule; protocol knob flags "
                        "do not apply");
                if (cmd_packet->count("--plateau")) knobs.plateau = plateau;
                if (cmd_packet->count("--ramp")) knobs.ramp = ramp;
                if (cmd_packet->count("--write-end")) knobs.write_end = write_end;
                if (cmd_packet->count("--store-end")) knobs.store_end = store_end;
                if (cmd_packet->count("--total")) knobs.total = total;

                if (po.schedule.empty()) {
                    po.schedule = default_protocol(knobs.plateau, knobs.ramp, knobs.write_end,
                                                   knobs.store_end, knobs.total)
                                      .segments;
                    if (!snapshots_specified)
                        po.snapshots = {0.0, knobs.write_end, knobs.store_end, knobs.total};
                } else if (!snapshots_specified) {
                    po.snapshots = {0.0, po.schedule.back().tau1};
                }
                mode_from_string(po.mode);  // validate early
                DetuningSchedule sch{po.schedule};
                sch.validate();
                cfg.packet = std::move(po);
                break;
            }
        }
        return cfg;
    }
};

inline std::ofstream open_output(const std::string& path) {
    std::ofstream f(path);
    if (!f) throw std::invalid_argument("cannot open output file '" + path + "'");
    return f;
}

inline int run_bands(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
    const auto scan = band_scan(cfg.params, cfg.n_points);
    double min_gap = std::numeric_limits<double>::infinity(), min_gap_kl = 0.0;
    double min_o2 = std::numeric_limits<double>::infinity(), min_o2_kl = 0.0;
    for (const BandSample& s : scan) {
        const double gap = std::hypot(s.delta_omega, 2.0 * cfg.params.g);
        if (gap < min_gap) {
            min_gap = gap;
            min_gap_kl = s.kl;
        }
        if (s.Omega_2 < min_o2) {
            min_o2 = s.Omega_2;
            min_o2_kl = s.kl;
        }
    }
    nlohmann::json doc = to_json(cfg);
    doc["results"] = {{"rows", scan.size()},
                      {"min_gap_rad_s", min_gap},
                      {"min_gap_kl", min_gap_kl},
                      {"two_g_rad_s", 2.0 * cfg.params.g},
                      {"min_Omega_2_rad_s", min_o2},
                      {"min_Omega_2_kl", min_o2_kl}};
    if (!cfg.out_path.empty()) {
        auto f = open_output(cfg.out_path);
        write_band_scan_csv(f, scan);
        out << doc.dump(2) << '\n';
    } else {
        write_band_scan_csv(out, scan);
        if (!cfg.quiet) err << doc.dump(2) << '\n';
    }
    return 0;
}

inline int run_masses(const RunConfig& cfg, std::ostream& out, std::ostream&) {
    const DerivedScales ds = derive_scales(cfg.params);
    const auto [m1, m2] = polariton_masses(cfg.params);
    nlohmann::json doc = to_json(cfg);
    doc["results"] = {{"m1_kg", m1},
                      {"m2_kg", m2},
                      {"m_ph_kg", ds.m_ph},
                      {"m_at_kg", ds.m_at},
                      {"Delta_rad_s", ds.Delta},
                      {"Delta_tilde_rad_s", ds.Delta_tilde},
                      {"rabi_gap_rad_s", 2.0 * cfg.params.g}};
    if (!cfg.out_path.empty()) {
        auto f = open_output(cfg.out_path);
        f << doc.dump(2) << '\n';
    } else {
        out << doc.dump(2) << '\n';
    }
    return 0;
}

inline int run_oracle(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
    CrystalParams p = cfg.params;
    if (cfg.M_override >= 3) p.M = cfg.M_override;
    const SpectrumComparison cmp = compare_to_analytic(p);
    const bool pass = cmp.max_rel_dev < spectrum_pass_threshold;
    nlohmann::json doc = to_json(cfg);
    doc["results"] = {{"M", p.M},
                      {"max_rel_dev", cmp.max_rel_dev},
                      {"threshold", spectrum_pass_threshold},
                      {"pass", pass}};
    if (!cfg.out_path.empty()) {
        auto f = open_output(cfg.out_path);
        write_spectrum_csv(f, cmp);
        out << doc.dump(2) << '\n';
    } else {
        write_spectrum_csv(out, cmp);
        if (!cfg.quiet) err << doc.dump(2) << '\n';
    }
    if (!pass) {
        err << "numerical failure: oracle spectrum deviates from the analytic branches "
               "(max_rel_dev = "
            << fmt_g17(cmp.max_rel_dev) << " >= " << fmt_g17(spectrum_pass_threshold) << ")\n";
        return 2;
    }
    return 0;
}

inline int run_degeneracy(const RunConfig& cfg, std::ostream& out, std::ostream&) {
    const GasState gas{cfg.n1, cfg.T, cfg.m2};
    const double td = degeneracy_temperature(gas.n1, gas.m2);
    const double lt = thermal_wavelength(gas.m2, gas.T);
    const double par = degeneracy_parameter(gas);
    out << "T_d [K]          " << fmt_g17(td) << '\n'
        << "Lambda_T [m]     " << fmt_g17(lt) << '\n'
        << "n1*Lambda_T [-]  " << fmt_g17(par) << '\n';
    if (!cfg.out_path.empty()) {
        nlohmann::json doc = to_json(cfg);
        doc["results"] = {{"T_d_K", td},
                          {"Lambda_T_m", lt},
                          {"n1_Lambda_T", par},
                          {"degenerate", par > 1.0}};
        auto f = open_output(cfg.out_path);
        f << doc.dump(2) << '\n';
    }
    return 0;
}

inline int run_packet(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
    namespace fs = std::filesystem;
    const fs::path dir = cfg.out_path.empty() ? fs::path("packet_out") : fs::path(cfg.out_path);
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec)
        throw std::invalid_argument("cannot create output directory '" + dir.string() +
                                    "': " + ec.message());

    const PacketOptions& po = cfg.packet;
    const DetuningSchedule schedule{po.schedule};
    const WavePacket initial = gaussian_packet(po.grid, po.carrier, po.width, po.f);
    const ProtocolTrace trace = evolve(initial, schedule, cfg.params, mode_from_string(po.mode),
                                       po.steps_per_segment, po.snapshots);

    {
        auto f = open_output((dir / "trace.csv").string());
        write_trace_csv(f, trace);
    }
    nlohmann::json snap_files = nlohmann::json::array();
    for (std::size_t i = 0; i < trace.snapshots.size(); ++i) {
        char name[32];
        std::snprintf(name, sizeof name, "envelope_%02zu.csv", i);
        auto f = open_output((dir / name).string());
        write_envelope_csv(f, po.grid, trace.snapshots[i]);
        snap_files.push_back({{"file", name},
                              {"tau_requested", trace.snapshots[i].tau_requested},
                              {"tau", trace.snapshots[i].tau}});
    }

    const double overlap = round_trip_overlap(initial, trace.final_state);
    const auto velocities = plateau_velocities(trace, cfg.params);
    nlohmann::json vel = nlohmann::json::array();
    for (const PlateauVelocity& v : velocities)
        vel.push_back({{"tau0", v.tau0},
                       {"tau1", v.tau1},
                       {"D", v.D},
                       {"measured", v.measured},
                       {"expected", v.expected}});

    const auto [norm_min_it, norm_max_it] =
        std::minmax_element(trace.norms.begin(), trace.norms.end());

    nlohmann::json results{{"round_trip_overlap", overlap},
                           {"plateau_velocities", vel},
                           {"norm_min", *norm_min_it},
                           {"norm_max", *norm_max_it},
                           {"snapshots", snap_files},
                           {"trace_file", "trace.csv"}};

    // Storage diagnostic: tau_b at the storage plateau's mass.
    const DetuningSegment* storage = nullptr;
    for (const DetuningSegment& s : po.schedule)
        if (s.is_plateau() && (storage == nullptr || s.d0 < storage->d0)) storage = &s;
    if (storage != nullptr) {
        const double m2 = mass_of_detuning(cfg.params, storage->d0);
        results["storage_D"] = storage->d0;
        results["m2_storage_kg"] = m2;
        results["tau_b_s"] = broadening_time(m2, po.f);
        results["t_stor_s"] = storage->duration() * derive_scales(cfg.params).m_ph * po.f *
                              po.f / constants::hbar;
        results["t_stor_over_tau_b"] = trace.t_stor_over_tau_b;
        if (!(trace.t_stor_over_tau_b < 0.1) && !cfg.quiet)
            err << "warning: storage time is not small against the broadening time "
                   "(t_stor/tau_b = "
                << fmt_g17(trace.t_stor_over_tau_b)
                << "); the stored envelope spreads appreciably\n";
    }

    nlohmann::json doc = to_json(cfg);
    doc["results"] = results;
    {
        auto f = open_output((dir / "summary.json").string());
        f << doc.dump(2) << '\n';
    }
    out << doc.dump(2) << '\n';
    return 0;
}

}  // namespace detail

// Executes a resolved config. Returns 0 on success, 1 on config errors,
// 2 on numerical failure. Data goes to files/`out`; diagnostics to `err`.
inline int run(const RunConfig& cfg, std::ostream& out = std::cout,
               std::ostream& err = std::cerr) {
    try {
        switch (cfg.command) {
            case Command::bands: return detail::run_bands(cfg, out, err);
            case Command::masses: return detail::run_masses(cfg, out, err);
            case Command::oracle: return detail::run_oracle(cfg, out, err);
            case Command::degeneracy: return detail::run_degeneracy(cfg, out, err);
            case Command::packet: return detail::run_packet(cfg, out, err);
        }
        throw std::invalid_argument("unknown command");
    } catch (const numerical_error& e) {
        err << "numerical failure: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return 1;
    }
}

// Parse argv into a resolved RunConfig. Throws std::invalid_argument on any
// parse/config problem (including --help requests; use cli_main for the
// standard help behavior). Echoes the resolved config to stderr unless
// --quiet.
inline RunConfig parse_config(int argc, const char* const* argv) {
    detail::CliState st;
    try {
        st.app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        throw std::invalid_argument(std::string(e.get_name()) + ": " + e.what());
    }
    RunConfig cfg = st.finalize();
    if (!cfg.quiet) std::cerr << to_json(cfg).dump(2) << '\n';
    return cfg;
}

inline RunConfig parse_config(const std::vector<std::string>& args) {
    std::vector<const char*> argv;
    argv.push_back("polc");
    for (const std::string& a : args) argv.push_back(a.c_str());
    return parse_config(static_cast<int>(argv.size()), argv.data());
}

// Standard entry point: parse, echo, dispatch, map exceptions to exit codes.
inline int cli_main(int argc, const char* const* argv) {
    detail::CliState st;
    try {
        st.app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = st.app.exit(e);  // prints help or the parse error
        return code == 0 ? 0 : 1;
    }
    RunConfig cfg;
    try {
        cfg = st.finalize();
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    if (!cfg.quiet) std::cerr << to_json(cfg).dump(2) << '\n';
    return run(cfg);
}

}  // namespace polc::cli
