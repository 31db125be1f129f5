#pragma once

#include <fstream>
#include <initializer_list>
#include <stdexcept>
#include <string>

#include <json.hpp>

#include "polc/params.hpp"

namespace polc {

namespace detail {

inline double require_number(const nlohmann::json& j, const std::string& key) {
    const auto& v = j.at(key);
    if (!v.is_number()) throw std::invalid_argument("key '" + key + "' must be a number");
    return v.get<double>();
}

}  // namespace detail

// Flat parameter document. Required: M, l_m, g_rad_s, omega_ph_rad_s,
// omega_ab_rad_s. Hoppings come either as alpha_rad_s + beta_rad_s or as the
// m_ph_kg + m_at_kg mass alternates — exactly one complete pair. Any unknown
// key is an error: a typo must never silently fall back to a default.
inline CrystalParams params_from_json(const nlohmann::json& j) {
    if (!j.is_object()) throw std::invalid_argument("parameter document must be a JSON object");

    static const char* known[] = {"M",          "l_m",          "g_rad_s",
                                  "alpha_rad_s", "beta_rad_s",   "omega_ph_rad_s",
                                  "omega_ab_rad_s", "m_ph_kg",   "m_at_kg"};
    for (const auto& item : j.items()) {
        bool ok = false;
        for (const char* k : known) ok = ok || (item.key() == k);
        if (!ok) throw std::invalid_argument("unknown parameter key '" + item.key() + "'");
    }
    for (const char* k : {"M", "l_m", "g_rad_s", "omega_ph_rad_s", "omega_ab_rad_s"})
        if (!j.contains(k))
            throw std::invalid_argument("missing required parameter key '" + std::string(k) + "'");

    if (!j.at("M").is_number_integer())
        throw std::invalid_argument("key 'M' must be an integer");
    const int M = j.at("M").get<int>();
    const double l = detail::require_number(j, "l_m");
    const double g = detail::require_number(j, "g_rad_s");
    const double omega_ph = detail::require_number(j, "omega_ph_rad_s");
    const double omega_ab = detail::require_number(j, "omega_ab_rad_s");

    const bool has_alpha = j.contains("alpha_rad_s");
    const bool has_beta = j.contains("beta_rad_s");
    const bool has_mph = j.contains("m_ph_kg");
    const bool has_mat = j.contains("m_at_kg");
    if ((has_alpha || has_beta) && (has_mph || has_mat))
        throw std::invalid_argument(
            "give either alpha_rad_s/beta_rad_s or m_ph_kg/m_at_kg, not a mix");
    if (has_alpha != has_beta)
        throw std::invalid_argument("alpha_rad_s and beta_rad_s must be given together");
    if (has_mph != has_mat)
        throw std::invalid_argument("m_ph_kg and m_at_kg must be given together");
    if (!has_alpha && !has_mph)
        throw std::invalid_argument(
            "missing hoppings: give alpha_rad_s/beta_rad_s or m_ph_kg/m_at_kg");

    CrystalParams p =
        has_alpha
            ? CrystalParams::from_hoppings(M, l, g, detail::require_number(j, "alpha_rad_s"),
                                           detail::require_number(j, "beta_rad_s"), omega_ph,
                                           omega_ab)
            : CrystalParams::from_masses(M, l, g, detail::require_number(j, "m_ph_kg"),
                                         detail::require_number(j, "m_at_kg"), omega_ph,
                                         omega_ab);
    return validate_params(p);
}

// Canonical hopping-form serialization (lossless round trip through
// params_from_json).
inline nlohmann::json params_to_json(const CrystalParams& p) {
    return nlohmann::json{{"M", p.M},
                          {"l_m", p.l},
                          {"g_rad_s", p.g},
                          {"alpha_rad_s", p.alpha},
                          {"beta_rad_s", p.beta},
                          {"omega_ph_rad_s", p.omega_ph},
                          {"omega_ab_rad_s", p.omega_ab}};
}

inline CrystalParams load_params(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::invalid_argument("cannot open parameter file '" + path + "'");
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw std::invalid_argument("parameter file '" + path + "' is not valid JSON: " +
                                    e.what());
    }
    try {
        return params_from_json(j);
    } catch (const std::invalid_argument& e) {
        throw std::invalid_argument("parameter file '" + path + "': " + e.what());
    }
}

inline void save_params(const std::string& path, const CrystalParams& p) {
    std::ofstream out(path);
    if (!out) throw std::invalid_argument("cannot open output file '" + path + "'");
    out << params_to_json(p).dump(2) << '\n';
}

}  // namespace polc
