#pragma once

#include <fstream>
#include <initializer_list>
#include <stdexcept>
#include <string>

#include <json.hpp>

#include "spinbath/experiments.hpp"

namespace spinbath {

class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

namespace detail {

using nlohmann::json;

inline void reject_unknown(const json& j, std::initializer_list<const char*> known, const std::string& where) {
    for (const auto& [key, _] : j.items()) {
        bool ok = false;
        for (const char* k : known) ok = ok || key == k;
        if (!ok) throw ConfigError("config: unknown key '" + key + "' in " + where);
    }
}

template <typename T>
void read_into(const json& j, const char* key, T& out) {
    if (j.contains(key)) out = j.at(key).get<T>();
}

inline void read_dot(const json& j, DotConfig& d) {
    if (!j.is_object()) throw ConfigError("config: dot entries must be objects");
    reject_unknown(j, {"n_spins", "n_cells", "a_total_uev", "l_perp_nm", "l_z_nm", "seed", "grid_extent"}, "dot");
    read_into(j, "n_spins", d.n_spins);
    read_into(j, "n_cells", d.geometry.n_cells);
    read_into(j, "a_total_uev", d.a_total_uev);
    read_into(j, "l_perp_nm", d.geometry.l_perp_nm);
    read_into(j, "l_z_nm", d.geometry.l_z_nm);
    read_into(j, "seed", d.geometry.rng_seed);
    read_into(j, "grid_extent", d.geometry.grid_extent);
}

inline json dot_to_json(const DotConfig& d) {
    return {{"n_spins", d.n_spins},         {"n_cells", d.geometry.n_cells}, {"a_total_uev", d.a_total_uev},
            {"l_perp_nm", d.geometry.l_perp_nm}, {"l_z_nm", d.geometry.l_z_nm},   {"seed", d.geometry.rng_seed},
            {"grid_extent", d.geometry.grid_extent}};
}

}  // namespace detail

// Missing keys keep their defaults; unknown keys are rejected so misspelt unit suffixes fail loudly.
inline ExperimentConfig config_from_json(const nlohmann::json& j) {
    using detail::read_into;
    ExperimentConfig cfg;
    try {
        if (!j.is_object()) throw ConfigError("config: top level must be an object");
        detail::reject_unknown(j, {"material", "dots", "grid", "bell"}, "top level");
        if (j.contains("material")) {
            const auto& m = j.at("material");
            detail::reject_unknown(m, {"g_factor", "cell_volume_nm3", "isotopes"}, "material");
            read_into(m, "g_factor", cfg.material.g_factor);
            read_into(m, "cell_volume_nm3", cfg.material.cell_volume_nm3);
            if (m.contains("isotopes")) {
                cfg.material.isotopes.clear();
                for (const auto& iso : m.at("isotopes")) {
                    detail::reject_unknown(iso, {"name", "a0_uev", "abundance", "sublattice", "spin"}, "isotope");
                    IsotopeSpec s;
                    s.name = iso.at("name").get<std::string>();
                    s.a0_uev = iso.at("a0_uev").get<double>();
                    read_into(iso, "abundance", s.abundance);
                    read_into(iso, "spin", s.spin);
                    s.sublattice = iso.value("sublattice", s.name);
                    cfg.material.isotopes.push_back(s);
                }
            }
        }
        if (j.contains("dots")) {
            const auto& d = j.at("dots");
            if (d.is_array()) {
                if (d.size() != 2) throw ConfigError("config: 'dots' must list exactly two dots");
                detail::read_dot(d[0], cfg.dots[0]);
                detail::read_dot(d[1], cfg.dots[1]);
            } else {
                detail::read_dot(d, cfg.dots[0]);
                cfg.dots[1] = cfg.dots[0];
            }
        }
        if (j.contains("grid")) {
            const auto& g = j.at("grid");
            detail::reject_unknown(g, {"t_max_ns", "t_steps", "horizon_ns", "zero_tol"}, "grid");
            read_into(g, "t_max_ns", cfg.grid.t_max_ns);
            read_into(g, "t_steps", cfg.grid.t_steps);
            cfg.horizon_ns = cfg.grid.t_max_ns;
            read_into(g, "horizon_ns", cfg.horizon_ns);
            read_into(g, "zero_tol", cfg.zero_tol);
        }
        if (j.contains("bell")) cfg.bell = parse_bell_label(j.at("bell").get<std::string>());
        cfg.validate();
    } catch (const ConfigError&) {
        throw;
    } catch (const std::exception& e) {
        throw ConfigError(std::string("config: ") + e.what());
    }
    return cfg;
}

inline ExperimentConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("config: cannot open " + path);
    nlohmann::json j;
    try {
        in >> j;
    } catch (const std::exception& e) {
        throw ConfigError("config: " + path + ": " + e.what());
    }
    return config_from_json(j);
}

inline nlohmann::json config_to_json(const ExperimentConfig& cfg) {
    nlohmann::json isotopes = nlohmann::json::array();
    for (const auto& iso : cfg.material.isotopes)
        isotopes.push_back({{"name", iso.name}, {"a0_uev", iso.a0_uev}, {"abundance", iso.abundance},
                            {"sublattice", iso.sublattice}, {"spin", iso.spin}});
    return {
        {"material", {{"g_factor", cfg.material.g_factor}, {"cell_volume_nm3", cfg.material.cell_volume_nm3}, {"isotopes", isotopes}}},
        {"dots", {detail::dot_to_json(cfg.dots[0]), detail::dot_to_json(cfg.dots[1])}},
        {"grid", {{"t_max_ns", cfg.grid.t_max_ns}, {"t_steps", cfg.grid.t_steps}, {"horizon_ns", cfg.horizon_ns}, {"zero_tol", cfg.zero_tol}}},
        {"bell", std::string(to_string(cfg.bell))},
    };
}

}  // namespace spinbath
