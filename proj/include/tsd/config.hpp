#pragma once

// Flat key=value run configuration with [section] headers.
// Frequencies ending in _mhz are Omega/2pi in MHz; _ghz likewise.

#include "tsd/ensembles.hpp"
#include "tsd/sequence.hpp"
#include "tsd/stark.hpp"
#include "tsd/types.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace tsd {

class ConfigError : public std::runtime_error {
public:
    ConfigError(std::string key, const std::string& what) : std::runtime_error(what), key_(std::move(key)) {}
    const std::string& key() const noexcept { return key_; }

private:
    std::string key_;
};

struct ConfigEntry {
    std::string value;
    std::string origin;  // "file:line" for diagnostics
};

// "section.key" -> entry; later documents override earlier ones.
using ConfigMap = std::map<std::string, ConfigEntry>;

namespace detail {

inline std::string trim(std::string_view s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string_view::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return std::string(s.substr(b, e - b + 1));
}

inline std::string lower(std::string s) {
    std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return s;
}

}  // namespace detail

inline void parse_config_text(std::string_view text, const std::string& source, ConfigMap& into) {
    std::string section;
    std::size_t line_no = 0;
    std::istringstream in{std::string(text)};
    for (std::string raw; std::getline(in, raw);) {
        ++line_no;
        const auto hash = raw.find_first_of("#;");
        const std::string line = detail::trim(hash == std::string::npos ? raw : raw.substr(0, hash));
        if (line.empty()) continue;
        const std::string where = source + ":" + std::to_string(line_no);
        if (line.front() == '[') {
            if (line.back() != ']' || line.size() < 3) throw ConfigError(line, where + ": malformed section header '" + line + "'");
            section = detail::lower(detail::trim(line.substr(1, line.size() - 2)));
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string::npos) throw ConfigError(line, where + ": expected key = value, got '" + line + "'");
        const std::string key = detail::lower(detail::trim(line.substr(0, eq)));
        if (key.empty()) throw ConfigError(line, where + ": empty key");
        if (section.empty()) throw ConfigError(key, where + ": key '" + key + "' appears before any [section]");
        into[section + "." + key] = {detail::trim(line.substr(eq + 1)), where};
    }
}

inline void parse_config_file(const std::string& path, ConfigMap& into) {
    std::ifstream f(path);
    if (!f) throw ConfigError(path, "cannot open config file '" + path + "'");
    std::stringstream ss;
    ss << f.rdbuf();
    parse_config_text(ss.str(), path, into);
}

// Command-line "section.key=value".
inline void apply_override(std::string_view assignment, ConfigMap& into) {
    const auto eq = assignment.find('=');
    const std::string key = detail::lower(detail::trim(assignment.substr(0, eq)));
    if (eq == std::string_view::npos || key.find('.') == std::string::npos)
        throw ConfigError(std::string(assignment), "override must look like section.key=value: '" + std::string(assignment) + "'");
    into[key] = {detail::trim(assignment.substr(eq + 1)), "--set"};
}

struct StarkSettings {
    std::string species = "cesium";
    double omega_q = cesium_hyperfine;
    std::optional<double> c_factor_sq;  // computed from Clebsch-Gordan sums when absent (cesium)
    FieldRatioRelation relation{};
    double rabi1 = mhz_to_rad_per_s(100.0);
    double rabi2 = mhz_to_rad_per_s(100.0);
    std::optional<double> delta_a, delta_b;
};

struct VelocityPoint {
    double v_c = 0.0;
    double v_t = 0.0;
};

struct RunConfig {
    std::string preset;
    std::string label;
    GateChannelConfig gate{};
    SequenceOptions sequence{};
    EnsembleOptions ensemble{};
    VelocityPoint velocity{};          // m/s, single-point cnot and bell runs
    std::vector<double> temperatures;  // K
    std::vector<double> sigmas;        // relative widths
    std::vector<double> interactions;  // rad/s
    std::vector<double> taus;          // s
    std::string output_dir = "tsd_out";
    bool traces = false;
    StarkSettings stark{};
    double demo_alpha = std::sqrt(15.0);
    double demo_t0_fraction = 0.5;
};

namespace detail {

inline double to_double(const std::string& key, const ConfigEntry& e) {
    std::string v = lower(e.value);
    if (!v.empty() && v.front() == '+') v.erase(0, 1);
    if (v == "inf" || v == "infinite" || v == "infinity") return INFINITE_BLOCKADE;
    double out = 0.0;
    const char* first = v.data();
    const char* last = first + v.size();
    const auto [ptr, ec] = std::from_chars(first, last, out);
    if (ec != std::errc{} || ptr != last || v.empty())
        throw ConfigError(key, e.origin + ": key '" + key + "' expects a number, got '" + e.value + "'");
    return out;
}

inline double to_finite(const std::string& key, const ConfigEntry& e) {
    const double v = to_double(key, e);
    if (!std::isfinite(v)) throw ConfigError(key, e.origin + ": key '" + key + "' must be finite");
    return v;
}

inline std::vector<double> to_list(const std::string& key, const ConfigEntry& e) {
    std::vector<double> out;
    std::stringstream ss(e.value);
    for (std::string item; std::getline(ss, item, ',');) {
        const std::string t = trim(item);
        if (t.empty()) continue;
        out.push_back(to_finite(key, {t, e.origin}));
    }
    return out;
}

inline bool to_bool(const std::string& key, const ConfigEntry& e) {
    const std::string v = lower(e.value);
    if (v == "true" || v == "1" || v == "yes" || v == "on") return true;
    if (v == "false" || v == "0" || v == "no" || v == "off") return false;
    throw ConfigError(key, e.origin + ": key '" + key + "' expects true/false, got '" + e.value + "'");
}

inline long to_int(const std::string& key, const ConfigEntry& e) {
    const double v = to_finite(key, e);
    if (v != std::floor(v)) throw ConfigError(key, e.origin + ": key '" + key + "' expects an integer");
    return static_cast<long>(v);
}

}  // namespace detail

inline const std::vector<std::string>& known_config_keys() {
    static const std::vector<std::string> keys{
        "protocol.omega_c_mhz",      "protocol.omega_t_mhz",      "protocol.ratio_override",
        "protocol.v_interaction_mhz", "protocol.epsilon_ns",      "protocol.case",
        "protocol.case2_flip",       "protocol.target2_k_sign",   "protocol.target0_scale",
        "protocol.target1_scale",    "protocol.samples_per_pulse", "protocol.velocity_c",
        "protocol.velocity_t",       "ensemble.temperatures_uk",  "ensemble.sigmas_percent",
        "ensemble.interactions_mhz", "ensemble.taus_us",          "ensemble.grid_points",
        "ensemble.v_max",            "ensemble.workers",          "output.directory",
        "output.traces",             "stark.species",             "stark.omega_q_ghz",
        "stark.c_factor_sq",         "stark.polarizability_ratio", "stark.resonant_coefficient",
        "stark.rabi1_mhz",           "stark.rabi2_mhz",           "stark.delta_a_ghz",
        "stark.delta_b_ghz",         "demo.alpha",                "demo.t0_fraction",
        "meta.label",
    };
    return keys;
}

inline RunConfig build_run_config(const ConfigMap& m) {
    using namespace detail;
    const auto& known = known_config_keys();
    for (const auto& [key, entry] : m)
        if (std::find(known.begin(), known.end(), key) == known.end())
            throw ConfigError(key, entry.origin + ": unknown config key '" + key + "'");

    auto get = [&](const std::string& key) -> const ConfigEntry* {
        const auto it = m.find(key);
        return it == m.end() ? nullptr : &it->second;
    };
    RunConfig rc;
    if (auto e = get("meta.label")) rc.label = e->value;

    double omega_c = rc.gate.omega_c;
    if (auto e = get("protocol.omega_c_mhz")) omega_c = mhz_to_rad_per_s(to_finite("protocol.omega_c_mhz", *e));
    if (!(omega_c > 0.0)) throw ConfigError("protocol.omega_c_mhz", "protocol.omega_c_mhz must be positive");
    rc.gate.omega_c = omega_c;
    rc.gate.omega_t = design_ratio * omega_c;
    if (auto e = get("protocol.ratio_override")) rc.sequence.allow_ratio_override = to_bool("protocol.ratio_override", *e);
    if (auto e = get("protocol.omega_t_mhz")) {
        const double ot = mhz_to_rad_per_s(to_finite("protocol.omega_t_mhz", *e));
        if (!(ot > 0.0)) throw ConfigError("protocol.omega_t_mhz", "protocol.omega_t_mhz must be positive");
        if (std::abs(ot / omega_c - design_ratio) > 1e-9 * design_ratio && !rc.sequence.allow_ratio_override)
            throw ConfigError("protocol.omega_t_mhz",
                              e->origin + ": omega_t/omega_c differs from sqrt(6)/2; set protocol.ratio_override = true");
        rc.gate.omega_t = ot;
    }
    if (auto e = get("protocol.v_interaction_mhz")) {
        const double v = to_double("protocol.v_interaction_mhz", *e);
        rc.gate.v_interaction = std::isinf(v) ? INFINITE_BLOCKADE : mhz_to_rad_per_s(v);
    }
    if (auto e = get("protocol.epsilon_ns")) {
        rc.sequence.epsilon = to_finite("protocol.epsilon_ns", *e) * 1e-9;
        if (rc.sequence.epsilon < 0.0) throw ConfigError("protocol.epsilon_ns", "protocol.epsilon_ns must be >= 0");
    }
    if (auto e = get("protocol.case")) {
        const long c = to_int("protocol.case", *e);
        if (c != 1 && c != 2) throw ConfigError("protocol.case", e->origin + ": protocol.case must be 1 or 2");
        rc.sequence.case_id = static_cast<int>(c);
    }
    if (auto e = get("protocol.case2_flip")) {
        const std::string v = lower(e->value);
        if (v == "target" || v == "target_only") rc.sequence.case2_flip = Case2Flip::target_only;
        else if (v == "all" || v == "all_channels") rc.sequence.case2_flip = Case2Flip::all_channels;
        else throw ConfigError("protocol.case2_flip", e->origin + ": protocol.case2_flip must be 'target' or 'all'");
    }
    if (auto e = get("protocol.target2_k_sign")) {
        const long s = to_int("protocol.target2_k_sign", *e);
        if (s != 1 && s != -1) throw ConfigError("protocol.target2_k_sign", "protocol.target2_k_sign must be +1 or -1");
        rc.gate.target2_k_sign = static_cast<int>(s);
    }
    if (auto e = get("protocol.target0_scale")) rc.gate.target_scale[0] = to_finite("protocol.target0_scale", *e);
    if (auto e = get("protocol.target1_scale")) rc.gate.target_scale[1] = to_finite("protocol.target1_scale", *e);
    if (auto e = get("protocol.samples_per_pulse")) {
        const long n = to_int("protocol.samples_per_pulse", *e);
        if (n < 1) throw ConfigError("protocol.samples_per_pulse", "protocol.samples_per_pulse must be >= 1");
        rc.sequence.samples_per_pulse = static_cast<std::size_t>(n);
    }
    if (auto e = get("protocol.velocity_c")) rc.velocity.v_c = to_finite("protocol.velocity_c", *e);
    if (auto e = get("protocol.velocity_t")) rc.velocity.v_t = to_finite("protocol.velocity_t", *e);

    if (auto e = get("ensemble.temperatures_uk")) {
        for (double t : to_list("ensemble.temperatures_uk", *e)) {
            if (!(t > 0.0)) throw ConfigError("ensemble.temperatures_uk", "temperatures must be positive");
            rc.temperatures.push_back(t * 1e-6);
        }
    }
    if (auto e = get("ensemble.sigmas_percent")) {
        for (double s : to_list("ensemble.sigmas_percent", *e)) {
            if (!(s >= 0.0 && s < 20.0)) throw ConfigError("ensemble.sigmas_percent", "sigmas must lie in [0, 20) percent");
            rc.sigmas.push_back(s / 100.0);
        }
    }
    if (auto e = get("ensemble.interactions_mhz"))
        for (double v : to_list("ensemble.interactions_mhz", *e)) rc.interactions.push_back(mhz_to_rad_per_s(v));
    if (auto e = get("ensemble.taus_us")) {
        for (double t : to_list("ensemble.taus_us", *e)) {
            if (!(t > 0.0)) throw ConfigError("ensemble.taus_us", "lifetimes must be positive");
            rc.taus.push_back(t * 1e-6);
        }
    }
    if (auto e = get("ensemble.grid_points")) {
        const long n = to_int("ensemble.grid_points", *e);
        if (n < 2) throw ConfigError("ensemble.grid_points", "ensemble.grid_points must be >= 2");
        rc.ensemble.grid_points = static_cast<std::size_t>(n);
    }
    if (auto e = get("ensemble.v_max")) {
        rc.ensemble.v_max = to_finite("ensemble.v_max", *e);
        if (!(rc.ensemble.v_max > 0.0)) throw ConfigError("ensemble.v_max", "ensemble.v_max must be positive");
    }
    if (auto e = get("ensemble.workers")) {
        const long n = to_int("ensemble.workers", *e);
        if (n < 0) throw ConfigError("ensemble.workers", "ensemble.workers must be >= 0");
        rc.ensemble.workers = static_cast<std::size_t>(n);
    }

    if (auto e = get("output.directory")) rc.output_dir = e->value;
    if (auto e = get("output.traces")) rc.traces = to_bool("output.traces", *e);

    if (auto e = get("stark.species")) {
        rc.stark.species = lower(e->value);
        if (rc.stark.species == "cesium") rc.stark.omega_q = cesium_hyperfine;
        else if (rc.stark.species == "rubidium") rc.stark.omega_q = rubidium_hyperfine;
        else if (rc.stark.species != "custom")
            throw ConfigError("stark.species", "stark.species must be cesium, rubidium or custom");
    }
    if (auto e = get("stark.omega_q_ghz")) rc.stark.omega_q = two_pi * 1e9 * to_finite("stark.omega_q_ghz", *e);
    if (auto e = get("stark.c_factor_sq")) rc.stark.c_factor_sq = to_finite("stark.c_factor_sq", *e);
    if (auto e = get("stark.polarizability_ratio"))
        rc.stark.relation.polarizability_ratio = to_finite("stark.polarizability_ratio", *e);
    if (auto e = get("stark.resonant_coefficient"))
        rc.stark.relation.resonant_coefficient = to_finite("stark.resonant_coefficient", *e);
    if (auto e = get("stark.rabi1_mhz")) rc.stark.rabi1 = mhz_to_rad_per_s(to_finite("stark.rabi1_mhz", *e));
    if (auto e = get("stark.rabi2_mhz")) rc.stark.rabi2 = mhz_to_rad_per_s(to_finite("stark.rabi2_mhz", *e));
    if (auto e = get("stark.delta_a_ghz")) rc.stark.delta_a = two_pi * 1e9 * to_finite("stark.delta_a_ghz", *e);
    if (auto e = get("stark.delta_b_ghz")) rc.stark.delta_b = two_pi * 1e9 * to_finite("stark.delta_b_ghz", *e);

    if (auto e = get("demo.alpha")) {
        rc.demo_alpha = to_finite("demo.alpha", *e);
        if (rc.demo_alpha < 0.0) throw ConfigError("demo.alpha", "demo.alpha must be >= 0");
    }
    if (auto e = get("demo.t0_fraction")) {
        rc.demo_t0_fraction = to_finite("demo.t0_fraction", *e);
        if (!(rc.demo_t0_fraction >= 0.0 && rc.demo_t0_fraction < 1.0))
            throw ConfigError("demo.t0_fraction", "demo.t0_fraction must lie in [0, 1)");
    }

    try {
        rc.gate.validate();
    } catch (const std::invalid_argument& ex) {
        throw ConfigError("protocol", std::string("invalid protocol settings: ") + ex.what());
    }
    return rc;
}

struct Preset {
    std::string_view name;
    std::string_view label;
    std::string_view text;
};

// Parameter sets of the published studies. Labels end up as CSV header comments.
inline const std::vector<Preset>& presets() {
    static const std::vector<Preset> all{
        {"ideal", "ideal blockade at rest: exact CNOT",
         "[protocol]\nomega_c_mhz = 3.5\nv_interaction_mhz = inf\n"},
        {"table2-case1", "table2 case 1: Doppler-averaged rotation error, V/2pi = 500 MHz, Omega_c/2pi = 3.5 MHz",
         "[protocol]\nomega_c_mhz = 3.5\nv_interaction_mhz = 500\ncase = 1\n"
         "[ensemble]\ntemperatures_uk = 5, 10, 15, 20, 50\n"},
        {"table2-case1-5uK", "table2 case 1 at 5 uK: Doppler-averaged rotation error",
         "[protocol]\nomega_c_mhz = 3.5\nv_interaction_mhz = 500\ncase = 1\n[ensemble]\ntemperatures_uk = 5\n"},
        {"table2-case2", "table2 case 2 (target beams reversed in pulse 2): Doppler-averaged rotation error",
         "[protocol]\nomega_c_mhz = 3.5\nv_interaction_mhz = 500\ncase = 2\n"
         "[ensemble]\ntemperatures_uk = 5, 10, 15, 20, 50\n"},
        {"table3-case1", "table3 case 1: Doppler-averaged Bell-state error",
         "[protocol]\nomega_c_mhz = 3.5\nv_interaction_mhz = 500\ncase = 1\n"
         "[ensemble]\ntemperatures_uk = 5, 10, 15, 20, 50\n"},
        {"table3-case2", "table3 case 2: Doppler-averaged Bell-state error",
         "[protocol]\nomega_c_mhz = 3.5\nv_interaction_mhz = 500\ncase = 2\n"
         "[ensemble]\ntemperatures_uk = 5, 10, 15, 20, 50\n"},
        {"bell-counterprop", "counterpropagating target beams, case 1: Doppler-averaged Bell-state error",
         "[protocol]\nomega_c_mhz = 3.5\nv_interaction_mhz = 500\ncase = 1\ntarget2_k_sign = -1\n"
         "[ensemble]\ntemperatures_uk = 5, 10, 15, 20, 50\n"},
        {"table5", "table5: Doppler-averaged rotation error versus interaction V",
         "[protocol]\nomega_c_mhz = 3.5\nv_interaction_mhz = 500\ncase = 1\n"
         "[ensemble]\ntemperatures_uk = 5, 10, 15, 20, 50\ninteractions_mhz = 50, 100, 200, 300, 400\n"},
        {"fig4", "fig4: rotation error under Gaussian target Rabi-amplitude fluctuation",
         "[protocol]\nomega_c_mhz = 3.5\nv_interaction_mhz = 500\n[ensemble]\nsigmas_percent = 1, 2, 3, 4, 5\n"},
        {"decay", "Rydberg-decay error estimate at Omega_c/2pi = 3.6 MHz",
         "[protocol]\nomega_c_mhz = 3.6\nv_interaction_mhz = inf\n[ensemble]\ntaus_us = 400, 150\n"},
        {"cesium", "AC-Stark compensation, cesium clock qubit",
         "[stark]\nspecies = cesium\n"},
        {"rubidium", "AC-Stark compensation, rubidium clock qubit (C^2 = 8)",
         "[stark]\nspecies = rubidium\nc_factor_sq = 8\n"},
        {"two-state", "two-state slow-down, alpha = sqrt(15), t0 = t1/2",
         "[demo]\nalpha = 3.872983346207417\nt0_fraction = 0.5\n"},
    };
    return all;
}

inline const Preset& find_preset(std::string_view name) {
    for (const Preset& p : presets())
        if (p.name == name) return p;
    throw ConfigError(std::string(name), "unknown preset '" + std::string(name) + "'");
}

}  // namespace tsd
