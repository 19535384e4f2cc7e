#pragma once

#include <cctype>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "tqe/errors.hpp"
#include "tqe/params.hpp"

// Flat key = value run configuration. Unit-bearing key names carry the raw
// table's conventions; unknown keys are rejected. Any key can be overridden
// by an environment variable TQE_<KEY UPPERCASED>.

namespace tqe {

struct RunConfig {
    RawTable table = benchmark_table();
    FreqInterpretation freq_interpretation = FreqInterpretation::Detuning;
    ThermalGap thermal_gap = ThermalGap::RotatingFrame;
    GammaConvention gamma_convention = GammaConvention::Net;
    int resolution = 50;
    int points_per_stroke = 100;
    int samples = 200;
    unsigned long long seed = 12345;
    std::string out_dir = "out";

    EngineParameters engine() const {
        return to_internal_units(table, freq_interpretation, thermal_gap,
                                 gamma_convention);
    }
};

namespace detail {

inline std::string trim(const std::string& s) {
    size_t b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return "";
    size_t e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

inline std::string lower(std::string s) {
    for (char& c : s) c = (char)std::tolower((unsigned char)c);
    return s;
}

inline double parse_double(const std::string& key, const std::string& v) {
    char* end = nullptr;
    const double x = std::strtod(v.c_str(), &end);
    if (end == v.c_str() || *end != '\0')
        throw configuration_error("key '" + key + "': not a number: " + v);
    return x;
}

inline long long parse_int(const std::string& key, const std::string& v) {
    char* end = nullptr;
    const long long x = std::strtoll(v.c_str(), &end, 10);
    if (end == v.c_str() || *end != '\0')
        throw configuration_error("key '" + key + "': not an integer: " + v);
    return x;
}

}  // namespace detail

// Central assignment used by both the file parser and env overrides.
inline void config_set(RunConfig& c, const std::string& key,
                       const std::string& value) {
    using namespace detail;
    if (c.table.count(key)) {
        c.table[key] = parse_double(key, value);
        return;
    }
    const std::string v = lower(trim(value));
    if (key == "freq_interpretation") {
        if (v == "detuning") c.freq_interpretation = FreqInterpretation::Detuning;
        else if (v == "labframe") c.freq_interpretation = FreqInterpretation::LabFrame;
        else throw configuration_error("key 'freq_interpretation': expected detuning|labframe, got " + value);
    } else if (key == "thermal_gap") {
        if (v == "rotatingframe") c.thermal_gap = ThermalGap::RotatingFrame;
        else if (v == "labframe") c.thermal_gap = ThermalGap::LabFrame;
        else throw configuration_error("key 'thermal_gap': expected rotatingframe|labframe, got " + value);
    } else if (key == "gamma_convention") {
        if (v == "net") c.gamma_convention = GammaConvention::Net;
        else if (v == "bare") c.gamma_convention = GammaConvention::Bare;
        else throw configuration_error("key 'gamma_convention': expected net|bare, got " + value);
    } else if (key == "resolution") {
        c.resolution = (int)parse_int(key, value);
        if (c.resolution < 2) throw configuration_error("resolution must be >= 2");
    } else if (key == "points_per_stroke") {
        c.points_per_stroke = (int)parse_int(key, value);
        if (c.points_per_stroke < 2) throw configuration_error("points_per_stroke must be >= 2");
    } else if (key == "samples") {
        c.samples = (int)parse_int(key, value);
        if (c.samples < 1) throw configuration_error("samples must be >= 1");
    } else if (key == "seed") {
        c.seed = (unsigned long long)parse_int(key, value);
    } else if (key == "out_dir") {
        c.out_dir = trim(value);
    } else {
        throw configuration_error("unknown key: " + key);
    }
}

inline std::vector<std::string> config_keys(const RunConfig& c) {
    std::vector<std::string> keys;
    for (const auto& [k, v] : c.table) keys.push_back(k);
    for (const char* k :
         {"freq_interpretation", "thermal_gap", "gamma_convention",
          "resolution", "points_per_stroke", "samples", "seed", "out_dir"})
        keys.push_back(k);
    return keys;
}

inline void parse_config_text(RunConfig& c, std::istream& in) {
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const std::string t = detail::trim(line);
        if (t.empty() || t[0] == '#') continue;
        const size_t eq = t.find('=');
        if (eq == std::string::npos)
            throw configuration_error("line " + std::to_string(lineno) +
                                      ": expected key = value");
        config_set(c, detail::trim(t.substr(0, eq)),
                   detail::trim(t.substr(eq + 1)));
    }
}

inline void apply_env_overrides(RunConfig& c) {
    for (const std::string& key : config_keys(c)) {
        std::string env = "TQE_" + key;
        for (char& ch : env) ch = (char)std::toupper((unsigned char)ch);
        if (const char* v = std::getenv(env.c_str())) config_set(c, key, v);
    }
}

// Built-in defaults, then the optional file, then environment overrides.
inline RunConfig load_config(const std::string& path) {
    RunConfig c;
    if (!path.empty()) {
        std::ifstream in(path);
        if (!in) throw configuration_error("cannot read config file: " + path);
        parse_config_text(c, in);
    }
    apply_env_overrides(c);
    return c;
}

}  // namespace tqe
