#pragma once

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>

#include "tqe/cycle.hpp"
#include "tqe/errors.hpp"
#include "tqe/thermo.hpp"
#include "tqe/units.hpp"

// CSV/JSON emission. All numeric fields use %.17g (full round-trip
// precision) so identical runs produce byte-identical files.

namespace tqe {

inline std::string fmt17(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

inline void write_text_file(const std::string& path,
                            const std::string& content) {
    const std::filesystem::path p(path);
    if (p.has_parent_path()) std::filesystem::create_directories(p.parent_path());
    std::ofstream out(p, std::ios::binary);
    if (!out) throw configuration_error("cannot write file: " + path);
    out << content;
}

// Long-form surface CSV: omega, drive, value, reason_code. Absent nodes keep
// the value field empty so numeric columns stay parseable.
inline std::string surface_csv(const SurfaceGrid& g) {
    std::string s = "omega_rad_s,drive_rad_s,value,reason_code\n";
    for (size_t i = 0; i < g.omega_axis.size(); ++i)
        for (size_t j = 0; j < g.drive_axis.size(); ++j) {
            s += fmt17(g.omega_axis[i]);
            s += ',';
            s += fmt17(g.drive_axis[j]);
            s += ',';
            if (g.present_at(i, j)) s += fmt17(g.value_at(i, j));
            s += ',';
            s += reason_text(g.reasons.empty()
                                 ? ReasonCode::None
                                 : g.reasons[i * g.drive_axis.size() + j]);
            s += '\n';
        }
    return s;
}

// Cycle CSV: one row per stroke plus a totals row carrying the efficiency.
inline std::string cycle_csv(const Cycle& cycle, const CycleEnergetics& e) {
    const double mhz = 1.0 / (kTwoPi * 1e6);
    std::string s =
        "stroke,knob,fixed_rad_s,from_rad_s,to_rad_s,"
        "work_hbar_rad_s,heat_hbar_rad_s,q_plus_hbar_rad_s,"
        "passive_heat_hbar_rad_s,ergotropy_change_hbar_rad_s,"
        "work_hbar_2pi_mhz,heat_hbar_2pi_mhz,q_plus_hbar_2pi_mhz,"
        "passive_heat_hbar_2pi_mhz,ergotropy_change_hbar_2pi_mhz,"
        "efficiency\n";
    for (int i = 0; i < 4; ++i) {
        const StrokeSpec& st = cycle.strokes[i];
        const StrokeEnergetics& en = e.per_stroke[i];
        s += std::to_string(i + 1);
        s += ',';
        s += st.which_knob == KnobKind::OmegaT ? "omega_t" : "drive";
        s += ',';
        s += fmt17(st.fixed_value);
        s += ',';
        s += fmt17(st.from);
        s += ',';
        s += fmt17(st.to);
        for (double v : {en.work, en.heat, en.positive_heat, en.passive_heat,
                         en.ergotropy_change}) {
            s += ',';
            s += fmt17(v);
        }
        for (double v : {en.work, en.heat, en.positive_heat, en.passive_heat,
                         en.ergotropy_change}) {
            s += ',';
            s += fmt17(v * mhz);
        }
        s += ",\n";
    }
    s += "total,,,,";
    for (double v : {e.total_work, e.total_heat, e.q_plus,
                     e.total_passive_heat, e.total_ergotropy_change}) {
        s += ',';
        s += fmt17(v);
    }
    for (double v : {e.total_work, e.total_heat, e.q_plus,
                     e.total_passive_heat, e.total_ergotropy_change}) {
        s += ',';
        s += fmt17(v * mhz);
    }
    s += ',';
    if (e.has_efficiency) s += fmt17(e.efficiency);
    s += '\n';
    return s;
}

}  // namespace tqe
