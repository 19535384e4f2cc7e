#pragma once

#include <array>
#include <map>
#include <string>

#include "tqe/errors.hpp"
#include "tqe/units.hpp"

namespace tqe {

// How the omega-knob values are read: as the qubit's lab-frame frequency, or
// directly as the rotating-frame detuning delta = omega_t - omega_pump.
enum class FreqInterpretation { LabFrame, Detuning };

// Which gap enters the Boltzmann/tanh thermal factors: the knob value as
// written (RotatingFrame) or the reconstructed lab gap omega_pump + delta.
enum class ThermalGap { LabFrame, RotatingFrame };

// Meaning of the single quoted qubit rate Gamma: net decay (Gamma- - Gamma+)
// or the bare downward rate Gamma-.
enum class GammaConvention { Net, Bare };

struct EngineParameters {
    double omega_cpw = 0.0;         // cavity mode, rad/s
    double omega_pump = 0.0;        // drive frequency, rad/s
    double g_over_hbar = 0.0;       // qubit-cavity coupling g/hbar, rad/s
    double temperature_freq = 0.0;  // k_B T / hbar, rad/s
    double gamma_minus_net = 0.0;   // quoted qubit rate Gamma, rad/s
    double kappa_cpw = 0.0;         // cavity decay K-, rad/s
    std::array<double, 2> omega_knob_range{0.0, 0.0};  // [omega0, omega1max]
    std::array<double, 2> drive_knob_range{0.0, 0.0};  // [E0/hbar, E1max/hbar]
    FreqInterpretation freq_interpretation = FreqInterpretation::Detuning;
    ThermalGap thermal_gap = ThermalGap::RotatingFrame;
    GammaConvention gamma_convention = GammaConvention::Net;

    void validate() const {
        auto positive = [](double v, const char* name) {
            if (!(v > 0.0)) throw configuration_error(std::string(name) + " must be > 0");
        };
        positive(omega_cpw, "omega_cpw");
        positive(omega_pump, "omega_pump");
        positive(g_over_hbar, "g_over_hbar");
        positive(temperature_freq, "temperature_freq");
        positive(gamma_minus_net, "gamma_minus_net");
        positive(kappa_cpw, "kappa_cpw");
        if (!(omega_knob_range[0] > 0.0) || !(omega_knob_range[0] < omega_knob_range[1]))
            throw configuration_error("omega_knob_range must be ordered and positive");
        if (!(drive_knob_range[0] > 0.0) || !(drive_knob_range[0] < drive_knob_range[1]))
            throw configuration_error("drive_knob_range must be ordered and positive");
        if (omega_pump == omega_cpw && !(kappa_cpw > 0.0))
            throw configuration_error("kappa_cpw must be > 0 at pump-cavity resonance");
    }
};

// The two controllable variables: the working-substance frequency knob and
// the pump amplitude knob E_d/hbar, both rad/s.
struct Knobs {
    double omega_t = 0.0;
    double drive = 0.0;
};

// Which of the two knobs varies along a stroke.
enum class KnobKind { OmegaT, Drive };

inline void require_in_range(const EngineParameters& p, const Knobs& k) {
    if (k.omega_t < p.omega_knob_range[0] || k.omega_t > p.omega_knob_range[1])
        throw configuration_error("omega knob out of range");
    if (k.drive < p.drive_knob_range[0] || k.drive > p.drive_knob_range[1])
        throw configuration_error("drive knob out of range");
}

// Rotating-frame qubit gap delta for a knob setting.
inline double rotating_gap(const EngineParameters& p, const Knobs& k) {
    return p.freq_interpretation == FreqInterpretation::Detuning
               ? k.omega_t
               : k.omega_t - p.omega_pump;
}

// Gap used inside Boltzmann/tanh thermal factors. Under the LabFrame knob
// interpretation both modes coincide (omega_pump + delta == knob value).
inline double thermal_gap_value(const EngineParameters& p, const Knobs& k) {
    return p.thermal_gap == ThermalGap::RotatingFrame
               ? k.omega_t
               : p.omega_pump + rotating_gap(p, k);
}

// Raw bench-top table keyed by unit-bearing names; see to_internal_units.
using RawTable = std::map<std::string, double>;

namespace detail {
inline double take(const RawTable& t, const std::string& key) {
    auto it = t.find(key);
    if (it == t.end()) throw configuration_error("missing key: " + key);
    if (!(it->second > 0.0))
        throw configuration_error("nonpositive value for key: " + key);
    return it->second;
}
}  // namespace detail

// Converts a table of bench-top conventions (GHz/MHz frequencies quoted over
// 2pi, couplings and drives quoted over 2pi*hbar, temperature in mK) to
// internal rad/s units. Convention flags ride along unchanged.
inline EngineParameters to_internal_units(
    const RawTable& raw,
    FreqInterpretation fi = FreqInterpretation::Detuning,
    ThermalGap tg = ThermalGap::RotatingFrame,
    GammaConvention gc = GammaConvention::Net) {
    using detail::take;
    EngineParameters p;
    p.omega_cpw = ghz_to_rad(take(raw, "f_cpw_ghz"));
    p.omega_pump = ghz_to_rad(take(raw, "f_pump_ghz"));
    p.g_over_hbar = mhz_to_rad(take(raw, "g_over_2pi_hbar_mhz"));
    p.temperature_freq = mk_to_rad(take(raw, "temperature_mk"));
    p.gamma_minus_net = mhz_to_rad(take(raw, "gamma_over_2pi_mhz"));
    p.kappa_cpw = mhz_to_rad(take(raw, "kappa_over_2pi_mhz"));
    p.omega_knob_range = {mhz_to_rad(take(raw, "omega0_over_2pi_mhz")),
                          mhz_to_rad(take(raw, "omega1max_over_2pi_mhz"))};
    p.drive_knob_range = {mhz_to_rad(take(raw, "e0_over_2pi_hbar_mhz")),
                          mhz_to_rad(take(raw, "e1max_over_2pi_hbar_mhz"))};
    p.freq_interpretation = fi;
    p.thermal_gap = tg;
    p.gamma_convention = gc;
    p.validate();
    return p;
}

// The benchmark parameter set used throughout tests and as CLI defaults.
inline RawTable benchmark_table() {
    return {
        {"f_cpw_ghz", 4.94},
        {"f_pump_ghz", 4.94},
        {"g_over_2pi_hbar_mhz", 120.0},
        {"temperature_mk", 30.0},
        {"gamma_over_2pi_mhz", 2.0},
        {"kappa_over_2pi_mhz", 1.0},
        {"omega0_over_2pi_mhz", 100.0},
        {"omega1max_over_2pi_mhz", 1000.0},
        {"e0_over_2pi_hbar_mhz", 0.2},
        {"e1max_over_2pi_hbar_mhz", 2.0},
    };
}

inline EngineParameters benchmark_parameters(
    FreqInterpretation fi = FreqInterpretation::Detuning,
    ThermalGap tg = ThermalGap::RotatingFrame,
    GammaConvention gc = GammaConvention::Net) {
    return to_internal_units(benchmark_table(), fi, tg, gc);
}

}  // namespace tqe
