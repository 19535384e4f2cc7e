#pragma once

// Internal unit system: hbar = k_B = 1, every energy/rate/frequency is an
// angular frequency in rad/s. Conversions from bench-top conventions
// (frequencies quoted as f = omega/2pi, couplings as g/2pi*hbar, T in kelvin)
// live here and nowhere else.

namespace tqe {

inline constexpr double kTwoPi = 6.283185307179586476925286766559;

// k_B / hbar in rad/(s*K), from CODATA exact values.
inline constexpr double kBoltzmannOverHbar = 1.380649e-23 / 1.054571817e-34;

constexpr double mhz_to_rad(double f_mhz) { return kTwoPi * f_mhz * 1e6; }
constexpr double ghz_to_rad(double f_ghz) { return kTwoPi * f_ghz * 1e9; }
constexpr double rad_to_mhz(double w) { return w / (kTwoPi * 1e6); }

// Temperature in millikelvin -> k_B T / hbar as an angular frequency.
constexpr double mk_to_rad(double t_mk) {
    return kBoltzmannOverHbar * t_mk * 1e-3;
}

}  // namespace tqe
