#pragma once

#include <cmath>
#include <complex>

#include "tqe/errors.hpp"
#include "tqe/matrices.hpp"
#include "tqe/params.hpp"

namespace tqe {

struct RateSet {
    double gamma_minus = 0.0;  // qubit relaxation, rad/s
    double gamma_plus = 0.0;   // qubit excitation, rad/s
    double k_minus = 0.0;      // cavity decay, rad/s
    double k_plus = 0.0;       // cavity excitation, rad/s
};

// Detailed-balance rate set for a given qubit gap. The quoted rate Gamma is
// either the net decay Gamma- - Gamma+ or the bare Gamma-, per convention;
// both yield gamma_plus/gamma_minus = exp(-gap/T). The cavity rate K- is the
// quoted kappa itself, and its Boltzmann factor always uses the cavity
// frequency (which is unambiguous).
inline RateSet thermal_rates(const EngineParameters& p, double omega_t_gap) {
    if (!(omega_t_gap > 0.0))
        throw domain_error("thermal gap must be > 0");
    const double boltz = std::exp(-omega_t_gap / p.temperature_freq);
    RateSet r;
    if (p.gamma_convention == GammaConvention::Net) {
        // Gamma- - Gamma+ = gamma_minus_net exactly.
        r.gamma_minus = p.gamma_minus_net / (1.0 - boltz);
        r.gamma_plus = r.gamma_minus * boltz;
    } else {
        r.gamma_minus = p.gamma_minus_net;
        r.gamma_plus = p.gamma_minus_net * boltz;
    }
    r.k_minus = p.kappa_cpw;
    r.k_plus = p.kappa_cpw * std::exp(-p.omega_cpw / p.temperature_freq);
    return r;
}

// Coherent cavity amplitude <a> = (E_d/hbar) / [i k/2 - (omega_cpw - omega)].
inline complexd cavity_amplitude(const EngineParameters& p, double drive) {
    if (drive < 0.0) throw domain_error("drive must be >= 0");
    const complexd den(-(p.omega_cpw - p.omega_pump), 0.5 * p.kappa_cpw);
    if (std::abs(den) == 0.0)
        throw singularity_error(
            "cavity response diverges: kappa = 0 at pump-cavity resonance");
    return drive / den;
}

// Off-diagonal Hamiltonian entry (g/hbar)<a> for a drive value.
inline complexd coupling_amplitude(const EngineParameters& p, double drive) {
    return p.g_over_hbar * cavity_amplitude(p, drive);
}

// Effective working-substance Hamiltonian
//   H = (delta/2) sigma_z + (g/hbar)(<a> sigma+ + <a*> sigma-).
inline EffectiveHamiltonian effective_hamiltonian(const EngineParameters& p,
                                                  const Knobs& k) {
    const double delta = rotating_gap(p, k);
    const complexd big_g = coupling_amplitude(p, k.drive);
    EffectiveHamiltonian h;
    h.mat << 0.5 * delta, big_g, std::conj(big_g), -0.5 * delta;
    return h;
}

// Closed-form stationary state of the driven, damped working substance.
//
//   M0  = gamma_t^2 + delta^2,      gamma_t = (Gamma- + Gamma+)/2
//   den = 2|G|^2 + M0,              G = (g/hbar)<a>
//   rho_ee = (|G|^2 + M0/(1+e^b)) / den          b = gap/T
//   rho_gg = (|G|^2 + M0/(1+e^-b)) / den
//   rho_eg = -G (delta + i gamma_t) tanh(b/2) / den
//
// Under the net rate convention gamma_t equals Gamma/(2 tanh(b/2)), which is
// the combination appearing in the closed-form literature expressions.
inline QubitDensityMatrix steady_state_analytic(const EngineParameters& p,
                                                const Knobs& k) {
    const double delta = rotating_gap(p, k);
    const double gap = thermal_gap_value(p, k);
    const RateSet r = thermal_rates(p, gap);
    const double gamma_t = 0.5 * (r.gamma_minus + r.gamma_plus);
    const double b = gap / p.temperature_freq;
    const double th = std::tanh(0.5 * b);
    const complexd big_g = coupling_amplitude(p, k.drive);
    const double g2 = std::norm(big_g);
    const double m0 = gamma_t * gamma_t + delta * delta;
    const double den = 2.0 * g2 + m0;

    QubitDensityMatrix rho;
    const double ee = (g2 + m0 / (1.0 + std::exp(b))) / den;
    const double gg = (g2 + m0 / (1.0 + std::exp(-b))) / den;
    const complexd eg = -big_g * complexd(delta, gamma_t) * th / den;
    if (std::abs(ee + gg - 1.0) > 1e-14)
        throw tolerance_error("population sum rule violated");
    rho.mat << ee, eg, std::conj(eg), gg;
    return rho;
}

// Analytic knob-derivative of the stationary state, by chain rule on the
// closed form above. For the frequency knob both the rotating-frame gap and
// the thermal gap shift one-for-one with the knob under every convention
// combination (d delta/d lambda = d gap/d lambda = 1); for the drive knob
// only G = c * E_d varies, with c the unit-drive coupling. The central-
// difference path in the stroke integrals is the reference this is checked
// against; this form exists because dividing eigensolver-level noise by the
// difference step would dominate the small decomposition integrals.
inline Matrix2c steady_state_derivative(const EngineParameters& p,
                                        KnobKind which, const Knobs& k) {
    const double delta = rotating_gap(p, k);
    const double gap = thermal_gap_value(p, k);
    const RateSet r = thermal_rates(p, gap);
    const double gamma_t = 0.5 * (r.gamma_minus + r.gamma_plus);
    const double t = p.temperature_freq;
    const double b = gap / t;
    const double th = std::tanh(0.5 * b);
    const complexd big_g = coupling_amplitude(p, k.drive);
    const double g2 = std::norm(big_g);
    const double m0 = gamma_t * gamma_t + delta * delta;
    const double den = 2.0 * g2 + m0;
    const double f_minus = 1.0 / (1.0 + std::exp(b));  // rho_ee thermal weight

    double d_ee, d_gg;
    complexd d_eg;
    if (which == KnobKind::OmegaT) {
        const double d_th = 0.5 * (1.0 - th * th) / t;
        const double d_gamma_t =
            p.gamma_convention == GammaConvention::Net
                ? -gamma_t * d_th / th                       // gamma_t = G/(2 th)
                : -0.5 * p.gamma_minus_net * std::exp(-b) / t;
        const double d_m0 = 2.0 * gamma_t * d_gamma_t + 2.0 * delta;
        const double d_f_minus = -f_minus * (1.0 - f_minus) / t;
        const double ee = (g2 + m0 * f_minus) / den;
        d_ee = (d_m0 * f_minus + m0 * d_f_minus) / den - ee * d_m0 / den;
        d_gg = -d_ee;
        const complexd eg = -big_g * complexd(delta, gamma_t) * th / den;
        d_eg = -big_g *
                   (complexd(1.0, d_gamma_t) * th +
                    complexd(delta, gamma_t) * d_th) /
                   den -
               eg * d_m0 / den;
    } else {
        const complexd c = coupling_amplitude(p, 1.0);
        const double d_g2 = 2.0 * std::norm(c) * k.drive;
        const double d_den = 2.0 * d_g2;
        const double ee = (g2 + m0 * f_minus) / den;
        const double gg = (g2 + m0 * (1.0 - f_minus)) / den;
        d_ee = d_g2 * (1.0 - 2.0 * ee) / den;
        d_gg = d_g2 * (1.0 - 2.0 * gg) / den;
        d_eg = -complexd(delta, gamma_t) * th *
               (c * den - big_g * d_den) / (den * den);
    }
    Matrix2c d;
    d << d_ee, d_eg, std::conj(d_eg), d_gg;
    return d;
}

// Bloch components: x = 2 Re rho_eg, y = -2 Im rho_eg, z = rho_ee - rho_gg.
struct BlochVector {
    double x = 0.0, y = 0.0, z = 0.0;
    double norm() const { return std::sqrt(x * x + y * y + z * z); }
};

inline BlochVector bloch_vector(const QubitDensityMatrix& rho) {
    BlochVector v;
    v.x = 2.0 * rho.eg().real();
    v.y = -2.0 * rho.eg().imag();
    v.z = rho.ee() - rho.gg();
    return v;
}

}  // namespace tqe
