#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <utility>
#include <vector>

#include "tqe/errors.hpp"
#include "tqe/matrices.hpp"
#include "tqe/model.hpp"
#include "tqe/params.hpp"
#include "tqe/quadrature.hpp"

// Thermodynamic functionals along quasi-static strokes: von Neumann entropy,
// the work/heat/positive-heat stroke integrals, and the passive-energy /
// ergotropy split of the heat. Sign convention: W > 0 means energy delivered
// TO the working substance; extracted work is -sum(W).

namespace tqe {

// S = -sum lambda ln lambda; for a qubit, the binary entropy of (1 +- r)/2
// with r the Bloch norm. 0 ln 0 == 0.
inline double von_neumann_entropy(const QubitDensityMatrix& rho) {
    const double r = std::min(1.0, bloch_vector(rho).norm());
    auto xlnx = [](double x) { return x > 0.0 ? x * std::log(x) : 0.0; };
    const double p = 0.5 * (1.0 + r);
    return -xlnx(p) - xlnx(1.0 - p);
}

// Eigenbasis of a 2x2 Hamiltonian, ordered (low, high) by energy; at
// degeneracy the order falls back to descending <sigma_z> so the choice is
// deterministic.
struct HBasis {
    double e_low = 0.0, e_high = 0.0;
    Eigen::Vector2cd v_low, v_high;
};

inline HBasis h_eigenbasis(const EffectiveHamiltonian& h) {
    Eigen::SelfAdjointEigenSolver<Matrix2c> es(h.mat);
    HBasis b;
    b.e_low = es.eigenvalues()(0);
    b.e_high = es.eigenvalues()(1);
    b.v_low = es.eigenvectors().col(0);
    b.v_high = es.eigenvectors().col(1);
    if (b.e_high - b.e_low <= 1e-12 * h.mat.norm()) {
        const double z_low = (b.v_low.adjoint() * sigma_z() * b.v_low)(0).real();
        const double z_high =
            (b.v_high.adjoint() * sigma_z() * b.v_high)(0).real();
        if (z_high > z_low) {
            std::swap(b.v_low, b.v_high);
            std::swap(b.e_low, b.e_high);
        }
    }
    return b;
}

// Passive companion of rho for Hamiltonian h: same spectrum, diagonal in the
// h eigenbasis, larger population on the lower level.
inline QubitDensityMatrix passive_state(const QubitDensityMatrix& rho,
                                        const EffectiveHamiltonian& h) {
    Eigen::SelfAdjointEigenSolver<Matrix2c> es(rho.mat);
    const double p_lo = es.eigenvalues()(0);
    const double p_hi = es.eigenvalues()(1);
    const HBasis b = h_eigenbasis(h);
    QubitDensityMatrix pi;
    pi.mat = p_hi * (b.v_low * b.v_low.adjoint()) +
             p_lo * (b.v_high * b.v_high.adjoint());
    return pi;
}

// tr(rho H) - tr(pi H) >= 0: the unitarily extractable energy.
inline double ergotropy(const QubitDensityMatrix& rho,
                        const EffectiveHamiltonian& h) {
    const QubitDensityMatrix pi = passive_state(rho, h);
    return ((rho.mat - pi.mat) * h.mat).trace().real();
}

// ---------------------------------------------------------------------------
// Strokes: one knob varies while the other is held fixed.

struct StrokeSpec {
    KnobKind which_knob = KnobKind::OmegaT;
    double fixed_value = 0.0;  // the held knob, rad/s
    double from = 0.0;         // varying knob start, rad/s
    double to = 0.0;           // varying knob end, rad/s
    int n_points = 100;
    bool degenerate() const { return from == to; }
};

inline Knobs knobs_at(const StrokeSpec& s, double lambda) {
    return s.which_knob == KnobKind::OmegaT ? Knobs{lambda, s.fixed_value}
                                            : Knobs{s.fixed_value, lambda};
}

// Central-difference step: 1e-6 of the corresponding full knob-range span.
inline double fd_step(const EngineParameters& p, KnobKind k) {
    const auto& r =
        k == KnobKind::OmegaT ? p.omega_knob_range : p.drive_knob_range;
    return 1e-6 * (r[1] - r[0]);
}

// One Richardson level over central differences: (4 D(h/2) - D(h)) / 3.
template <class MatF>
Matrix2c fd_richardson(MatF&& f, double x, double h) {
    const Matrix2c d1 = (f(x + h) - f(x - h)) / (2.0 * h);
    const Matrix2c d2 = (f(x + 0.5 * h) - f(x - 0.5 * h)) / h;
    return (4.0 * d2 - d1) / 3.0;
}

// dH/dlambda: sigma_z/2 for the frequency knob (the rotating-frame gap
// shifts one-for-one with it under every convention combination), and the
// constant unit-drive coupling pattern for the drive knob (the cavity
// response is linear in the drive).
inline Matrix2c hamiltonian_derivative(const EngineParameters& p,
                                       KnobKind which) {
    if (which == KnobKind::OmegaT) return 0.5 * sigma_z();
    const complexd c = coupling_amplitude(p, 1.0);
    Matrix2c d;
    d << 0.0, c, std::conj(c), 0.0;
    return d;
}

// tr(rho dH/dlambda).
inline double work_integrand(const EngineParameters& p, const StrokeSpec& s,
                             double lambda) {
    const QubitDensityMatrix rho = steady_state_analytic(p, knobs_at(s, lambda));
    if (s.which_knob == KnobKind::OmegaT)
        return 0.5 * (rho.ee() - rho.gg());
    const complexd c = coupling_amplitude(p, 1.0);
    return 2.0 * (rho.eg() * std::conj(c)).real();
}

// tr(d rho/dlambda H(lambda)) with the analytic state derivative.
inline double heat_integrand(const EngineParameters& p, const StrokeSpec& s,
                             double lambda) {
    const Knobs k = knobs_at(s, lambda);
    return (steady_state_derivative(p, s.which_knob, k) *
            effective_hamiltonian(p, k).mat)
        .trace()
        .real();
}

// Reference form of the same integrand via central differences; kept as the
// cross-check target for the analytic derivative.
inline double heat_integrand_fd(const EngineParameters& p, const StrokeSpec& s,
                                double lambda) {
    const double h = fd_step(p, s.which_knob);
    const Matrix2c d = fd_richardson(
        [&](double x) { return steady_state_analytic(p, knobs_at(s, x)).mat; },
        lambda, h);
    return (d * effective_hamiltonian(p, knobs_at(s, lambda)).mat)
        .trace()
        .real();
}

// tr(rho H) at a stroke point; endpoint differences give the first-law check.
inline double internal_energy(const EngineParameters& p, const Knobs& k) {
    return (steady_state_analytic(p, k).mat * effective_hamiltonian(p, k).mat)
        .trace()
        .real();
}

inline double stroke_work(const EngineParameters& p, const StrokeSpec& s) {
    if (s.degenerate()) return 0.0;
    return integrate([&](double x) { return work_integrand(p, s, x); }, s.from,
                     s.to, s.n_points);
}

inline double stroke_heat(const EngineParameters& p, const StrokeSpec& s) {
    if (s.degenerate()) return 0.0;
    return integrate([&](double x) { return heat_integrand(p, s, x); }, s.from,
                     s.to, s.n_points);
}

// Positive-only heat: the clip acts on the heat integrand as traversed (the
// orientation factor rides inside the clip), so reversed strokes clip on the
// sign of q * dlambda. Pulled back to the unit interval before clipping.
// When the traversed integrand never changes sign the full heat integral (or
// zero) is returned directly; `known_heat` avoids recomputing it.
inline double stroke_positive_heat(const EngineParameters& p,
                                   const StrokeSpec& s,
                                   const double* known_heat = nullptr) {
    if (s.degenerate()) return 0.0;
    const double span = s.to - s.from;
    auto q = [&](double u) {
        return heat_integrand(p, s, s.from + span * u) * span;
    };
    const int n = 2 * (odd_points(s.n_points) - 1);
    bool has_pos = false, has_neg = false;
    for (int i = 0; i <= n; ++i) {
        const double v = q((double)i / n);
        if (v > 0.0) has_pos = true;
        else if (v < 0.0) has_neg = true;
    }
    if (!has_pos) return 0.0;
    if (!has_neg)
        return known_heat ? *known_heat
                          : integrate(q, 0.0, 1.0, s.n_points);
    return integrate_positive_part(q, 0.0, 1.0, s.n_points);
}

// ---------------------------------------------------------------------------
// Passive-energy / ergotropy split of the heat.

// Generic passive-split integrator over state/Hamiltonian callables, so the
// crossing machinery is exercisable on synthetic paths as well. Returns
// (integral of tr(dpi/dl H), integral of tr(d(rho-pi)/dl H)).
//
// Both integrals are taken by parts, which needs no derivative of the
// eigendecomposition behind pi:
//   int tr(pi' H) = [tr(pi H)] - int tr(pi H'),
//   int tr((rho-pi)' H) = [tr((rho-pi) H)] - int tr((rho-pi) H').
// The passive permutation flips where the population difference in the
// instantaneous H eigenbasis,
//   chi(l) = <low|rho|low> - <high|rho|high>,
// changes sign; pi stays continuous there but the integrands kink, so those
// points are bracketed by bisection and the quadratures are split.
template <class RhoF, class HamF, class DHamF>
std::pair<double, double> passive_split_integrals(RhoF&& rho_of, HamF&& ham_of,
                                                  DHamF&& dham_of, double a,
                                                  double b, int n_points) {
    if (a == b) return {0.0, 0.0};
    auto chi = [&](double x) {
        const HBasis hb = h_eigenbasis(ham_of(x));
        const Matrix2c r = rho_of(x);
        return ((hb.v_low.adjoint() * r * hb.v_low)(0) -
                (hb.v_high.adjoint() * r * hb.v_high)(0))
            .real();
    };
    const std::vector<double> roots = bracket_sign_changes(chi, a, b, n_points);
    auto pi_of = [&](double x) {
        QubitDensityMatrix r;
        r.mat = rho_of(x);
        return passive_state(r, ham_of(x)).mat;
    };
    auto boundary = [&](double x) {
        const Matrix2c h = ham_of(x).mat;
        const Matrix2c pi = pi_of(x);
        const double pass = (pi * h).trace().real();
        const double erg = ((rho_of(x) - pi) * h).trace().real();
        return std::pair<double, double>{pass, erg};
    };
    std::vector<double> cuts;
    cuts.push_back(a);
    cuts.insert(cuts.end(), roots.begin(), roots.end());
    cuts.push_back(b);
    double q_pass = 0.0, d_erg = 0.0;
    for (size_t i = 0; i + 1 < cuts.size(); ++i) {
        const double lo = cuts[i], hi = cuts[i + 1];
        if (lo == hi) continue;
        const int pts = std::max(
            17, (int)std::lround(n_points * std::abs(hi - lo) /
                                 std::abs(b - a)));
        const auto [pass_lo, erg_lo] = boundary(lo);
        const auto [pass_hi, erg_hi] = boundary(hi);
        q_pass += pass_hi - pass_lo -
                  integrate(
                      [&](double x) {
                          return (pi_of(x) * dham_of(x)).trace().real();
                      },
                      lo, hi, pts);
        d_erg += erg_hi - erg_lo -
                 integrate(
                     [&](double x) {
                         return ((rho_of(x) - pi_of(x)) * dham_of(x))
                             .trace()
                             .real();
                     },
                     lo, hi, pts);
    }
    return {q_pass, d_erg};
}

// (passive heat, ergotropy change) along a stroke; their sum closes on the
// stroke heat to quadrature tolerance.
inline std::pair<double, double> stroke_passive_decomposition(
    const EngineParameters& p, const StrokeSpec& s) {
    if (s.degenerate()) return {0.0, 0.0};
    const Matrix2c dham = hamiltonian_derivative(p, s.which_knob);
    return passive_split_integrals(
        [&](double x) { return steady_state_analytic(p, knobs_at(s, x)).mat; },
        [&](double x) { return effective_hamiltonian(p, knobs_at(s, x)); },
        [&](double) { return dham; }, s.from, s.to, s.n_points);
}

// ---------------------------------------------------------------------------
// Per-stroke and per-cycle aggregates.

struct StrokeEnergetics {
    double work = 0.0;              // hbar rad/s
    double heat = 0.0;              // hbar rad/s
    double positive_heat = 0.0;     // hbar rad/s
    double passive_heat = 0.0;      // hbar rad/s
    double ergotropy_change = 0.0;  // hbar rad/s
};

inline StrokeEnergetics compute_stroke(const EngineParameters& p,
                                       const StrokeSpec& s) {
    StrokeEnergetics e;
    if (s.degenerate()) return e;
    e.work = stroke_work(p, s);
    e.heat = stroke_heat(p, s);
    e.positive_heat = stroke_positive_heat(p, s, &e.heat);
    const auto [qp, dw] = stroke_passive_decomposition(p, s);
    e.passive_heat = qp;
    e.ergotropy_change = dw;
    return e;
}

struct CycleEnergetics {
    std::array<StrokeEnergetics, 4> per_stroke{};
    double total_work = 0.0;
    double total_heat = 0.0;
    double q_plus = 0.0;
    double total_passive_heat = 0.0;
    double total_ergotropy_change = 0.0;
    bool has_efficiency = false;  // false when q_plus <= 0
    double efficiency = 0.0;      // -total_work / q_plus when defined
};

// (omega, drive) endpoints of a stroke in knob space.
inline std::pair<Knobs, Knobs> stroke_endpoints(const StrokeSpec& s) {
    return {knobs_at(s, s.from), knobs_at(s, s.to)};
}

inline CycleEnergetics cycle_energetics(const EngineParameters& p,
                                        const std::array<StrokeSpec, 4>& strokes) {
    for (int i = 0; i < 4; ++i) {
        const Knobs end = stroke_endpoints(strokes[i]).second;
        const Knobs next = stroke_endpoints(strokes[(i + 1) % 4]).first;
        if (end.omega_t != next.omega_t || end.drive != next.drive)
            throw configuration_error("strokes do not form a closed loop");
    }
    CycleEnergetics c;
    for (int i = 0; i < 4; ++i) {
        c.per_stroke[i] = compute_stroke(p, strokes[i]);
        c.total_work += c.per_stroke[i].work;
        c.total_heat += c.per_stroke[i].heat;
        c.q_plus += c.per_stroke[i].positive_heat;
        c.total_passive_heat += c.per_stroke[i].passive_heat;
        c.total_ergotropy_change += c.per_stroke[i].ergotropy_change;
    }
    if (c.q_plus > 0.0) {
        c.has_efficiency = true;
        c.efficiency = -c.total_work / c.q_plus;
    }
    return c;
}

}  // namespace tqe
