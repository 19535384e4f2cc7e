#pragma once

#include <array>
#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include "tqe/errors.hpp"
#include "tqe/model.hpp"
#include "tqe/params.hpp"
#include "tqe/thermo.hpp"

// Four-stroke cycle construction and the grid sweeps: entropy / population /
// coherence equation-of-state surfaces and the efficiency map over the upper
// cycle corner (omega1, e1).

namespace tqe {

struct CycleSpec {
    double omega0 = 0.0, omega1 = 0.0;  // rad/s
    double e0 = 0.0, e1 = 0.0;          // rad/s
    int points_per_stroke = 100;
};

struct Cycle {
    CycleSpec spec;
    std::array<StrokeSpec, 4> strokes;
};

// Stroke order: (1) omega: omega0 -> omega1 at e0; (2) drive: e0 -> e1 at
// omega1; (3) omega: omega1 -> omega0 at e1; (4) drive: e1 -> e0 at omega0.
// The lower corner is the engine parameter range minimum; collapsing either
// span produces degenerate (zero-integral) strokes rather than errors.
inline Cycle build_cycle(const EngineParameters& p, double omega1, double e1,
                         int points_per_stroke) {
    const double omega0 = p.omega_knob_range[0];
    const double e0 = p.drive_knob_range[0];
    if (omega1 < omega0 || omega1 > p.omega_knob_range[1])
        throw configuration_error("omega1 corner out of knob range");
    if (e1 < e0 || e1 > p.drive_knob_range[1])
        throw configuration_error("e1 corner out of knob range");
    Cycle c;
    c.spec = {omega0, omega1, e0, e1, points_per_stroke};
    c.strokes[0] = {KnobKind::OmegaT, e0, omega0, omega1, points_per_stroke};
    c.strokes[1] = {KnobKind::Drive, omega1, e0, e1, points_per_stroke};
    c.strokes[2] = {KnobKind::OmegaT, e1, omega1, omega0, points_per_stroke};
    c.strokes[3] = {KnobKind::Drive, omega0, e1, e0, points_per_stroke};
    return c;
}

enum class ReasonCode { None, DegenerateCycle, NoPositiveHeat, EvaluationError };

inline const char* reason_text(ReasonCode r) {
    switch (r) {
        case ReasonCode::DegenerateCycle: return "degenerate_cycle";
        case ReasonCode::NoPositiveHeat: return "no_positive_heat";
        case ReasonCode::EvaluationError: return "evaluation_error";
        default: return "";
    }
}

// Scalar field on a rectangular (omega, drive) grid; values row-major over
// omega then drive. An empty `reasons` vector means every node is present.
struct SurfaceGrid {
    std::vector<double> omega_axis;  // rad/s, strictly increasing
    std::vector<double> drive_axis;  // rad/s, strictly increasing
    std::vector<double> values;      // [i_omega * drive_axis.size() + j]
    std::vector<ReasonCode> reasons;
    std::string quantity_label;

    double value_at(size_t i, size_t j) const {
        return values[i * drive_axis.size() + j];
    }
    bool present_at(size_t i, size_t j) const {
        return reasons.empty() ||
               reasons[i * drive_axis.size() + j] == ReasonCode::None;
    }
};

inline std::vector<double> linspace(double a, double b, int n) {
    if (n < 2) throw configuration_error("grid resolution must be >= 2");
    std::vector<double> x(n);
    for (int i = 0; i < n; ++i)
        x[i] = (i == n - 1) ? b : a + (b - a) * i / (n - 1);
    return x;
}

namespace detail {
template <class F>
SurfaceGrid sample_surface(const EngineParameters& p, int resolution,
                           const std::string& label, F&& f) {
    SurfaceGrid g;
    g.omega_axis =
        linspace(p.omega_knob_range[0], p.omega_knob_range[1], resolution);
    g.drive_axis =
        linspace(p.drive_knob_range[0], p.drive_knob_range[1], resolution);
    g.quantity_label = label;
    g.values.reserve(g.omega_axis.size() * g.drive_axis.size());
    for (double w : g.omega_axis)
        for (double e : g.drive_axis) g.values.push_back(f(Knobs{w, e}));
    return g;
}
}  // namespace detail

// Stationary-state von Neumann entropy over the knob window.
inline SurfaceGrid entropy_surface(const EngineParameters& p, int resolution) {
    return detail::sample_surface(p, resolution, "entropy_nats", [&](Knobs k) {
        return von_neumann_entropy(steady_state_analytic(p, k));
    });
}

// Excited-state population and coherence magnitude surfaces.
inline std::pair<SurfaceGrid, SurfaceGrid> state_surfaces(
    const EngineParameters& p, int resolution) {
    SurfaceGrid pop =
        detail::sample_surface(p, resolution, "rho_ee", [&](Knobs k) {
            return steady_state_analytic(p, k).ee();
        });
    SurfaceGrid coh =
        detail::sample_surface(p, resolution, "abs_rho_eg", [&](Knobs k) {
            return std::abs(steady_state_analytic(p, k).eg());
        });
    return {std::move(pop), std::move(coh)};
}

// Efficiency of the cycle with upper corner (omega1, e1): work and positive
// heat only (the passive split does not enter the efficiency).
inline std::pair<double, ReasonCode> efficiency_at_node(
    const EngineParameters& p, double omega1, double e1,
    int points_per_stroke) {
    const double nan = std::numeric_limits<double>::quiet_NaN();
    try {
        const Cycle c = build_cycle(p, omega1, e1, points_per_stroke);
        if (c.strokes[0].degenerate() && c.strokes[1].degenerate())
            return {nan, ReasonCode::DegenerateCycle};
        double total_work = 0.0, q_plus = 0.0;
        for (const StrokeSpec& s : c.strokes) {
            total_work += stroke_work(p, s);
            const double q = stroke_heat(p, s);
            q_plus += stroke_positive_heat(p, s, &q);
        }
        if (!(q_plus > 0.0)) return {nan, ReasonCode::NoPositiveHeat};
        return {-total_work / q_plus, ReasonCode::None};
    } catch (const std::exception&) {
        return {nan, ReasonCode::EvaluationError};
    }
}

// Efficiency over all upper corners in the knob window. Nodes that fail are
// recorded as absent with a reason code, never aborting the sweep.
inline SurfaceGrid efficiency_map(const EngineParameters& p,
                                  int sweep_resolution,
                                  int points_per_stroke) {
    SurfaceGrid g;
    g.omega_axis = linspace(p.omega_knob_range[0], p.omega_knob_range[1],
                            sweep_resolution);
    g.drive_axis = linspace(p.drive_knob_range[0], p.drive_knob_range[1],
                            sweep_resolution);
    g.quantity_label = "efficiency";
    const size_t total = g.omega_axis.size() * g.drive_axis.size();
    g.values.reserve(total);
    g.reasons.reserve(total);
    for (double w1 : g.omega_axis)
        for (double e1 : g.drive_axis) {
            const auto [eta, reason] =
                efficiency_at_node(p, w1, e1, points_per_stroke);
            g.values.push_back(eta);
            g.reasons.push_back(reason);
        }
    return g;
}

struct MaxEfficiency {
    double omega1 = 0.0;  // rad/s
    double e1 = 0.0;      // rad/s
    double eta = 0.0;
};

// Argmax over present nodes; ties go to the smallest omega1, then the
// smallest e1 (scan order with strictly-greater updates).
inline MaxEfficiency find_max_efficiency(const SurfaceGrid& map) {
    MaxEfficiency best;
    bool found = false;
    for (size_t i = 0; i < map.omega_axis.size(); ++i)
        for (size_t j = 0; j < map.drive_axis.size(); ++j) {
            if (!map.present_at(i, j)) continue;
            const double eta = map.value_at(i, j);
            if (!found || eta > best.eta) {
                best = {map.omega_axis[i], map.drive_axis[j], eta};
                found = true;
            }
        }
    if (!found) throw domain_error("efficiency map has no present nodes");
    return best;
}

}  // namespace tqe
