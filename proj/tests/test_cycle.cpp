// Tests for cycle construction, the equation-of-state surfaces, the
// efficiency map with its absence bookkeeping, and the argmax scan.

#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <cstring>
#include <limits>
#include <string>
#include <vector>

#include "tqe/cycle.hpp"
#include "tqe/errors.hpp"
#include "tqe/model.hpp"
#include "tqe/params.hpp"
#include "tqe/thermo.hpp"
#include "tqe/units.hpp"

using Catch::Approx;
using Catch::Matchers::ContainsSubstring;
using Catch::Matchers::MessageMatches;
using namespace tqe;

TEST_CASE("cycle construction pins the corner walk and closes the loop") {
    const EngineParameters p = benchmark_parameters();
    const double w1 = mhz_to_rad(700.0), e1 = mhz_to_rad(1.4);
    const Cycle c = build_cycle(p, w1, e1, 64);

    CHECK(c.spec.omega0 == p.omega_knob_range[0]);
    CHECK(c.spec.e0 == p.drive_knob_range[0]);
    CHECK(c.spec.omega1 == w1);
    CHECK(c.spec.e1 == e1);

    // Alternating knob kinds, matching fixed values, closed loop.
    CHECK(c.strokes[0].which_knob == KnobKind::OmegaT);
    CHECK(c.strokes[1].which_knob == KnobKind::Drive);
    CHECK(c.strokes[2].which_knob == KnobKind::OmegaT);
    CHECK(c.strokes[3].which_knob == KnobKind::Drive);
    for (int i = 0; i < 4; ++i) {
        CHECK(c.strokes[i].n_points == 64);
        const Knobs end = stroke_endpoints(c.strokes[i]).second;
        const Knobs next = stroke_endpoints(c.strokes[(i + 1) % 4]).first;
        CHECK(end.omega_t == next.omega_t);
        CHECK(end.drive == next.drive);
    }
    // The loop starts at the window's lower corner.
    const Knobs start = stroke_endpoints(c.strokes[0]).first;
    CHECK(start.omega_t == p.omega_knob_range[0]);
    CHECK(start.drive == p.drive_knob_range[0]);

    // cycle_energetics accepts the constructed loop.
    CHECK_NOTHROW(cycle_energetics(p, build_cycle(p, w1, e1, 24).strokes));
}

TEST_CASE("cycle corners outside the knob window are rejected") {
    const EngineParameters p = benchmark_parameters();
    CHECK_THROWS_MATCHES(
        build_cycle(p, 2.0 * p.omega_knob_range[1], mhz_to_rad(1.0), 50),
        configuration_error,
        MessageMatches(ContainsSubstring("omega1 corner")));
    CHECK_THROWS_MATCHES(
        build_cycle(p, mhz_to_rad(500.0), 0.5 * p.drive_knob_range[0], 50),
        configuration_error, MessageMatches(ContainsSubstring("e1 corner")));

    // The lower corner itself is legal and fully degenerate.
    const Cycle c = build_cycle(p, p.omega_knob_range[0],
                                p.drive_knob_range[0], 50);
    for (const StrokeSpec& s : c.strokes) CHECK(s.degenerate());
}

TEST_CASE("linspace hits both endpoints exactly") {
    const std::vector<double> x = linspace(0.1, 0.7, 7);
    REQUIRE(x.size() == 7);
    CHECK(x.front() == 0.1);
    CHECK(x.back() == 0.7);
    for (size_t i = 1; i < x.size(); ++i) CHECK(x[i] > x[i - 1]);
    CHECK(x[3] == Approx(0.4).epsilon(1e-15));
    CHECK_THROWS_AS(linspace(0.0, 1.0, 1), configuration_error);
}

TEST_CASE("entropy surface stays within the qubit bounds") {
    const EngineParameters p = benchmark_parameters();
    const SurfaceGrid g = entropy_surface(p, 6);
    CHECK(g.quantity_label == "entropy_nats");
    REQUIRE(g.omega_axis.size() == 6);
    REQUIRE(g.drive_axis.size() == 6);
    REQUIRE(g.values.size() == 36);
    CHECK(g.reasons.empty());  // every node present
    for (double v : g.values) {
        CHECK(v >= 0.0);
        CHECK(v <= std::log(2.0) + 1e-12);
    }
    // Node values are plain evaluations of the stationary-state entropy.
    const Knobs k{g.omega_axis[2], g.drive_axis[4]};
    CHECK(g.value_at(2, 4) ==
          von_neumann_entropy(steady_state_analytic(p, k)));
}

TEST_CASE("population and coherence surfaces obey state constraints") {
    const EngineParameters p = benchmark_parameters();
    const auto [pop, coh] = state_surfaces(p, 6);
    CHECK(pop.quantity_label == "rho_ee");
    CHECK(coh.quantity_label == "abs_rho_eg");
    REQUIRE(pop.values.size() == 36);
    REQUIRE(coh.values.size() == 36);
    for (size_t i = 0; i < 6; ++i)
        for (size_t j = 0; j < 6; ++j) {
            const double ee = pop.value_at(i, j);
            const double c = coh.value_at(i, j);
            CHECK(ee > 0.0);
            CHECK(ee < 0.5);  // never inverted in the stationary state
            // Positivity bound |rho_eg|^2 <= rho_ee rho_gg.
            CHECK(c * c <= ee * (1.0 - ee) + 1e-12);
        }
    const Knobs k{pop.omega_axis[1], pop.drive_axis[3]};
    CHECK(pop.value_at(1, 3) == steady_state_analytic(p, k).ee());
    CHECK(coh.value_at(1, 3) == std::abs(steady_state_analytic(p, k).eg()));
}

TEST_CASE("efficiency map marks the degenerate corner and edge cycles") {
    const EngineParameters p = benchmark_parameters();
    const SurfaceGrid g = efficiency_map(p, 5, 40);
    REQUIRE(g.values.size() == 25);
    REQUIRE(g.reasons.size() == 25);
    CHECK(g.quantity_label == "efficiency");

    // Lower corner: both expansion strokes collapse.
    CHECK_FALSE(g.present_at(0, 0));
    CHECK(g.reasons[0] == ReasonCode::DegenerateCycle);
    CHECK(std::isnan(g.value_at(0, 0)));

    // Edge cycles enclose no area: the two live strokes retrace each other,
    // so work cancels and the efficiency vanishes (still a present node).
    for (size_t j = 1; j < 5; ++j) {
        CHECK(g.present_at(0, j));
        CHECK(std::abs(g.value_at(0, j)) < 1e-12);
    }
    for (size_t i = 1; i < 5; ++i) {
        CHECK(g.present_at(i, 0));
        CHECK(std::abs(g.value_at(i, 0)) < 1e-12);
    }

    // Interior nodes are present engines: positive heat uptake, eta in (0, 1).
    for (size_t i = 1; i < 5; ++i)
        for (size_t j = 1; j < 5; ++j) {
            REQUIRE(g.present_at(i, j));
            CHECK(g.value_at(i, j) > 0.0);
            CHECK(g.value_at(i, j) < 1.0);
        }

    SECTION("map nodes equal standalone node evaluations bitwise") {
        for (size_t i : {1, 3})
            for (size_t j : {2, 4}) {
                const auto [eta, reason] = efficiency_at_node(
                    p, g.omega_axis[i], g.drive_axis[j], 40);
                CHECK(reason == ReasonCode::None);
                CHECK(eta == g.value_at(i, j));
            }
    }
    SECTION("repeated sweeps are byte-identical") {
        const SurfaceGrid h = efficiency_map(p, 5, 40);
        REQUIRE(h.values.size() == g.values.size());
        CHECK(std::memcmp(h.values.data(), g.values.data(),
                          g.values.size() * sizeof(double)) == 0);
        CHECK(h.reasons == g.reasons);
    }
    SECTION("the argmax lands on the high-drive edge") {
        const MaxEfficiency best = find_max_efficiency(g);
        CHECK(best.e1 == g.drive_axis.back());
        CHECK(best.eta > 0.6);
        CHECK(best.eta < 0.7);
    }
}

TEST_CASE("node evaluation reports errors as absence, not exceptions") {
    const EngineParameters p = benchmark_parameters();
    const auto [eta, reason] =
        efficiency_at_node(p, 2.0 * p.omega_knob_range[1],
                           p.drive_knob_range[1], 40);
    CHECK(std::isnan(eta));
    CHECK(reason == ReasonCode::EvaluationError);
}

TEST_CASE("reason codes render as stable strings") {
    CHECK(std::string(reason_text(ReasonCode::None)).empty());
    CHECK(std::string(reason_text(ReasonCode::DegenerateCycle)) ==
          "degenerate_cycle");
    CHECK(std::string(reason_text(ReasonCode::NoPositiveHeat)) ==
          "no_positive_heat");
    CHECK(std::string(reason_text(ReasonCode::EvaluationError)) ==
          "evaluation_error");
}

TEST_CASE("argmax scan order breaks ties toward the lower-left") {
    SurfaceGrid g;
    g.omega_axis = {1.0, 2.0};
    g.drive_axis = {10.0, 20.0};
    g.values = {0.1, 0.5, 0.5, 0.2};  // ties at (0,1) and (1,0)
    const MaxEfficiency best = find_max_efficiency(g);
    CHECK(best.omega1 == 1.0);
    CHECK(best.e1 == 20.0);
    CHECK(best.eta == 0.5);

    SECTION("absent nodes are skipped") {
        g.reasons = {ReasonCode::None, ReasonCode::EvaluationError,
                     ReasonCode::None, ReasonCode::None};
        g.values[1] = std::numeric_limits<double>::quiet_NaN();
        const MaxEfficiency b2 = find_max_efficiency(g);
        CHECK(b2.omega1 == 2.0);
        CHECK(b2.e1 == 10.0);
        CHECK(b2.eta == 0.5);
    }
    SECTION("an all-absent map cannot yield a maximum") {
        g.reasons.assign(4, ReasonCode::DegenerateCycle);
        CHECK_THROWS_AS(find_max_efficiency(g), domain_error);
    }
}

TEST_CASE("node efficiencies are stable under stroke refinement") {
    const EngineParameters p = benchmark_parameters();
    const double w1 = mhz_to_rad(550.0), e1 = mhz_to_rad(2.0);
    const auto [eta100, r100] = efficiency_at_node(p, w1, e1, 100);
    const auto [eta200, r200] = efficiency_at_node(p, w1, e1, 200);
    REQUIRE(r100 == ReasonCode::None);
    REQUIRE(r200 == ReasonCode::None);
    CHECK(eta100 == Approx(eta200).margin(1e-6));
}
