#include <catch2/catch_amalgamated.hpp>

#include "tqe/model.hpp"
#include "tqe/params.hpp"
#include "tqe/sampling.hpp"
#include "tqe/units.hpp"

using namespace tqe;

TEST_CASE("unit conversions reproduce pinned values") {
    CHECK(mhz_to_rad(1.0) == Catch::Approx(kTwoPi * 1e6).epsilon(1e-15));
    CHECK(ghz_to_rad(4.94) == Catch::Approx(kTwoPi * 4.94e9).epsilon(1e-15));
    CHECK(rad_to_mhz(mhz_to_rad(123.456)) ==
          Catch::Approx(123.456).epsilon(1e-15));
    // 30 mK as an angular frequency, quoted over 2pi in MHz.
    CHECK(rad_to_mhz(mk_to_rad(30.0)) ==
          Catch::Approx(625.0985740828371).epsilon(1e-13));
}

TEST_CASE("raw table converts to internal units") {
    const EngineParameters p = benchmark_parameters();
    CHECK(p.omega_cpw == Catch::Approx(kTwoPi * 4.94e9).epsilon(1e-15));
    CHECK(p.omega_pump == p.omega_cpw);
    CHECK(p.g_over_hbar == Catch::Approx(kTwoPi * 1.2e8).epsilon(1e-15));
    CHECK(p.gamma_minus_net == Catch::Approx(kTwoPi * 2e6).epsilon(1e-15));
    CHECK(p.kappa_cpw == Catch::Approx(kTwoPi * 1e6).epsilon(1e-15));
    CHECK(p.omega_knob_range[0] == Catch::Approx(kTwoPi * 1e8).epsilon(1e-15));
    CHECK(p.omega_knob_range[1] == Catch::Approx(kTwoPi * 1e9).epsilon(1e-15));
    CHECK(p.drive_knob_range[0] == Catch::Approx(kTwoPi * 2e5).epsilon(1e-15));
    CHECK(p.drive_knob_range[1] == Catch::Approx(kTwoPi * 2e6).epsilon(1e-15));
    CHECK(rad_to_mhz(p.temperature_freq) ==
          Catch::Approx(625.0985740828371).epsilon(1e-13));
}

TEST_CASE("table conversion rejects missing and nonpositive keys") {
    RawTable t = benchmark_table();
    t.erase("kappa_over_2pi_mhz");
    CHECK_THROWS_MATCHES(
        to_internal_units(t), configuration_error,
        Catch::Matchers::MessageMatches(
            Catch::Matchers::ContainsSubstring("kappa_over_2pi_mhz")));

    t = benchmark_table();
    t["temperature_mk"] = -1.0;
    CHECK_THROWS_MATCHES(
        to_internal_units(t), configuration_error,
        Catch::Matchers::MessageMatches(
            Catch::Matchers::ContainsSubstring("temperature_mk")));
}

TEST_CASE("parameter validation enforces ordered positive ranges") {
    EngineParameters p = benchmark_parameters();
    p.omega_knob_range = {mhz_to_rad(1000.0), mhz_to_rad(100.0)};
    CHECK_THROWS_AS(p.validate(), configuration_error);
    p = benchmark_parameters();
    p.drive_knob_range[0] = 0.0;
    CHECK_THROWS_AS(p.validate(), configuration_error);
    p = benchmark_parameters();
    p.kappa_cpw = 0.0;  // resonant pump with no cavity linewidth
    CHECK_THROWS_AS(p.validate(), configuration_error);
}

TEST_CASE("knob range checks") {
    const EngineParameters p = benchmark_parameters();
    CHECK_NOTHROW(require_in_range(p, {mhz_to_rad(500.0), mhz_to_rad(1.0)}));
    CHECK_THROWS_AS(require_in_range(p, {mhz_to_rad(50.0), mhz_to_rad(1.0)}),
                    configuration_error);
    CHECK_THROWS_AS(require_in_range(p, {mhz_to_rad(500.0), mhz_to_rad(3.0)}),
                    configuration_error);
}

TEST_CASE("gap accessors under every convention combination") {
    const Knobs k{mhz_to_rad(500.0), mhz_to_rad(1.0)};
    const double pump = ghz_to_rad(4.94);

    auto p = benchmark_parameters(FreqInterpretation::Detuning,
                                  ThermalGap::RotatingFrame);
    CHECK(rotating_gap(p, k) == k.omega_t);
    CHECK(thermal_gap_value(p, k) == k.omega_t);

    p = benchmark_parameters(FreqInterpretation::Detuning,
                             ThermalGap::LabFrame);
    CHECK(rotating_gap(p, k) == k.omega_t);
    CHECK(thermal_gap_value(p, k) == pump + k.omega_t);

    p = benchmark_parameters(FreqInterpretation::LabFrame,
                             ThermalGap::RotatingFrame);
    CHECK(rotating_gap(p, k) == k.omega_t - pump);
    CHECK(thermal_gap_value(p, k) == k.omega_t);

    p = benchmark_parameters(FreqInterpretation::LabFrame,
                             ThermalGap::LabFrame);
    CHECK(rotating_gap(p, k) == k.omega_t - pump);
    // pump + (knob - pump) collapses to the knob itself.
    CHECK(thermal_gap_value(p, k) ==
          Catch::Approx(k.omega_t).epsilon(1e-12));
}

TEST_CASE("thermal rates satisfy detailed balance") {
    const EngineParameters p = benchmark_parameters();

    SECTION("pinned values at the reference gap") {
        const RateSet r = thermal_rates(p, mhz_to_rad(500.0));
        CHECK(rad_to_mhz(r.gamma_minus) ==
              Catch::Approx(3.6323063683547452).epsilon(1e-14));
        CHECK(rad_to_mhz(r.gamma_plus) ==
              Catch::Approx(1.632306368354745).epsilon(1e-14));
        // Net convention: difference is the quoted rate exactly.
        CHECK(r.gamma_minus - r.gamma_plus ==
              Catch::Approx(p.gamma_minus_net).epsilon(1e-12));
    }

    SECTION("Boltzmann ratio at 1000 random gaps, both conventions") {
        UniformSampler u(2024);
        for (int i = 0; i < 1000; ++i) {
            const double gap = mhz_to_rad(u.in(5.0, 5000.0));
            for (GammaConvention gc :
                 {GammaConvention::Net, GammaConvention::Bare}) {
                EngineParameters q = benchmark_parameters(
                    FreqInterpretation::Detuning, ThermalGap::RotatingFrame,
                    gc);
                const RateSet r = thermal_rates(q, gap);
                const double expected = std::exp(-gap / q.temperature_freq);
                CHECK(r.gamma_plus / r.gamma_minus ==
                      Catch::Approx(expected).epsilon(1e-12));
                CHECK(r.k_plus / r.k_minus ==
                      Catch::Approx(std::exp(-q.omega_cpw /
                                             q.temperature_freq))
                          .epsilon(1e-12));
            }
        }
    }

    SECTION("bare convention reads the quoted rate as Gamma-") {
        const EngineParameters q = benchmark_parameters(
            FreqInterpretation::Detuning, ThermalGap::RotatingFrame,
            GammaConvention::Bare);
        const RateSet r = thermal_rates(q, mhz_to_rad(500.0));
        CHECK(r.gamma_minus == q.gamma_minus_net);
    }

    SECTION("zero-temperature limit") {
        EngineParameters q = benchmark_parameters();
        q.temperature_freq = mk_to_rad(1e-6);
        const RateSet r = thermal_rates(q, mhz_to_rad(500.0));
        CHECK(r.gamma_plus == 0.0);
        CHECK(r.gamma_minus == Catch::Approx(q.gamma_minus_net).epsilon(1e-15));
    }

    SECTION("half-ratio at gap = T ln 2") {
        const double gap = p.temperature_freq * std::log(2.0);
        const RateSet r = thermal_rates(p, gap);
        CHECK(r.gamma_plus / r.gamma_minus == Catch::Approx(0.5).epsilon(1e-13));
    }

    SECTION("nonpositive gap rejected") {
        CHECK_THROWS_AS(thermal_rates(p, 0.0), domain_error);
        CHECK_THROWS_AS(thermal_rates(p, -1.0), domain_error);
    }
}

TEST_CASE("uniform sampler is deterministic across instances") {
    UniformSampler a(99), b(99);
    for (int i = 0; i < 100; ++i) {
        const double x = a.next();
        CHECK(x == b.next());
        CHECK(x >= 0.0);
        CHECK(x < 1.0);
    }
}
