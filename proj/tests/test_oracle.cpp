// Tests for the dense Lindblad oracle: superoperator assembly, SVD
// steady states, RK4 propagation, and the two-subsystem model.

#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <complex>
#include <vector>

#include <Eigen/Dense>

#include "tqe/errors.hpp"
#include "tqe/matrices.hpp"
#include "tqe/model.hpp"
#include "tqe/oracle.hpp"
#include "tqe/params.hpp"
#include "tqe/sampling.hpp"
#include "tqe/units.hpp"

using Catch::Approx;
using Catch::Matchers::ContainsSubstring;
using Catch::Matchers::MessageMatches;
using namespace tqe;

namespace {

MatrixXc random_matrix(UniformSampler& s, Eigen::Index d) {
    MatrixXc m(d, d);
    for (Eigen::Index i = 0; i < d; ++i)
        for (Eigen::Index j = 0; j < d; ++j)
            m(i, j) = complexd(s.in(-1.0, 1.0), s.in(-1.0, 1.0));
    return m;
}

MatrixXc random_hermitian(UniformSampler& s, Eigen::Index d) {
    const MatrixXc m = random_matrix(s, d);
    return 0.5 * (m + MatrixXc(m.adjoint()));
}

// Direct right-hand side -i[H,rho] + sum rate (A rho A' - {A'A, rho}/2),
// written without any vectorization, as an independent reference.
MatrixXc direct_rhs(const MatrixXc& h,
                    const std::vector<std::pair<double, MatrixXc>>& channels,
                    const MatrixXc& rho) {
    MatrixXc out = -kI * (h * rho - rho * h);
    for (const auto& [rate, a] : channels) {
        const MatrixXc ada = a.adjoint() * a;
        out += rate * (a * rho * a.adjoint() - 0.5 * (ada * rho + rho * ada));
    }
    return out;
}

double min_eigenvalue(const MatrixXc& m) {
    Eigen::SelfAdjointEigenSolver<MatrixXc> es(m);
    return es.eigenvalues().minCoeff();
}

// Partial trace over the first (qubit) factor of a 2(nc)-dimensional state.
MatrixXc traced_over_qubit(const MatrixXc& joint, int nc) {
    MatrixXc out = MatrixXc::Zero(nc, nc);
    for (int n = 0; n < nc; ++n)
        for (int m = 0; m < nc; ++m)
            out(n, m) = joint(n, m) + joint(nc + n, nc + m);
    return out;
}

}  // namespace

TEST_CASE("superoperator matches the direct master-equation right-hand side") {
    UniformSampler s(404);
    for (int rep = 0; rep < 10; ++rep) {
        const Eigen::Index d = 2 + rep % 3;
        const MatrixXc h = random_hermitian(s, d);
        const std::vector<std::pair<double, MatrixXc>> channels = {
            {0.7, random_matrix(s, d)}, {1.3, random_matrix(s, d)}};
        const Liouvillian l = make_liouvillian(h, channels);
        REQUIRE(l.dim == d);
        REQUIRE(l.mat.rows() == d * d);
        const MatrixXc rho = random_hermitian(s, d);
        const MatrixXc via_l = unvec(l.mat * vec(rho), d);
        const MatrixXc direct = direct_rhs(h, channels, rho);
        CHECK((via_l - direct).norm() <=
              1e-13 * (1.0 + l.mat.norm()) * rho.norm());
    }
}

TEST_CASE("superoperator action is traceless on arbitrary operators") {
    UniformSampler s(405);
    for (int rep = 0; rep < 20; ++rep) {
        const Eigen::Index d = 2 + rep % 4;
        const Liouvillian l = make_liouvillian(
            random_hermitian(s, d),
            {{0.5 + s.next(), random_matrix(s, d)},
             {0.1 + s.next(), random_matrix(s, d)}});
        const MatrixXc x = random_matrix(s, d);  // deliberately not Hermitian
        const complexd tr = unvec(l.mat * vec(x), d).trace();
        CHECK(std::abs(tr) <= 1e-12 * l.mat.norm() * x.norm());
    }
}

TEST_CASE("qubit dissipator acts as the textbook relaxation channel") {
    // Single decay channel, no Hamiltonian: d(rho_ee)/dt = -rate * rho_ee,
    // d(rho_eg)/dt = -rate/2 * rho_eg.
    const double rate = 0.37;
    const Liouvillian l = make_liouvillian(MatrixXc::Zero(2, 2),
                                           {{rate, MatrixXc(sigma_minus())}});
    MatrixXc rho(2, 2);
    rho << complexd(0.3, 0.0), complexd(0.1, -0.2),
           complexd(0.1, 0.2), complexd(0.7, 0.0);
    const MatrixXc dr = unvec(l.mat * vec(rho), 2);
    CHECK(std::abs(dr(0, 0) - complexd(-rate * 0.3, 0.0)) < 1e-15);
    CHECK(std::abs(dr(1, 1) - complexd(rate * 0.3, 0.0)) < 1e-15);
    CHECK(std::abs(dr(0, 1) - (-0.5 * rate) * rho(0, 1)) < 1e-15);
    CHECK(std::abs(dr(1, 0) - (-0.5 * rate) * rho(1, 0)) < 1e-15);
}

TEST_CASE("null-space steady state matches the closed form over the window") {
    const EngineParameters p = benchmark_parameters();
    UniformSampler s(2024);
    for (int rep = 0; rep < 60; ++rep) {
        const Knobs k = s.knobs_in_window(p);
        const MatrixXc num = steady_state_nullspace(qubit_liouvillian(p, k));
        const QubitDensityMatrix ana = steady_state_analytic(p, k);
        CHECK(trace_distance(num, MatrixXc(ana.mat)) < 1e-12);
        as_qubit_state(num).validate(1e-10);
    }
}

TEST_CASE("null-space agreement holds under the bare-rate convention") {
    const EngineParameters p = benchmark_parameters(
        FreqInterpretation::Detuning, ThermalGap::RotatingFrame,
        GammaConvention::Bare);
    UniformSampler s(2025);
    for (int rep = 0; rep < 20; ++rep) {
        const Knobs k = s.knobs_in_window(p);
        const MatrixXc num = steady_state_nullspace(qubit_liouvillian(p, k));
        const QubitDensityMatrix ana = steady_state_analytic(p, k);
        CHECK(trace_distance(num, MatrixXc(ana.mat)) < 1e-12);
    }
}

TEST_CASE("undriven steady state is thermal with the detailed-balance ratio") {
    const EngineParameters p = benchmark_parameters();
    for (const double mhz : {100.0, 250.0, 500.0, 1000.0}) {
        const Knobs k{mhz_to_rad(mhz), 0.0};
        const MatrixXc num = steady_state_nullspace(qubit_liouvillian(p, k));
        CHECK(std::abs(num(0, 1)) < 1e-15);
        const double ratio = num(0, 0).real() / num(1, 1).real();
        const double boltz =
            std::exp(-thermal_gap_value(p, k) / p.temperature_freq);
        CHECK(ratio == Approx(boltz).epsilon(1e-12));
    }
}

TEST_CASE("a dissipation-free generator is rejected as ambiguous") {
    const Liouvillian l = make_liouvillian(MatrixXc(sigma_z()), {});
    CHECK_THROWS_MATCHES(steady_state_nullspace(l), ambiguity_error,
                         MessageMatches(ContainsSubstring(
                             "kernel not one-dimensional")));
}

TEST_CASE("propagation guards its inputs") {
    const EngineParameters p = benchmark_parameters();
    const Knobs k{mhz_to_rad(300.0), mhz_to_rad(1.0)};
    const Liouvillian l = qubit_liouvillian(p, k);
    MatrixXc rho0 = MatrixXc::Zero(2, 2);
    rho0(0, 0) = 1.0;

    SECTION("zero duration returns the initial state unchanged") {
        const MatrixXc out = propagate(l, rho0, 0.0, 1.0);
        CHECK((out - rho0).norm() == 0.0);
    }
    SECTION("negative duration is rejected") {
        CHECK_THROWS_AS(propagate(l, rho0, -1.0, 1e-12), precondition_error);
    }
    SECTION("a step beyond the stability window is rejected") {
        const double limit = 0.1 / spectral_norm_estimate(l.mat);
        CHECK_THROWS_MATCHES(
            propagate(l, rho0, 1e-9, 2.0 * limit), precondition_error,
            MessageMatches(ContainsSubstring("exceeds 0.1/||L||")));
    }
}

TEST_CASE("propagation relaxes a pure excited state to the steady state") {
    const EngineParameters p = benchmark_parameters();
    const Knobs k{mhz_to_rad(500.0), mhz_to_rad(1.0)};
    const Liouvillian l = qubit_liouvillian(p, k);
    const RateSet r = thermal_rates(p, thermal_gap_value(p, k));
    const double gamma_t = 0.5 * (r.gamma_minus + r.gamma_plus);
    const double dt = 0.099 / spectral_norm_estimate(l.mat);

    MatrixXc rho0 = MatrixXc::Zero(2, 2);
    rho0(0, 0) = 1.0;
    const MatrixXc out = propagate(l, rho0, 22.0 / gamma_t, dt);

    CHECK(trace_distance(out, MatrixXc(steady_state_analytic(p, k).mat)) <
          1e-6);
    CHECK(std::abs(out.trace() - complexd(1.0, 0.0)) < 1e-10);
    CHECK((out - MatrixXc(out.adjoint())).norm() < 1e-10);
    CHECK(min_eigenvalue(0.5 * (out + MatrixXc(out.adjoint()))) > -1e-10);
}

TEST_CASE("propagation and null space agree at long times") {
    EngineParameters p = benchmark_parameters();
    // Narrower frequency window keeps the stiffness (step count) modest.
    p.omega_knob_range = {mhz_to_rad(100.0), mhz_to_rad(300.0)};
    UniformSampler s(7117);
    for (int rep = 0; rep < 8; ++rep) {
        const Knobs k = s.knobs_in_window(p);
        const Liouvillian l = qubit_liouvillian(p, k);
        const RateSet r = thermal_rates(p, thermal_gap_value(p, k));
        const double gamma_t = 0.5 * (r.gamma_minus + r.gamma_plus);
        const double dt = 0.099 / spectral_norm_estimate(l.mat);
        MatrixXc rho0 = MatrixXc::Zero(2, 2);
        rho0(1, 1) = 1.0;
        const MatrixXc out = propagate(l, rho0, 22.0 / gamma_t, dt);
        CHECK(trace_distance(out, steady_state_nullspace(l)) < 1e-7);
    }
}

TEST_CASE("step halving converges at fourth order") {
    const EngineParameters p = benchmark_parameters();
    const Knobs k{mhz_to_rad(200.0), mhz_to_rad(1.0)};
    const Liouvillian l = qubit_liouvillian(p, k);
    const RateSet r = thermal_rates(p, thermal_gap_value(p, k));
    const double gamma_t = 0.5 * (r.gamma_minus + r.gamma_plus);
    const double t = 0.5 / gamma_t;  // transient still alive
    const double dt0 = 0.099 / spectral_norm_estimate(l.mat);

    MatrixXc rho0 = MatrixXc::Zero(2, 2);
    rho0(0, 0) = 1.0;
    const MatrixXc ref = propagate(l, rho0, t, dt0 / 8.0);
    const double e1 = (propagate(l, rho0, t, dt0) - ref).norm();
    const double e2 = (propagate(l, rho0, t, dt0 / 2.0) - ref).norm();
    REQUIRE(e2 > 0.0);
    CHECK(e1 / e2 > 11.0);
    CHECK(e1 / e2 < 21.0);
}

TEST_CASE("spectral norm estimate agrees with the largest singular value") {
    UniformSampler s(515);
    const MatrixXc m = random_matrix(s, 12);
    Eigen::JacobiSVD<MatrixXc> svd(m);
    const double exact = svd.singularValues()(0);
    CHECK(spectral_norm_estimate(m) == Approx(exact).epsilon(1e-3));
}

TEST_CASE("driven cavity relaxes to the known coherent state") {
    // Cavity alone: H = delta n + E (a + a'), single decay channel kappa.
    // The steady state is the coherent state alpha = -E / (delta - i kappa/2),
    // with Poissonian level populations.
    const int n_max = 8;
    const int nc = n_max + 1;
    const double delta = 0.5, kappa = 1.0, e_d = 0.3 * std::sqrt(2.0);
    const MatrixXc a = detail::fock_lowering(n_max);
    const MatrixXc h =
        delta * (a.adjoint() * a).eval() + e_d * (a + a.adjoint()).eval();
    const Liouvillian l = make_liouvillian(h, {{kappa, a}});
    const MatrixXc rho = steady_state_nullspace(l);

    const complexd alpha = -e_d / complexd(delta, -0.5 * kappa);
    CHECK(std::abs((rho * a).trace() - alpha) < 1e-6);
    CHECK(std::abs((rho * (a.adjoint() * a).eval()).trace() -
                   complexd(std::norm(alpha), 0.0)) < 1e-6);

    double factorial = 1.0;
    for (int n = 0; n < 5; ++n) {
        if (n > 0) factorial *= (double)n;
        const double poisson =
            std::exp(-std::norm(alpha)) * std::pow(std::norm(alpha), n) /
            factorial;
        CHECK(rho(n, n).real() == Approx(poisson).margin(1e-8));
    }
    CHECK(rho(n_max, n_max).real() < kTailTol);
}

TEST_CASE("weak coupling factorizes the joint steady state") {
    EngineParameters p = benchmark_parameters();
    p.g_over_hbar = 1e-3;  // rad/s: negligible qubit-cavity coupling
    const Knobs k{mhz_to_rad(500.0), mhz_to_rad(0.5)};

    const JointSolution sol = solve_joint_steady(p, k);
    CHECK(sol.trunc.n_max == 10);
    const int nc = sol.trunc.n_max + 1;

    const QubitDensityMatrix reduced = reduced_qubit_state(sol.rho, sol.trunc);
    const QubitDensityMatrix ana = steady_state_analytic(p, k);
    CHECK(trace_distance(reduced, ana) < 1e-8);

    const MatrixXc rho_c = traced_over_qubit(sol.rho, nc);
    CHECK((sol.rho - kron(MatrixXc(reduced.mat), rho_c)).norm() < 1e-6);

    // The hard Fock cutoff perturbs <a> at the sqrt(n_max * tail) scale,
    // well above the trace-distance tolerance of the truncation policy.
    const complexd a_mean =
        (rho_c * detail::fock_lowering(sol.trunc.n_max)).trace();
    CHECK(std::abs(a_mean - cavity_amplitude(p, k.drive)) < 1e-3);
    CHECK(cavity_level_population(sol.rho, nc, sol.trunc.n_max) < kTailTol);
}

TEST_CASE("hundredfold-reduced coupling stays within the reduced-model gap") {
    EngineParameters p = benchmark_parameters();
    p.g_over_hbar /= 100.0;
    const Knobs k{mhz_to_rad(500.0), mhz_to_rad(0.5)};
    const JointSolution sol = solve_joint_steady(p, k);
    const QubitDensityMatrix reduced = reduced_qubit_state(sol.rho, sol.trunc);
    CHECK(trace_distance(reduced, steady_state_analytic(p, k)) < 1e-3);
}

TEST_CASE("truncation policy rejects drives beyond the cap") {
    const EngineParameters p = benchmark_parameters();
    // At the top of the drive window the policy wants n_max = 70 > 64.
    const Knobs k{mhz_to_rad(500.0), p.drive_knob_range[1]};
    CHECK_THROWS_MATCHES(solve_joint_steady(p, k), truncation_error,
                         MessageMatches(ContainsSubstring("initial cutoff")));
    CHECK_THROWS_AS(solve_joint_steady(p, Knobs{mhz_to_rad(500.0),
                                                mhz_to_rad(0.5)}, 4),
                    truncation_error);
    CHECK_THROWS_AS(joint_liouvillian(p, k, FockTruncation{0}),
                    precondition_error);
}

TEST_CASE("partial trace recovers the qubit factor of a product state") {
    Matrix2c q;
    q << complexd(0.6, 0.0), complexd(0.1, 0.25),
         complexd(0.1, -0.25), complexd(0.4, 0.0);
    MatrixXc c = MatrixXc::Zero(3, 3);
    c(0, 0) = 0.5;
    c(1, 1) = 0.3;
    c(2, 2) = 0.2;
    c(0, 2) = complexd(0.05, 0.1);
    c(2, 0) = complexd(0.05, -0.1);

    const MatrixXc joint = kron(MatrixXc(q), c);
    const QubitDensityMatrix red = reduced_qubit_state(joint, FockTruncation{2});
    CHECK((red.mat - q).norm() < 1e-15);
    for (int n = 0; n < 3; ++n)
        CHECK(cavity_level_population(joint, 3, n) ==
              Approx(c(n, n).real()).margin(1e-15));

    CHECK_THROWS_AS(reduced_qubit_state(joint, FockTruncation{3}),
                    precondition_error);
    CHECK_THROWS_AS(as_qubit_state(joint), precondition_error);
}
