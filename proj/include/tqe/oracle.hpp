#pragma once

#include <cmath>
#include <cstdio>
#include <utility>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/SVD>

#include "tqe/errors.hpp"
#include "tqe/matrices.hpp"
#include "tqe/model.hpp"
#include "tqe/params.hpp"

// Independent Lindblad machinery used to cross-check every closed form:
// dense superoperators in the column-stacking convention
// (vec(AXB) = (B^T kron A) vec(X)), steady states via SVD null space,
// fixed-step RK4 propagation, and the two-subsystem model with partial trace.

namespace tqe {

struct Liouvillian {
    MatrixXc mat;       // d^2 x d^2
    Eigen::Index dim;   // Hilbert dimension d
};

// L[rho] = -i[H, rho] + sum_k rate_k D[A_k] rho, column-stacked.
inline Liouvillian make_liouvillian(
    const MatrixXc& h,
    const std::vector<std::pair<double, MatrixXc>>& channels) {
    const Eigen::Index d = h.rows();
    const MatrixXc id = MatrixXc::Identity(d, d);
    MatrixXc l = -kI * (kron(id, h) - kron(h.transpose(), id));
    for (const auto& [rate, a] : channels) {
        const MatrixXc ada = a.adjoint() * a;
        l += rate * (kron(a.conjugate(), a) - 0.5 * kron(id, ada) -
                     0.5 * kron(ada.transpose(), id));
    }
    return {std::move(l), d};
}

// Reduced working-substance generator: effective Hamiltonian plus the two
// thermal qubit channels.
inline Liouvillian qubit_liouvillian(const EngineParameters& p,
                                     const Knobs& k) {
    const RateSet r = thermal_rates(p, thermal_gap_value(p, k));
    return make_liouvillian(effective_hamiltonian(p, k).mat,
                            {{r.gamma_minus, sigma_minus()},
                             {r.gamma_plus, sigma_plus()}});
}

// Fock-space cutoff for the cavity (levels 0..n_max): acceptable only when
// the steady cavity population at n_max stays below kTailTol.
struct FockTruncation {
    int n_max = 1;
};
inline constexpr double kTailTol = 1e-6;

namespace detail {
inline MatrixXc fock_lowering(int n_max) {
    MatrixXc a = MatrixXc::Zero(n_max + 1, n_max + 1);
    for (int n = 1; n <= n_max; ++n) a(n - 1, n) = std::sqrt((double)n);
    return a;
}
}  // namespace detail

// Two-subsystem generator (working substance kron cavity, joint index
// q*(n_max+1)+n): rotating-frame Hamiltonian
//   H = (delta/2) sz x I + (omega_cpw - omega_pump) I x a'a
//       + (g/hbar)(s+ x a + s- x a') + (E_d/hbar) I x (a + a')
// with cavity decay/excitation and qubit relaxation/excitation channels.
inline Liouvillian joint_liouvillian(const EngineParameters& p, const Knobs& k,
                                     const FockTruncation& t) {
    if (t.n_max < 1) throw precondition_error("n_max must be >= 1");
    const int nc = t.n_max + 1;
    const MatrixXc a = detail::fock_lowering(t.n_max);
    const MatrixXc ic = MatrixXc::Identity(nc, nc);
    const MatrixXc iq = MatrixXc::Identity(2, 2);
    const double delta = rotating_gap(p, k);
    const double delta_c = p.omega_cpw - p.omega_pump;
    MatrixXc h = 0.5 * delta * kron(sigma_z(), ic) +
                 delta_c * kron(iq, a.adjoint() * a) +
                 p.g_over_hbar * (kron(sigma_plus(), a) +
                                  kron(sigma_minus(), a.adjoint())) +
                 k.drive * kron(iq, MatrixXc(a + a.adjoint()));
    const RateSet r = thermal_rates(p, thermal_gap_value(p, k));
    return make_liouvillian(h, {{r.k_minus, kron(iq, a)},
                                {r.k_plus, kron(iq, a.adjoint())},
                                {r.gamma_minus, kron(sigma_minus(), ic)},
                                {r.gamma_plus, kron(sigma_plus(), ic)}});
}

// Kernel vector of L, reshaped, Hermitized and trace-normalized. Requires a
// one-dimensional kernel (second-smallest singular value well separated) and
// enforces the residual gate ||L vec(rho)|| <= 1e-10 ||L||_F.
inline MatrixXc steady_state_nullspace(const Liouvillian& l) {
    const Eigen::Index n = l.mat.rows();
    Eigen::VectorXd sv;
    VectorXc kernel;
    if (n <= 128) {
        Eigen::JacobiSVD<MatrixXc> svd(l.mat, Eigen::ComputeThinV);
        sv = svd.singularValues();
        kernel = svd.matrixV().col(n - 1);
    } else {
        Eigen::BDCSVD<MatrixXc> svd(l.mat, Eigen::ComputeThinV);
        sv = svd.singularValues();
        kernel = svd.matrixV().col(n - 1);
    }
    if (!(sv(n - 2) / sv(0) > 1e-8)) {
        char msg[160];
        std::snprintf(msg, sizeof msg,
                      "kernel not one-dimensional: two smallest singular "
                      "values %.3e, %.3e (largest %.3e)",
                      sv(n - 1), sv(n - 2), sv(0));
        throw ambiguity_error(msg);
    }
    MatrixXc x = unvec(kernel, l.dim);
    // The kernel vector carries an arbitrary complex phase; rotate it so the
    // trace is real and positive before Hermitizing, otherwise the Hermitian
    // part could nearly vanish.
    const complexd tr = x.trace();
    if (tr != complexd(0.0, 0.0)) x *= std::conj(tr) / std::abs(tr);
    x = 0.5 * (x + MatrixXc(x.adjoint()));
    x /= x.trace();
    const double residual = (l.mat * vec(x)).norm();
    if (residual > 1e-10 * l.mat.norm()) {
        char msg[128];
        std::snprintf(msg, sizeof msg,
                      "steady-state residual %.3e exceeds 1e-10*||L|| = %.3e",
                      residual, 1e-10 * l.mat.norm());
        throw tolerance_error(msg);
    }
    return x;
}

inline QubitDensityMatrix as_qubit_state(const MatrixXc& m) {
    if (m.rows() != 2 || m.cols() != 2)
        throw precondition_error("expected a 2x2 state");
    QubitDensityMatrix rho;
    rho.mat = m;
    return rho;
}

// Spectral-norm estimate of L by power iteration on L'L (upper-bounded by
// the Frobenius norm, which seeds the iteration).
inline double spectral_norm_estimate(const MatrixXc& m, int iters = 30) {
    VectorXc v = VectorXc::Ones(m.cols());
    v.normalize();
    double s = m.norm();
    for (int i = 0; i < iters; ++i) {
        VectorXc w = m.adjoint() * (m * v);
        const double n = w.norm();
        if (n == 0.0) return 0.0;
        v = w / n;
        s = std::sqrt(n);
    }
    return s;
}

// Fixed-step classical RK4 for rho' = L[rho]. dt must satisfy
// dt <= 0.1 / ||L|| (spectral estimate); the step actually used divides
// t_final evenly and never exceeds dt.
inline MatrixXc propagate(const Liouvillian& l, const MatrixXc& rho0,
                          double t_final, double dt) {
    if (t_final < 0.0) throw precondition_error("t_final must be >= 0");
    if (t_final == 0.0) return rho0;
    const double norm_l = spectral_norm_estimate(l.mat);
    if (norm_l > 0.0 && dt > 0.1 / norm_l) {
        char msg[128];
        std::snprintf(msg, sizeof msg,
                      "dt = %.3e exceeds 0.1/||L|| = %.3e", dt, 0.1 / norm_l);
        throw precondition_error(msg);
    }
    const long long steps = (long long)std::ceil(t_final / dt);
    const double h = t_final / (double)steps;
    VectorXc v = vec(rho0);
    const Eigen::Index n = v.size();
    VectorXc k1(n), k2(n), k3(n), k4(n), tmp(n);
    for (long long i = 0; i < steps; ++i) {
        k1.noalias() = l.mat * v;
        tmp = v + (0.5 * h) * k1;
        k2.noalias() = l.mat * tmp;
        tmp = v + (0.5 * h) * k2;
        k3.noalias() = l.mat * tmp;
        tmp = v + h * k3;
        k4.noalias() = l.mat * tmp;
        v += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    }
    return unvec(v, l.dim);
}

// Partial trace over the cavity index.
inline QubitDensityMatrix reduced_qubit_state(const MatrixXc& joint,
                                              const FockTruncation& t) {
    const int nc = t.n_max + 1;
    if (joint.rows() != 2 * nc || joint.cols() != 2 * nc)
        throw precondition_error("joint state dimension mismatch");
    QubitDensityMatrix rho;
    for (int q = 0; q < 2; ++q)
        for (int qp = 0; qp < 2; ++qp) {
            complexd s = 0.0;
            for (int n = 0; n < nc; ++n) s += joint(q * nc + n, qp * nc + n);
            rho.mat(q, qp) = s;
        }
    return rho;
}

// Cavity population of the joint state at Fock level n.
inline double cavity_level_population(const MatrixXc& joint, int nc, int n) {
    return (joint(n, n) + joint(nc + n, nc + n)).real();
}

struct JointSolution {
    FockTruncation trunc;
    MatrixXc rho;
};

// Truncation policy: start at ceil(4|<a>|^2 + 6) (coherent occupation
// concentrates near |<a>|^2), solve, and double until the tail population at
// n_max drops below kTailTol.
inline JointSolution solve_joint_steady(const EngineParameters& p,
                                        const Knobs& k, int max_n = 64) {
    int n_max =
        (int)std::ceil(4.0 * std::norm(cavity_amplitude(p, k.drive)) + 6.0);
    if (n_max > max_n) {
        char msg[128];
        std::snprintf(msg, sizeof msg,
                      "drive needs an initial cutoff n_max = %d, beyond the "
                      "cap %d (superoperator dimension 4(n_max+1)^2)",
                      n_max, max_n);
        throw truncation_error(msg);
    }
    while (true) {
        const FockTruncation t{n_max};
        const MatrixXc rho = steady_state_nullspace(joint_liouvillian(p, k, t));
        const double tail = cavity_level_population(rho, n_max + 1, n_max);
        if (tail < kTailTol) return {t, rho};
        if (2 * n_max > max_n) {
            char msg[128];
            std::snprintf(msg, sizeof msg,
                          "tail population %.3e at n_max = %d still above "
                          "%.1e and doubling would exceed n_max = %d",
                          tail, n_max, kTailTol, max_n);
            throw truncation_error(msg);
        }
        n_max *= 2;
    }
}

}  // namespace tqe
