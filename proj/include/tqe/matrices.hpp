#pragma once

#include <Eigen/Dense>
#include <complex>

#include "tqe/errors.hpp"

namespace tqe {

using complexd = std::complex<double>;
using Matrix2c = Eigen::Matrix2cd;
using MatrixXc = Eigen::MatrixXcd;
using VectorXc = Eigen::VectorXcd;

inline constexpr complexd kI{0.0, 1.0};

// Pauli and ladder matrices as module-level constants.
inline const Matrix2c& sigma_x() {
    static const Matrix2c m = (Matrix2c() << 0, 1, 1, 0).finished();
    return m;
}
inline const Matrix2c& sigma_y() {
    static const Matrix2c m = (Matrix2c() << 0, -kI, kI, 0).finished();
    return m;
}
inline const Matrix2c& sigma_z() {
    static const Matrix2c m = (Matrix2c() << 1, 0, 0, -1).finished();
    return m;
}
// Basis order is (e, g): sigma+ = |e><g|, sigma- = |g><e|.
inline const Matrix2c& sigma_plus() {
    static const Matrix2c m = (Matrix2c() << 0, 1, 0, 0).finished();
    return m;
}
inline const Matrix2c& sigma_minus() {
    static const Matrix2c m = (Matrix2c() << 0, 0, 1, 0).finished();
    return m;
}
inline const Matrix2c& identity2() {
    static const Matrix2c m = Matrix2c::Identity();
    return m;
}

// 2x2 density matrix of the working substance, basis (e, g).
struct QubitDensityMatrix {
    Matrix2c mat = Matrix2c::Zero();

    double ee() const { return mat(0, 0).real(); }
    complexd eg() const { return mat(0, 1); }
    complexd ge() const { return mat(1, 0); }
    double gg() const { return mat(1, 1).real(); }

    void validate(double tol = 1e-12) const {
        if (std::abs(mat(1, 0) - std::conj(mat(0, 1))) > tol ||
            std::abs(mat(0, 0).imag()) > tol || std::abs(mat(1, 1).imag()) > tol)
            throw domain_error("density matrix not Hermitian");
        if (std::abs(mat.trace() - 1.0) > tol)
            throw domain_error("density matrix trace != 1");
        const double det =
            mat(0, 0).real() * mat(1, 1).real() - std::norm(mat(0, 1));
        if (det < -tol) throw domain_error("density matrix not PSD");
    }
};

// Effective 2x2 working-substance Hamiltonian (hbar = 1, entries rad/s).
struct EffectiveHamiltonian {
    Matrix2c mat = Matrix2c::Zero();
};

inline double trace_distance(const Matrix2c& a, const Matrix2c& b) {
    Eigen::SelfAdjointEigenSolver<Matrix2c> es(a - b);
    return 0.5 * es.eigenvalues().cwiseAbs().sum();
}

inline double trace_distance(const MatrixXc& a, const MatrixXc& b) {
    Eigen::SelfAdjointEigenSolver<MatrixXc> es(a - b);
    return 0.5 * es.eigenvalues().cwiseAbs().sum();
}

inline double trace_distance(const QubitDensityMatrix& a,
                             const QubitDensityMatrix& b) {
    return trace_distance(a.mat, b.mat);
}

// Kronecker product, column-major consistent with column-stacking vec().
inline MatrixXc kron(const MatrixXc& a, const MatrixXc& b) {
    MatrixXc out(a.rows() * b.rows(), a.cols() * b.cols());
    for (Eigen::Index i = 0; i < a.rows(); ++i)
        for (Eigen::Index j = 0; j < a.cols(); ++j)
            out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) =
                a(i, j) * b;
    return out;
}

// Column-stacking vectorization and its inverse.
inline VectorXc vec(const MatrixXc& m) {
    return Eigen::Map<const VectorXc>(m.data(), m.size());
}
inline MatrixXc unvec(const VectorXc& v, Eigen::Index d) {
    return Eigen::Map<const MatrixXc>(v.data(), d, d);
}

}  // namespace tqe
