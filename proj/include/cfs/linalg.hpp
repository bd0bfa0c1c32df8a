#pragma once

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>
#include <complex>
#include <vector>

namespace cfs {

using Complex = std::complex<double>;
using CMatrix = Eigen::MatrixXcd;
using CVector = Eigen::VectorXcd;
using RMatrix = Eigen::MatrixXd;
using RVector = Eigen::VectorXd;

inline constexpr Complex kI{0.0, 1.0};

/// Operator norm (largest singular value) of a Hermitian matrix via its
/// spectral radius; for general matrices falls back to the SVD.
inline double op_norm_hermitian(const CMatrix& a) {
    if (a.rows() == 0) return 0.0;
    Eigen::SelfAdjointEigenSolver<CMatrix> es(a, Eigen::EigenvaluesOnly);
    return es.eigenvalues().cwiseAbs().maxCoeff();
}

inline double op_norm(const CMatrix& a) {
    if (a.rows() == 0 || a.cols() == 0) return 0.0;
    return a.jacobiSvd().singularValues()(0);
}

/// Hermitian part (a + a^dagger)/2.
inline CMatrix hermitian_part(const CMatrix& a) { return 0.5 * (a + a.adjoint()); }

/// Matrix absolute value of a Hermitian matrix, |a| = sqrt(a^2), via the
/// eigen-decomposition.
inline CMatrix matrix_abs(const CMatrix& a) {
    Eigen::SelfAdjointEigenSolver<CMatrix> es(a);
    return es.eigenvectors() * es.eigenvalues().cwiseAbs().asDiagonal() *
           es.eigenvectors().adjoint();
}

/// Square root of a positive semidefinite Hermitian matrix. Eigenvalues are
/// floored at zero so that roundoff-negative values do not produce NaNs.
inline CMatrix matrix_sqrt_psd(const CMatrix& a) {
    Eigen::SelfAdjointEigenSolver<CMatrix> es(a);
    RVector lam = es.eigenvalues().cwiseMax(0.0).cwiseSqrt();
    return es.eigenvectors() * lam.asDiagonal() * es.eigenvectors().adjoint();
}

/// Inertia (p, q) of a Hermitian matrix: counts of eigenvalues above and
/// below rel_tol * max|eigenvalue|.
inline std::pair<int, int> inertia(const CMatrix& g, double rel_tol = 1e-10) {
    if (g.rows() == 0) return {0, 0};
    Eigen::SelfAdjointEigenSolver<CMatrix> es(g, Eigen::EigenvaluesOnly);
    const RVector& lam = es.eigenvalues();
    double cut = rel_tol * lam.cwiseAbs().maxCoeff();
    int p = 0, q = 0;
    for (int i = 0; i < lam.size(); ++i) {
        if (lam(i) > cut) ++p;
        else if (lam(i) < -cut) ++q;
    }
    return {p, q};
}

/// Orthonormal basis of the column span of a, truncated at the given
/// relative rank tolerance. Returns an f x r matrix with orthonormal columns.
inline CMatrix orthonormal_image(const CMatrix& a, double rel_tol = 1e-12) {
    if (a.cols() == 0) return CMatrix(a.rows(), 0);
    Eigen::ColPivHouseholderQR<CMatrix> qr(a);
    qr.setThreshold(rel_tol);
    int r = static_cast<int>(qr.rank());
    CMatrix q = qr.householderQ() * CMatrix::Identity(a.rows(), r);
    return q;
}

/// Eigenvalues of a general complex matrix, sorted by descending modulus
/// (ties broken by real part, then imaginary part, for determinism).
inline std::vector<Complex> eigenvalues_sorted(const CMatrix& a) {
    std::vector<Complex> out;
    if (a.rows() == 0) return out;
    Eigen::ComplexEigenSolver<CMatrix> es(a, /*computeEigenvectors=*/false);
    out.reserve(a.rows());
    for (int i = 0; i < a.rows(); ++i) out.push_back(es.eigenvalues()(i));
    std::sort(out.begin(), out.end(), [](const Complex& u, const Complex& v) {
        double au = std::abs(u), av = std::abs(v);
        if (au != av) return au > av;
        if (u.real() != v.real()) return u.real() > v.real();
        return u.imag() > v.imag();
    });
    return out;
}

} // namespace cfs
