#pragma once

#include <Eigen/Dense>

#include "cfs/linalg.hpp"
#include "cfs/sea_kernel.hpp"

namespace cfs::dirac {

/// Gamma matrices in the Dirac representation, gamma^0 = diag(1,1,-1,-1),
/// spinor inner product psi^dag gamma^0 phi of signature (2,2).
inline const CMatrix& gamma(int mu) {
    static const std::array<CMatrix, 4> g = [] {
        std::array<CMatrix, 4> a;
        for (auto& m : a) m = CMatrix::Zero(4, 4);
        a[0](0, 0) = a[0](1, 1) = 1;
        a[0](2, 2) = a[0](3, 3) = -1;
        // gamma^i = [[0, sigma_i], [-sigma_i, 0]]
        CMatrix s1(2, 2), s2(2, 2), s3(2, 2);
        s1 << 0, 1, 1, 0;
        s2 << 0, Complex(0, -1), Complex(0, 1), 0;
        s3 << 1, 0, 0, -1;
        const CMatrix* sig[3] = {&s1, &s2, &s3};
        for (int i = 0; i < 3; ++i) {
            a[i + 1].block(0, 2, 2, 2) = *sig[i];
            a[i + 1].block(2, 0, 2, 2) = -*sig[i];
        }
        return a;
    }();
    return g[mu];
}

/// k-slash = k_j gamma^j = k^0 gamma^0 - sum_i k^i gamma^i.
inline CMatrix slash(const FourVector& k) {
    return k.t * gamma(0) - k.x1 * gamma(1) - k.x2 * gamma(2) - k.x3 * gamma(3);
}

/// Orthonormal spinor basis of the negative-frequency solution space at
/// spatial momentum kvec: ker(kslash - m) with k^0 = -omega, spanned by the
/// columns of (kslash + m) and orthonormalized in fixed column order.
inline CMatrix negative_energy_spinors(const Eigen::Vector3d& kvec, double m) {
    double omega = std::sqrt(kvec.squaredNorm() + m * m);
    FourVector k{-omega, kvec(0), kvec(1), kvec(2)};
    CMatrix a = slash(k) + m * CMatrix::Identity(4, 4);
    CMatrix out(4, 2);
    int found = 0;
    for (int c = 0; c < 4 && found < 2; ++c) {
        CVector v = a.col(c);
        for (int j = 0; j < found; ++j) v -= out.col(j).dot(v) * out.col(j);
        double nn = v.norm();
        if (nn > 1e-8 * m) out.col(found++) = v / nn;
    }
    if (found != 2) throw Error("negative-frequency kernel is not two-dimensional");
    return out;
}

/// Deviation of the on-shell projector identity
/// (kslash+m) gamma^0 (kslash+m) = 2 k^0 (kslash+m) at k = (-omega, kvec).
inline double momentum_projector_check(const Eigen::Vector3d& kvec, double m) {
    double omega = std::sqrt(kvec.squaredNorm() + m * m);
    FourVector k{-omega, kvec(0), kvec(1), kvec(2)};
    CMatrix a = slash(k) + m * CMatrix::Identity(4, 4);
    CMatrix dev = a * gamma(0) * a - 2.0 * k.t * a;
    return dev.norm();
}

/// The mixed-frequency combination (kslash+m) gamma^0 (qslash+m) with
/// q = (-k^0, kvec); vanishes on shell (the "case -" of the normalization
/// computation).
inline double mixed_frequency_norm(const Eigen::Vector3d& kvec, double m) {
    double omega = std::sqrt(kvec.squaredNorm() + m * m);
    FourVector k{omega, kvec(0), kvec(1), kvec(2)};
    FourVector q{-omega, kvec(0), kvec(1), kvec(2)};
    CMatrix a = slash(k) + m * CMatrix::Identity(4, 4);
    CMatrix b = slash(q) + m * CMatrix::Identity(4, 4);
    return (a * gamma(0) * b).norm();
}

} // namespace cfs::dirac
