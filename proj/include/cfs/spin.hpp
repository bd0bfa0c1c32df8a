#pragma once

#include <optional>
#include <string>

#include "cfs/operators.hpp"

namespace cfs {

/// Spin space of a point operator: the image x(H) with the indefinite spin
/// scalar product <u|v>_x = -<u| x v>. In the stored eigenbasis the Gram
/// matrix is -diag(lambda), so it is diagonal and nondegenerate whenever the
/// rank is positive.
struct SpinSpace {
    const LocalOperator* point = nullptr;
    CMatrix basis; // f x k orthonormal columns spanning x(H)
    CMatrix gram;  // k x k, equals -basis^H x basis
    int p = 0, q = 0;

    int dim() const { return static_cast<int>(basis.cols()); }
};

inline SpinSpace spin_space(const LocalOperator& x) {
    SpinSpace s;
    s.point = &x;
    s.basis = x.basis();
    s.gram = (-x.eigenvalues()).cast<Complex>().asDiagonal();
    for (int i = 0; i < x.rank(); ++i) (x.eigenvalues()(i) < 0 ? s.p : s.q)++;
    return s;
}

/// Kernel of the fermionic projector P(x,y) = pi_x y|_{S_y} : S_y -> S_x,
/// stored as its matrix between the two spin bases.
struct KernelMatrix {
    const SpinSpace* target = nullptr; // at x
    const SpinSpace* source = nullptr; // at y
    CMatrix entries;                   // k_x by k_y
};

inline KernelMatrix kernel(const SpinSpace& x, const SpinSpace& y) {
    if (x.point->dim_h() != y.point->dim_h()) throw DimensionMismatch("kernel");
    KernelMatrix k;
    k.target = &x;
    k.source = &y;
    k.entries = x.basis.adjoint() * y.point->apply(y.basis);
    return k;
}

/// Adjoint with respect to the spin scalar products,
/// P(x,y)^* = G_y^{-1} P^H G_x : S_x -> S_y.
inline CMatrix spin_adjoint(const KernelMatrix& k) {
    const CMatrix& gy = k.source->gram;
    for (int i = 0; i < gy.rows(); ++i)
        if (std::abs(gy(i, i)) == 0.0) throw SingularGram("source gram is singular");
    CMatrix out = k.entries.adjoint() * k.target->gram;
    for (int i = 0; i < out.rows(); ++i) out.row(i) /= gy(i, i);
    return out;
}

/// Closed chain A_xy = P(x,y) P(y,x) : S_x -> S_x, assembled as the
/// spin-adjoint composition.
inline CMatrix closed_chain(const SpinSpace& x, const SpinSpace& y) {
    KernelMatrix kxy = kernel(x, y);
    return kxy.entries * spin_adjoint(kxy);
}

struct TimelikeCheck {
    bool value = false;
    std::string reason;
    explicit operator bool() const { return value; }
};

/// Strictly positive chain spectrum with definite eigenspaces (the
/// properly-timelike predicate). Non-regular points fail with a reason
/// instead of throwing.
inline TimelikeCheck properly_timelike_check(const LocalOperator& x, const LocalOperator& y,
                                             double tol = 1e-8) {
    TimelikeCheck r;
    if (!x.regular() || !y.regular()) {
        r.reason = "point not regular";
        return r;
    }
    SpinSpace sx = spin_space(x), sy = spin_space(y);
    CMatrix a = closed_chain(sx, sy);
    Eigen::ComplexEigenSolver<CMatrix> es(a);
    const CVector& lam = es.eigenvalues();
    double scale = lam.cwiseAbs().maxCoeff();
    if (scale == 0.0) {
        r.reason = "zero chain";
        return r;
    }
    for (int i = 0; i < lam.size(); ++i) {
        if (std::abs(lam(i).imag()) > tol * scale) {
            r.reason = "complex chain spectrum";
            return r;
        }
        if (lam(i).real() <= tol * scale) {
            r.reason = "non-positive chain eigenvalue";
            return r;
        }
    }
    // cluster equal eigenvalues and test definiteness of each eigenspace
    const int k = static_cast<int>(lam.size());
    std::vector<int> order(k);
    for (int i = 0; i < k; ++i) order[i] = i;
    std::sort(order.begin(), order.end(),
              [&](int i, int j) { return lam(i).real() < lam(j).real(); });
    double gram_norm = sx.gram.diagonal().cwiseAbs().maxCoeff();
    int i = 0;
    while (i < k) {
        int j = i;
        while (j + 1 < k && lam(order[j + 1]).real() - lam(order[i]).real() <= tol * scale) ++j;
        CMatrix w(k, j - i + 1);
        for (int c = i; c <= j; ++c) w.col(c - i) = es.eigenvectors().col(order[c]);
        CMatrix g = hermitian_part(w.adjoint() * sx.gram * w);
        Eigen::SelfAdjointEigenSolver<CMatrix> ges(g, Eigen::EigenvaluesOnly);
        const RVector& gl = ges.eigenvalues();
        bool pos = gl.minCoeff() > tol * gram_norm;
        bool neg = gl.maxCoeff() < -tol * gram_norm;
        if (!pos && !neg) {
            r.reason = "indefinite eigenspace";
            return r;
        }
        i = j + 1;
    }
    r.value = true;
    return r;
}

inline bool properly_timelike(const LocalOperator& x, const LocalOperator& y,
                              double tol = 1e-8) {
    return properly_timelike_check(x, y, tol).value;
}

inline CausalClass classify_causal(const LocalOperator& x, const LocalOperator& y,
                                   double tol = 1e-8) {
    if (!(tol > 0 && tol < 0.5)) throw Error("classification tol must lie in (0, 0.5)");
    ChainSpectrum s = product_spectrum(x, y);
    CausalClass c = classify_spectrum(s, tol, x.norm() * y.norm());
    if (c.tag == CausalTag::Timelike && !c.degenerate)
        c.properly_timelike = properly_timelike(x, y, tol);
    return c;
}

/// Euclidean sign operator: +1 on the positive spectral subspace of (-x),
/// -1 on the negative one. In the stored eigenbasis this is -sign(lambda).
inline CMatrix euclidean_sign(const SpinSpace& x) {
    if (!x.point->regular()) throw SingularPoint("euclidean sign needs a regular point");
    const int k = x.dim();
    CMatrix s = CMatrix::Zero(k, k);
    for (int i = 0; i < k; ++i) s(i, i) = x.point->eigenvalues()(i) < 0 ? 1.0 : -1.0;
    return s;
}

/// Directional sign operator of A_xy for spin dimension two: the involution
/// whose +1/-1 eigenspaces are the positive/negative definite invariant
/// subspaces of the closed chain.
inline CMatrix directional_sign(const SpinSpace& x, const SpinSpace& y, double tol = 1e-8) {
    if (x.point->spin_dim() != 2) throw WrongSpinDimension("directional sign requires n = 2");
    TimelikeCheck pt = properly_timelike_check(*x.point, *y.point, tol);
    if (!pt) throw NotProperlyTimelike("pair is not properly timelike: " + pt.reason);
    CMatrix a = closed_chain(x, y);
    Eigen::ComplexEigenSolver<CMatrix> es(a);
    const int k = static_cast<int>(a.rows());
    CMatrix w(k, k);
    RVector sgn(k);
    for (int i = 0; i < k; ++i) {
        CVector v = es.eigenvectors().col(i);
        Complex g = v.adjoint() * x.gram * v;
        sgn(i) = g.real() > 0 ? 1.0 : -1.0;
        w.col(i) = v;
    }
    int npos = static_cast<int>((sgn.array() > 0).count());
    if (npos != 2 || k != 4)
        throw NotProperlyTimelike("invariant subspaces are not two-dimensional");
    return w * sgn.cast<Complex>().asDiagonal() * w.inverse();
}

/// Tests whether the span of the given spin-symmetric generators is a
/// Clifford subspace: every anticommutator {u,v} must be a multiple of the
/// identity and the induced bilinear form nondegenerate. Returns its
/// signature (r,s), or nothing if either condition fails.
inline std::optional<std::pair<int, int>> is_clifford_subspace(const CMatrix& gram,
                                                               const std::vector<CMatrix>& gens,
                                                               double tol = 1e-9) {
    const int m = static_cast<int>(gens.size());
    if (m == 0) return std::nullopt;
    const int k = static_cast<int>(gram.rows());
    for (const CMatrix& u : gens) {
        if (u.rows() != k || u.cols() != k) return std::nullopt;
        // spin symmetry: G u = u^H G
        if ((gram * u - u.adjoint() * gram).norm() > tol * std::max(1.0, (gram * u).norm()))
            return std::nullopt;
    }
    RMatrix form(m, m);
    for (int i = 0; i < m; ++i)
        for (int j = 0; j < m; ++j) {
            CMatrix anti = gens[i] * gens[j] + gens[j] * gens[i];
            Complex c = anti.trace() / static_cast<double>(k);
            if ((anti - c * CMatrix::Identity(k, k)).norm() >
                tol * std::max(1.0, anti.norm()))
                return std::nullopt; // not a multiple of the identity
            if (std::abs(c.imag()) > tol * std::max(1.0, std::abs(c))) return std::nullopt;
            form(i, j) = 0.5 * c.real();
        }
    Eigen::SelfAdjointEigenSolver<RMatrix> es(0.5 * (form + form.transpose()),
                                              Eigen::EigenvaluesOnly);
    const RVector& ev = es.eigenvalues();
    double vmax = ev.cwiseAbs().maxCoeff();
    if (vmax == 0.0 || ev.cwiseAbs().minCoeff() <= tol * vmax) return std::nullopt;
    int r = static_cast<int>((ev.array() > 0).count());
    return std::make_pair(r, m - r);
}

inline std::optional<std::pair<int, int>> is_clifford_subspace(const SpinSpace& x,
                                                               const std::vector<CMatrix>& gens,
                                                               double tol = 1e-9) {
    return is_clifford_subspace(x.gram, gens, tol);
}

} // namespace cfs
