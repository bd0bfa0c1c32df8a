#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "cfs/errors.hpp"
#include "cfs/linalg.hpp"

namespace cfs {

/// Hermitian finite-rank operator on C^f with at most n positive and at most
/// n negative eigenvalues (counting multiplicity). Stored in factored form
/// x = B diag(lam) B^dagger with B an f x r orthonormal image basis and lam
/// the nonzero eigenvalues sorted ascending; a dense matrix is materialized
/// on demand.
class LocalOperator {
public:
    LocalOperator() = default;
    LocalOperator(int dim_h, int spin_dim, CMatrix basis, RVector lam)
        : dim_h_(dim_h), spin_dim_(spin_dim), basis_(std::move(basis)), lam_(std::move(lam)) {}

    int dim_h() const { return dim_h_; }
    int spin_dim() const { return spin_dim_; }
    int rank() const { return static_cast<int>(lam_.size()); }
    bool regular() const { return rank() == 2 * spin_dim_; }
    const CMatrix& basis() const { return basis_; }
    const RVector& eigenvalues() const { return lam_; }

    double norm() const { return lam_.size() ? lam_.cwiseAbs().maxCoeff() : 0.0; }
    double trace() const { return lam_.size() ? lam_.sum() : 0.0; }

    std::pair<int, int> signature() const {
        int p = 0, q = 0;
        for (int i = 0; i < lam_.size(); ++i) (lam_(i) > 0 ? p : q)++;
        return {p, q};
    }

    CMatrix dense() const {
        if (rank() == 0) return CMatrix::Zero(dim_h_, dim_h_);
        return basis_ * lam_.asDiagonal() * basis_.adjoint();
    }

    /// x * m without materializing the dense form.
    CMatrix apply(const CMatrix& m) const {
        if (rank() == 0) return CMatrix::Zero(dim_h_, m.cols());
        return basis_ * (lam_.asDiagonal() * (basis_.adjoint() * m));
    }

private:
    int dim_h_ = 0;
    int spin_dim_ = 0;
    CMatrix basis_; // f x r, orthonormal columns
    RVector lam_;   // r nonzero eigenvalues, ascending
};

namespace detail {

inline LocalOperator from_eigenpairs(int f, int n, const CMatrix& vecs, const RVector& vals,
                                     double tol_rank, bool validate) {
    double vmax = vals.size() ? vals.cwiseAbs().maxCoeff() : 0.0;
    double cut = tol_rank * vmax;
    std::vector<int> keep;
    for (int i = 0; i < vals.size(); ++i)
        if (std::abs(vals(i)) > cut) keep.push_back(i);
    // ascending eigenvalue order
    std::sort(keep.begin(), keep.end(), [&](int a, int b) { return vals(a) < vals(b); });
    CMatrix basis(f, static_cast<int>(keep.size()));
    RVector lam(static_cast<int>(keep.size()));
    for (std::size_t j = 0; j < keep.size(); ++j) {
        basis.col(static_cast<int>(j)) = vecs.col(keep[j]);
        lam(static_cast<int>(j)) = vals(keep[j]);
    }
    if (validate) {
        int p = 0, q = 0;
        for (int i = 0; i < lam.size(); ++i) (lam(i) > 0 ? p : q)++;
        if (p > n || q > n)
            throw SignatureViolation("operator has " + std::to_string(p) + " positive and " +
                                     std::to_string(q) + " negative eigenvalues, limit n=" +
                                     std::to_string(n));
        if (static_cast<int>(keep.size()) > 2 * n)
            throw RankViolation("rank " + std::to_string(keep.size()) + " exceeds 2n");
    }
    return LocalOperator(f, n, std::move(basis), std::move(lam));
}

} // namespace detail

/// Validates a dense Hermitian matrix as an admissible point operator.
/// Eigenvalues with |lambda| <= tol * max|lambda| are treated as zero.
inline LocalOperator make_local_operator(const CMatrix& matrix, int spin_dim,
                                         double tol = 1e-10) {
    if (matrix.rows() != matrix.cols()) throw DimensionMismatch("matrix must be square");
    if (spin_dim < 1) throw Error("spin_dim must be positive");
    if (!(tol > 0)) throw Error("tol must be positive");
    const int f = static_cast<int>(matrix.rows());
    double scale = matrix.norm(); // Frobenius
    double asym = (matrix - matrix.adjoint()).norm();
    if (asym > tol * std::max(scale, 1e-300))
        throw NotHermitian("asymmetry " + std::to_string(asym) + " above tolerance");
    Eigen::SelfAdjointEigenSolver<CMatrix> es(hermitian_part(matrix));
    return detail::from_eigenpairs(f, spin_dim, es.eigenvectors(), es.eigenvalues(), tol, true);
}

/// Builds a point operator from a low-rank factorization x = iota * core * iota^dagger
/// with iota of shape f x r and a small Hermitian core. Only the r x r problem is
/// diagonalized, so this stays cheap for large f.
inline LocalOperator make_from_factor(const CMatrix& iota, const CMatrix& core, int spin_dim,
                                      double tol = 1e-10, bool validate = true) {
    const int f = static_cast<int>(iota.rows());
    Eigen::HouseholderQR<CMatrix> qr(iota);
    const int r = static_cast<int>(iota.cols());
    CMatrix q = qr.householderQ() * CMatrix::Identity(f, r);
    CMatrix rr = q.adjoint() * iota;
    CMatrix small = hermitian_part(rr * core * rr.adjoint());
    Eigen::SelfAdjointEigenSolver<CMatrix> es(small);
    CMatrix vecs = q * es.eigenvectors();
    return detail::from_eigenpairs(f, spin_dim, vecs, es.eigenvalues(), tol, validate);
}

/// Nontrivial eigenvalues of the product xy, zero-padded to length 2n.
struct ChainSpectrum {
    std::vector<Complex> values; // length 2n, sorted by descending modulus
    double scale = 0.0;          // max modulus
    int spin_dim = 0;
};

/// Shared reduction frame for a pair of operators: an orthonormal basis J of
/// im(x) + im(y) together with the compressions of x and y to it. Every
/// pairwise quantity is computed on this <= 4n dimensional subspace.
struct PairFrame {
    CMatrix joint;   // f x d, orthonormal
    CMatrix x_small; // d x d
    CMatrix y_small; // d x d
};

inline PairFrame pair_frame(const LocalOperator& x, const LocalOperator& y) {
    if (x.dim_h() != y.dim_h() || x.spin_dim() != y.spin_dim())
        throw DimensionMismatch("operators live on different spaces");
    const int f = x.dim_h();
    CMatrix stacked(f, x.rank() + y.rank());
    if (x.rank()) stacked.leftCols(x.rank()) = x.basis();
    if (y.rank()) stacked.rightCols(y.rank()) = y.basis();
    PairFrame fr;
    fr.joint = orthonormal_image(stacked);
    fr.x_small = fr.joint.adjoint() * x.apply(fr.joint);
    fr.y_small = fr.joint.adjoint() * y.apply(fr.joint);
    return fr;
}

/// Spectrum of xy computed on the joint image span; the ambient dimension f
/// never enters an eigensolve.
inline ChainSpectrum product_spectrum(const LocalOperator& x, const LocalOperator& y,
                                      double tol_rank = 1e-10) {
    PairFrame fr = pair_frame(x, y);
    std::vector<Complex> ev = eigenvalues_sorted(fr.x_small * fr.y_small);
    ChainSpectrum s;
    s.spin_dim = x.spin_dim();
    double vmax = ev.empty() ? 0.0 : std::abs(ev.front());
    s.scale = vmax;
    for (const Complex& l : ev) {
        if (std::abs(l) > tol_rank * vmax && static_cast<int>(s.values.size()) < 2 * x.spin_dim())
            s.values.push_back(l);
    }
    s.values.resize(2 * x.spin_dim(), Complex(0, 0));
    return s;
}

/// Spectral weight |A| = sum of |lambda_i|.
inline double spectral_weight(const ChainSpectrum& s) {
    double w = 0.0;
    for (const Complex& l : s.values) w += std::abs(l);
    return w;
}

inline double spectral_weight_sq(const ChainSpectrum& s) {
    double w = 0.0;
    for (const Complex& l : s.values) w += std::norm(l);
    return w;
}

/// Causal Lagrangian with boundedness term,
/// L_kappa(x,y) = |(xy)^2| - |xy|^2 / 2n + kappa |xy|^2.
inline double lagrangian(const ChainSpectrum& s, double kappa = 0.0) {
    double sw = spectral_weight(s);
    double sw2 = spectral_weight_sq(s);
    double l = sw2 - sw * sw / (2.0 * s.spin_dim) + kappa * sw * sw;
    if (l < 0 && l >= -1e-12 * s.scale * s.scale) l = 0.0;
    return l;
}

inline double lagrangian(const LocalOperator& x, const LocalOperator& y, double kappa = 0.0,
                         double tol_rank = 1e-10) {
    return lagrangian(product_spectrum(x, y, tol_rank), kappa);
}

enum class CausalTag { Spacelike, Timelike, Lightlike };

struct CausalClass {
    CausalTag tag = CausalTag::Spacelike;
    bool properly_timelike = false;
    bool degenerate = false;
};

inline const char* to_string(CausalTag t) {
    switch (t) {
        case CausalTag::Spacelike: return "spacelike";
        case CausalTag::Timelike: return "timelike";
        default: return "lightlike";
    }
}

/// Classification of a pair by the moduli and reality of the padded product
/// spectrum: equal moduli -> spacelike, real with unequal moduli -> timelike,
/// lightlike is the fall-through. The all-zero spectrum is spacelike with the
/// degenerate flag set.
inline CausalClass classify_spectrum(const ChainSpectrum& s, double tol, double op_scale) {
    CausalClass c;
    if (s.scale <= tol * op_scale || s.values.empty()) {
        c.tag = CausalTag::Spacelike;
        c.degenerate = true;
        return c;
    }
    double amax = 0.0, amin = std::numeric_limits<double>::infinity(), imax = 0.0;
    for (const Complex& l : s.values) {
        amax = std::max(amax, std::abs(l));
        amin = std::min(amin, std::abs(l));
        imax = std::max(imax, std::abs(l.imag()));
    }
    double mod_spread = (amax - amin) / amax;
    double reality_defect = imax / amax;
    if (mod_spread <= tol) c.tag = CausalTag::Spacelike;
    else if (reality_defect <= tol) c.tag = CausalTag::Timelike;
    else c.tag = CausalTag::Lightlike;
    return c;
}

/// Functional distinguishing a time direction,
/// C(x,y) = i Tr(yx pi_y pi_x - xy pi_x pi_y); positive means y lies in the
/// future of x. Evaluated through the image factors, cost O(f k^2).
inline double time_direction(const LocalOperator& x, const LocalOperator& y) {
    if (x.dim_h() != y.dim_h()) throw DimensionMismatch("time_direction");
    if (x.rank() == 0 || y.rank() == 0) return 0.0;
    CMatrix p = x.basis().adjoint() * y.basis(); // kx x ky
    CMatrix lx = x.eigenvalues().cast<Complex>().asDiagonal();
    CMatrix ly = y.eigenvalues().cast<Complex>().asDiagonal();
    // Tr(yx pi_y pi_x) = Tr(Ly P^H Lx P P^H P), Tr(xy pi_x pi_y) = Tr(Lx P Ly P^H P P^H)
    Complex t1 = (ly * p.adjoint() * lx * p * p.adjoint() * p).trace();
    Complex t2 = (lx * p * ly * p.adjoint() * p * p.adjoint()).trace();
    Complex c = kI * (t1 - t2);
    return c.real();
}

/// Operator inequality || sqrt|y| - sqrt|x| || <= ||y-x||^(1/4) ||y+x||^(1/4):
/// returns (lhs, rhs). Matrix absolute values and square roots are taken via
/// the Hermitian eigen-decomposition on the joint image.
inline std::pair<double, double> sqrt_abs_bound(const LocalOperator& x, const LocalOperator& y) {
    if (x.rank() == 0 && y.rank() == 0) return {0.0, 0.0};
    PairFrame fr = pair_frame(x, y);
    CMatrix sx = matrix_sqrt_psd(matrix_abs(fr.x_small));
    CMatrix sy = matrix_sqrt_psd(matrix_abs(fr.y_small));
    double lhs = op_norm_hermitian(sy - sx);
    double nd = op_norm_hermitian(fr.y_small - fr.x_small);
    double ns = op_norm_hermitian(fr.y_small + fr.x_small);
    return {lhs, std::pow(nd, 0.25) * std::pow(ns, 0.25)};
}

} // namespace cfs
