#pragma once

#include "cfs/measure.hpp"

namespace cfs {

namespace detail {

/// L_kappa as a function of the kernel matrix alone, with the reverse kernel
/// co-varied as the spin adjoint: A = P (G_y^-1 P^H G_x), eigenvalues padded
/// to 2n.
inline double lagrangian_of_kernel(const CMatrix& p, const CMatrix& gx, const CMatrix& gy,
                                   int spin_dim, double kappa) {
    CMatrix padj = p.adjoint() * gx;
    for (int r = 0; r < padj.rows(); ++r) padj.row(r) /= gy(r, r);
    std::vector<Complex> ev = eigenvalues_sorted(p * padj);
    ChainSpectrum s;
    s.spin_dim = spin_dim;
    s.scale = ev.empty() ? 0.0 : std::abs(ev.front());
    for (const Complex& l : ev)
        if (static_cast<int>(s.values.size()) < 2 * spin_dim) s.values.push_back(l);
    s.values.resize(2 * spin_dim, Complex(0, 0));
    return lagrangian(s, kappa);
}

} // namespace detail

struct QKernelResult {
    CMatrix q;                    // Q(x_j, x_i) : S_i -> S_j
    bool nondifferentiable = false;
    double symmetry_defect = 0;   // || Q(x,y)^* - Q(y,x) || / scale
};

/// First-variation kernel Q of the Lagrangian, recovered entrywise from
/// central finite differences of L_kappa under complex perturbations of
/// P(x_i, x_j). Richardson refinement halves the step once; second-order
/// one-sided differences flag kinks of the |lambda| terms.
inline QKernelResult q_kernel(const DiscreteMeasure& m, int i, int j, double kappa = 0.0,
                              double h_rel = 1e-5) {
    m.validate();
    if (!m.points.at(i).regular() || !m.points.at(j).regular())
        throw SingularPoint("q_kernel requires regular points");
    SpinSpace si = spin_space(m.points[i]);
    SpinSpace sj = spin_space(m.points[j]);
    KernelMatrix kij = kernel(si, sj);
    const CMatrix p0 = kij.entries; // k_i x k_j
    const int ki = static_cast<int>(p0.rows()), kj = static_cast<int>(p0.cols());
    double scale = std::max(p0.norm(), 1e-300);
    double h = h_rel * scale;

    auto lval = [&](const CMatrix& p) {
        return detail::lagrangian_of_kernel(p, si.gram, sj.gram, m.points[i].spin_dim(), kappa);
    };
    const double l0 = lval(p0);

    QKernelResult out;
    out.q = CMatrix::Zero(kj, ki);
    auto deriv = [&](int a, int b, Complex dir) {
        CMatrix e = CMatrix::Zero(ki, kj);
        e(a, b) = dir;
        auto central = [&](double step) {
            return (lval(p0 + step * e) - lval(p0 - step * e)) / (2 * step);
        };
        double d_h = central(h), d_h2 = central(h / 2);
        double d = (4 * d_h2 - d_h) / 3; // Richardson
        // kink probe: second-order one-sided estimates from either side
        double fwd = (-3 * l0 + 4 * lval(p0 + h * e) - lval(p0 + 2 * h * e)) / (2 * h);
        double bwd = (3 * l0 - 4 * lval(p0 - h * e) + lval(p0 - 2 * h * e)) / (2 * h);
        double mismatch_scale = std::max(std::abs(d), l0 / h) + 1e-300;
        if (std::abs(fwd - bwd) > 100 * h_rel * h_rel * mismatch_scale)
            out.nondifferentiable = true;
        return d;
    };
    for (int a = 0; a < ki; ++a)
        for (int b = 0; b < kj; ++b) {
            double d_re = deriv(a, b, Complex(1, 0));
            double d_im = deriv(a, b, Complex(0, 1));
            out.q(b, a) = 0.5 * Complex(d_re, -d_im);
        }

    // symmetry check against the independently recovered reverse kernel
    KernelMatrix kji = kernel(sj, si);
    const CMatrix q0 = kji.entries;
    CMatrix qrev = CMatrix::Zero(ki, kj);
    auto lval_rev = [&](const CMatrix& p) {
        return detail::lagrangian_of_kernel(p, sj.gram, si.gram, m.points[i].spin_dim(), kappa);
    };
    for (int a = 0; a < kj; ++a)
        for (int b = 0; b < ki; ++b) {
            CMatrix e = CMatrix::Zero(kj, ki);
            auto central = [&](Complex dir, double step) {
                CMatrix ee = e;
                ee(a, b) = dir;
                return (lval_rev(q0 + step * ee) - lval_rev(q0 - step * ee)) / (2 * step);
            };
            double d_re = (4 * central(Complex(1, 0), h / 2) - central(Complex(1, 0), h)) / 3;
            double d_im = (4 * central(Complex(0, 1), h / 2) - central(Complex(0, 1), h)) / 3;
            qrev(b, a) = 0.5 * Complex(d_re, -d_im);
        }
    // Q(x_j,x_i)^* = G_i^{-1} Q^H G_j should equal Q(x_i,x_j) (= qrev)
    CMatrix qadj = out.q.adjoint() * sj.gram;
    for (int r = 0; r < qadj.rows(); ++r) qadj.row(r) /= si.gram(r, r);
    double qscale = std::max({out.q.norm(), qrev.norm(), 1e-300});
    out.symmetry_defect = (qadj - qrev).norm() / qscale;
    return out;
}

struct ElResidual {
    std::vector<double> scalar_profile; // l(x_i) = 2 sum_j w_j L_kappa + lambda tr(x_i)
    double scalar_spread = 0;           // max - min of the profile
    double q_residual = 0;              // EL defect of the Q equation
    double lambda_used = 0;
};

/// Euler-Lagrange diagnostics: the scalar equation profile and the Q-kernel
/// equation residual over a spanning family of physical wave functions. When
/// cfg.lambda is unset it is fitted by least squares.
inline ElResidual el_residual(const DiscreteMeasure& m, const SolverConfig& cfg) {
    m.validate();
    const int n = m.size();
    ElResidual r;
    PairTables t = pair_tables(m);
    double lambda = cfg.lambda.value_or(0.0);
    auto fill_profile = [&]() {
        r.scalar_profile.resize(n);
        for (int i = 0; i < n; ++i) {
            double acc = 0;
            for (int j = 0; j < n; ++j)
                acc += m.weights[j] * (t.lag(i, j) + cfg.kappa * t.tsq(i, j));
            r.scalar_profile[i] = 2 * acc + lambda * m.points[i].trace();
        }
        auto [mn, mx] = std::minmax_element(r.scalar_profile.begin(), r.scalar_profile.end());
        r.scalar_spread = *mx - *mn;
    };
    fill_profile();
    r.lambda_used = lambda;

    // Q-kernel residual: sum_j w_j Q(x_i,x_j) psi^u(x_j) = (lambda/2) psi^u(x_i)
    for (const auto& p : m.points)
        if (!p.regular()) return r; // q-part only defined for regular support

    std::vector<SpinSpace> spins;
    for (const auto& p : m.points) spins.push_back(spin_space(p));
    const int f = m.points[0].dim_h();
    CMatrix stacked(f, 0);
    for (const auto& s : spins) {
        CMatrix tmp(f, stacked.cols() + s.basis.cols());
        tmp << stacked, s.basis;
        stacked = tmp;
    }
    CMatrix family = orthonormal_image(stacked); // spanning set of H-vectors

    // Q(x_i, x_j) for all pairs
    std::vector<std::vector<CMatrix>> q(n, std::vector<CMatrix>(n));
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            q[i][j] = q_kernel(m, j, i, cfg.kappa).q; // returns Q(x_i, x_j)

    const int nu = static_cast<int>(family.cols());
    std::vector<std::vector<CVector>> lhs(n);
    std::vector<std::vector<CVector>> rhs(n);
    for (int i = 0; i < n; ++i) {
        lhs[i].resize(nu);
        rhs[i].resize(nu);
        for (int c = 0; c < nu; ++c) {
            CVector acc = CVector::Zero(spins[i].dim());
            for (int j = 0; j < n; ++j)
                acc += m.weights[j] * (q[i][j] * (spins[j].basis.adjoint() * family.col(c)));
            lhs[i][c] = acc;
            rhs[i][c] = spins[i].basis.adjoint() * family.col(c);
        }
    }
    if (!cfg.lambda) { // least-squares fit of lambda/2
        Complex num = 0;
        double den = 0;
        for (int i = 0; i < n; ++i)
            for (int c = 0; c < nu; ++c) {
                num += rhs[i][c].dot(lhs[i][c]);
                den += rhs[i][c].squaredNorm();
            }
        lambda = den > 0 ? 2 * (num / den).real() : 0.0;
        r.lambda_used = lambda;
        fill_profile();
    }
    for (int i = 0; i < n; ++i)
        for (int c = 0; c < nu; ++c)
            r.q_residual = std::max(r.q_residual, (lhs[i][c] - 0.5 * lambda * rhs[i][c]).norm());
    return r;
}

} // namespace cfs
