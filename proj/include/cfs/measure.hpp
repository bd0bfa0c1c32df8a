#pragma once

#include <optional>
#include <vector>

#include "cfs/operators.hpp"
#include "cfs/parallel.hpp"
#include "cfs/spin.hpp"

namespace cfs {

/// Finitely supported universal measure: weighted family of point operators.
struct DiscreteMeasure {
    std::vector<LocalOperator> points;
    std::vector<double> weights;

    int size() const { return static_cast<int>(points.size()); }

    void validate() const {
        if (points.size() != weights.size()) throw Error("points/weights size mismatch");
        if (points.empty()) throw EmptyMeasure("measure has no points");
        for (double w : weights)
            if (!(w > 0)) throw Error("weights must be positive");
        for (const auto& p : points)
            if (p.dim_h() != points[0].dim_h() || p.spin_dim() != points[0].spin_dim())
                throw DimensionMismatch("all points must share dim_h and spin_dim");
    }

    double volume() const {
        double v = 0;
        for (double w : weights) v += w;
        return v;
    }
    double trace_integral() const {
        double t = 0;
        for (int i = 0; i < size(); ++i) t += weights[i] * points[i].trace();
        return t;
    }
};

struct ActionReport {
    double action = 0;         // S
    double boundedness = 0;    // T
    double volume = 0;
    double trace_integral = 0;
};

/// Pairwise Lagrangian and |xy|^2 tables; the building block of every action
/// evaluation. Entries are filled in parallel and summed in index order so
/// results are stable for any worker count.
struct PairTables {
    RMatrix lag;  // L(x_i, x_j), kappa = 0
    RMatrix tsq;  // |x_i x_j|^2
};

inline PairTables pair_tables(const DiscreteMeasure& m) {
    const int n = m.size();
    PairTables t;
    t.lag.resize(n, n);
    t.tsq.resize(n, n);
    parallel_for(static_cast<std::size_t>(n) * n, [&](std::size_t idx) {
        int i = static_cast<int>(idx / n), j = static_cast<int>(idx % n);
        if (j < i) return; // symmetric
        ChainSpectrum s = product_spectrum(m.points[i], m.points[j]);
        double sw = spectral_weight(s);
        t.lag(i, j) = lagrangian(s, 0.0);
        t.tsq(i, j) = sw * sw;
        t.lag(j, i) = t.lag(i, j);
        t.tsq(j, i) = t.tsq(i, j);
    });
    return t;
}

/// Action, boundedness, volume and trace integrals of a measure. The double
/// sums include the diagonal terms; S is reported without the kappa term.
inline ActionReport action_report(const DiscreteMeasure& m) {
    m.validate();
    PairTables t = pair_tables(m);
    ActionReport r;
    const int n = m.size();
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            double ww = m.weights[i] * m.weights[j];
            r.action += ww * t.lag(i, j);
            r.boundedness += ww * t.tsq(i, j);
        }
    r.volume = m.volume();
    r.trace_integral = m.trace_integral();
    return r;
}

struct SolverConfig {
    double kappa = 0.0;
    std::optional<double> lambda;      // trace multiplier; fitted when unset
    double target_volume = 1.0;
    std::optional<double> target_trace;
    double bound_C = 1e12;
    int max_iters = 2000;
    std::uint64_t seed = 0;
    double step0 = 0.1;                // initial gradient / move step
    double anneal_t0 = 1.0;            // initial annealing temperature (x action scale)
    double anneal_ratio = 0.97;
    int anneal_restarts = 3;
    double el_tol = 1e-6;              // scalar EL spread tolerance (relative)
    double constraint_tol = 1e-9;
};

/// Effective action S_kappa,lambda = S + kappa (T - C) - lambda (trace - c);
/// the inequality multiplier kappa is dropped whenever T < C.
inline double effective_action(const DiscreteMeasure& m, const SolverConfig& cfg) {
    ActionReport r = action_report(m);
    double kappa = (r.boundedness < cfg.bound_C) ? 0.0 : cfg.kappa;
    double lambda = cfg.lambda.value_or(0.0);
    double c = cfg.target_trace.value_or(r.trace_integral);
    return r.action + kappa * (r.boundedness - cfg.bound_C) - lambda * (r.trace_integral - c);
}

/// Push-forward of the measure along x -> U x U^-1 with U = exp(i tau A).
inline DiscreteMeasure unitary_pushforward(const DiscreteMeasure& m, const CMatrix& generator,
                                           double tau) {
    if (generator.rows() != m.points.at(0).dim_h())
        throw DimensionMismatch("generator dimension");
    if ((generator - generator.adjoint()).norm() > 1e-10 * std::max(1.0, generator.norm()))
        throw NotHermitian("generator must be Hermitian");
    Eigen::SelfAdjointEigenSolver<CMatrix> es(hermitian_part(generator));
    CVector phase(es.eigenvalues().size());
    for (int i = 0; i < phase.size(); ++i)
        phase(i) = std::exp(kI * (tau * es.eigenvalues()(i)));
    CMatrix u = es.eigenvectors() * phase.asDiagonal() * es.eigenvectors().adjoint();
    DiscreteMeasure out;
    out.weights = m.weights;
    out.points.reserve(m.points.size());
    for (const auto& x : m.points)
        out.points.emplace_back(x.dim_h(), x.spin_dim(), u * x.basis(), x.eigenvalues());
    return out;
}

struct MixReport {
    DiscreteMeasure mixed;   // (1/L) sum_a V_a rho
    double base_term = 0;    // S(rho) / L
    RMatrix cross;           // cross(a,b) for a != b, diagonal zero
    double decomposed = 0;   // base_term + sum cross / L^2
};

/// Convex mixing of unitarily transformed copies of a measure. The action of
/// the mixture decomposes into the base term S/L plus cross terms evaluated
/// through the cross-kernels P_ab(x,y) = Psi(x) V_a V_b^* Psi(y)^*.
inline MixReport convex_mix(const DiscreteMeasure& m, const std::vector<CMatrix>& generators) {
    m.validate();
    const int big_l = static_cast<int>(generators.size());
    if (big_l < 2) throw Error("convex_mix needs at least two transformations");
    const int f = m.points[0].dim_h();
    const int n2 = 2 * m.points[0].spin_dim();
    std::vector<CMatrix> v(big_l);
    for (int a = 0; a < big_l; ++a) {
        if (generators[a].rows() != f || generators[a].cols() != f)
            throw DimensionMismatch("generator shape");
        Eigen::SelfAdjointEigenSolver<CMatrix> es(hermitian_part(generators[a]));
        CVector phase(es.eigenvalues().size());
        for (int i = 0; i < phase.size(); ++i) phase(i) = std::exp(kI * es.eigenvalues()(i));
        v[a] = es.eigenvectors() * phase.asDiagonal() * es.eigenvectors().adjoint();
    }

    MixReport rep;
    const int n = m.size();
    // mixed measure: points V_a^* x V_a with weights w/L
    for (int a = 0; a < big_l; ++a)
        for (int i = 0; i < n; ++i) {
            const auto& x = m.points[i];
            rep.mixed.points.emplace_back(x.dim_h(), x.spin_dim(),
                                          v[a].adjoint() * x.basis(), x.eigenvalues());
            rep.mixed.weights.push_back(m.weights[i] / big_l);
        }

    rep.base_term = action_report(m).action / big_l;
    rep.cross = RMatrix::Zero(big_l, big_l);

    std::vector<SpinSpace> spins;
    spins.reserve(n);
    for (const auto& x : m.points) spins.push_back(spin_space(x));

    for (int a = 0; a < big_l; ++a)
        for (int b = 0; b < big_l; ++b) {
            if (a == b) continue;
            CMatrix w = v[a] * v[b].adjoint();
            double acc = parallel_sum<double>(static_cast<std::size_t>(n) * n, [&](std::size_t idx) {
                int i = static_cast<int>(idx / n), j = static_cast<int>(idx % n);
                const SpinSpace& sx = spins[i];
                const SpinSpace& sy = spins[j];
                // P_ab(x_i, x_j) = -B_x^H W B_y Lambda_y  (in the spin bases)
                CMatrix pab = -(sx.basis.adjoint() * (w * sy.basis)) *
                              sy.point->eigenvalues().cast<Complex>().asDiagonal();
                // spin adjoint G_y^{-1} P^H G_x
                CMatrix padj = pab.adjoint() * sx.gram;
                for (int r = 0; r < padj.rows(); ++r) padj.row(r) /= sy.gram(r, r);
                std::vector<Complex> ev = eigenvalues_sorted(pab * padj);
                ChainSpectrum s;
                s.spin_dim = m.points[i].spin_dim();
                s.scale = ev.empty() ? 0.0 : std::abs(ev.front());
                for (const Complex& l : ev)
                    if (static_cast<int>(s.values.size()) < n2) s.values.push_back(l);
                s.values.resize(n2, Complex(0, 0));
                return m.weights[i] * m.weights[j] * lagrangian(s, 0.0);
            });
            rep.cross(a, b) = acc;
        }
    rep.decomposed = rep.base_term + rep.cross.sum() / (static_cast<double>(big_l) * big_l);
    return rep;
}

} // namespace cfs
