#pragma once

#include <algorithm>
#include <numeric>

#include "cfs/qkernel.hpp"
#include "cfs/rng.hpp"

namespace cfs {

struct IterationRow {
    int iter = 0;
    double action = 0, boundedness = 0, volume = 0, trace = 0;
    bool accepted = true;
    double temperature = 0;
};

using IterationLog = std::vector<IterationRow>;

namespace detail {

/// Euclidean projection onto the simplex {w >= 0, sum w = s}.
inline RVector project_simplex(RVector v, double s) {
    const int n = static_cast<int>(v.size());
    std::vector<double> u(v.data(), v.data() + n);
    std::sort(u.begin(), u.end(), std::greater<double>());
    double css = 0, theta = 0;
    int rho = 0;
    for (int i = 0; i < n; ++i) {
        css += u[i];
        double t = (css - s) / (i + 1);
        if (u[i] - t > 0) {
            rho = i + 1;
            theta = t;
        }
    }
    (void)rho;
    for (int i = 0; i < n; ++i) v(i) = std::max(0.0, v(i) - theta);
    return v;
}

/// Dykstra projection onto {w >= 0} intersected with {1^T w = vol, t^T w = tr}.
inline RVector project_constraints(RVector v, double vol, const RVector* traces,
                                   std::optional<double> trace_target, int iters = 400) {
    const int n = static_cast<int>(v.size());
    if (!trace_target) return project_simplex(std::move(v), vol);
    // affine part: A w = b with rows (1...1) and traces
    RMatrix a(2, n);
    a.row(0).setOnes();
    a.row(1) = traces->transpose();
    Eigen::Vector2d b(vol, *trace_target);
    Eigen::Matrix2d aat = a * a.transpose();
    Eigen::FullPivLU<Eigen::Matrix2d> lu(aat);
    if (!lu.isInvertible()) {
        // traces all equal: the trace row is dependent; feasible only if consistent
        double t0 = (*traces)(0);
        if (std::abs(t0 * vol - *trace_target) > 1e-9 * std::max(1.0, std::abs(*trace_target)))
            throw InfeasibleConstraints("trace constraint inconsistent with volume");
        return project_simplex(std::move(v), vol);
    }
    auto affine = [&](const RVector& w) -> RVector {
        return w - a.transpose() * lu.solve(a * w - b);
    };
    RVector x = v, p = RVector::Zero(n), q = RVector::Zero(n);
    for (int k = 0; k < iters; ++k) {
        RVector y = affine(x + p);
        p = x + p - y;
        x = (y + q).cwiseMax(0.0);
        q = y + q - x;
    }
    double feas = (a * x - b).norm();
    if (feas > 1e-7 * std::max(1.0, b.norm()))
        throw InfeasibleConstraints("no nonnegative weights satisfy the affine constraints");
    return x;
}

} // namespace detail

/// Minimizes S over the weights of a fixed support, subject to the volume,
/// optional trace, and boundedness constraints. Projected gradient descent
/// with Armijo backtracking, started from the most uniform feasible point so
/// that degenerate objectives resolve to the symmetric solution.
inline DiscreteMeasure minimize_weights(const std::vector<LocalOperator>& points,
                                        const SolverConfig& cfg,
                                        IterationLog* log = nullptr) {
    if (points.empty()) throw EmptyMeasure("no support points");
    const int n = static_cast<int>(points.size());
    DiscreteMeasure probe{points, std::vector<double>(n, 1.0)};
    probe.validate();
    PairTables tab = pair_tables(probe);
    RVector traces(n);
    for (int i = 0; i < n; ++i) traces(i) = points[i].trace();

    if (cfg.target_trace) { // exact feasibility test for the affine + cone system
        double lo = traces.minCoeff() * cfg.target_volume;
        double hi = traces.maxCoeff() * cfg.target_volume;
        double c = *cfg.target_trace;
        double span = std::max(1.0, hi - lo);
        if (c < lo - 1e-12 * span || c > hi + 1e-12 * span)
            throw InfeasibleConstraints("target trace outside attainable range");
    }

    RMatrix lmat = tab.lag, tmat = tab.tsq;
    auto objective = [&](const RVector& w, double kappa) {
        double s = w.dot(lmat * w), t = w.dot(tmat * w);
        return s + kappa * std::max(0.0, t - cfg.bound_C);
    };
    auto solve_for = [&](double kappa) {
        RVector w = detail::project_constraints(
            RVector::Constant(n, cfg.target_volume / n), cfg.target_volume, &traces,
            cfg.target_trace);
        double step = cfg.step0 * cfg.target_volume;
        double fw = objective(w, kappa);
        for (int it = 0; it < cfg.max_iters; ++it) {
            RVector grad = 2 * (lmat * w);
            if (kappa > 0 && w.dot(tmat * w) > cfg.bound_C) grad += kappa * 2 * (tmat * w);
            double gn = grad.norm();
            if (gn * step < 1e-16 * std::max(1.0, std::abs(fw))) break;
            bool accepted = false;
            for (int bt = 0; bt < 40; ++bt) {
                RVector cand = detail::project_constraints(w - step * grad, cfg.target_volume,
                                                           &traces, cfg.target_trace);
                double fc = objective(cand, kappa);
                if (fc <= fw - 1e-4 * gn * (w - cand).norm()) {
                    w = cand;
                    fw = fc;
                    accepted = true;
                    break;
                }
                step *= 0.5;
            }
            if (log) {
                double s = w.dot(lmat * w), t = w.dot(tmat * w);
                log->push_back({it, s, t, w.sum(), traces.dot(w), accepted, 0.0});
            }
            if (!accepted) break;
            step *= 1.5;
        }
        return w;
    };

    RVector w = solve_for(0.0);
    if (w.dot(tmat * w) > cfg.bound_C * (1 + cfg.constraint_tol)) {
        // boundedness active: ramp the multiplier until the constraint holds
        double kappa = std::max(cfg.kappa, 1e-6);
        for (int round = 0; round < 60; ++round) {
            w = solve_for(kappa);
            if (w.dot(tmat * w) <= cfg.bound_C * (1 + cfg.constraint_tol)) break;
            kappa *= 4;
        }
        if (w.dot(tmat * w) > cfg.bound_C * (1 + 1e-6))
            throw InfeasibleConstraints("boundedness bound cannot be met on this support");
    }

    DiscreteMeasure out;
    out.points = points;
    out.weights.assign(w.data(), w.data() + n);
    for (double& x : out.weights) x = std::max(x, 1e-300); // clamp roundoff negatives
    return out;
}

/// Support optimization: alternates weight minimization with annealed point
/// moves (random unitary conjugations and eigenvalue nudges). All randomness
/// flows from one seeded generator; the best-so-far measure is returned.
inline DiscreteMeasure minimize_support(const SolverConfig& cfg, const DiscreteMeasure& initial,
                                        IterationLog* log = nullptr) {
    initial.validate();
    ElResidual el0 = el_residual(initial, cfg);
    double mean0 = 0;
    for (double v : el0.scalar_profile) mean0 += v;
    mean0 /= el0.scalar_profile.size();
    if (el0.scalar_spread <= cfg.el_tol * std::abs(mean0)) return initial; // already converged

    Rng rng(cfg.seed, /*stream=*/7);
    const int f = initial.points[0].dim_h();
    const int n_spin = initial.points[0].spin_dim();

    auto reweight = [&](std::vector<LocalOperator> pts) {
        return minimize_weights(pts, cfg);
    };
    DiscreteMeasure cur = reweight(initial.points);
    double fcur = effective_action(cur, cfg);
    DiscreteMeasure best = cur;
    double fbest = fcur;

    double scale0 = std::max(std::abs(fcur), 1e-12);
    double temp = cfg.anneal_t0 * scale0;
    int stagnation = 0, restarts = 0;
    double move_step = cfg.step0;

    auto random_hermitian = [&]() {
        CMatrix h(f, f);
        for (int r = 0; r < f; ++r)
            for (int c = 0; c < f; ++c) h(r, c) = Complex(rng.normal(), rng.normal());
        return hermitian_part(h).eval();
    };

    for (int it = 0; it < cfg.max_iters; ++it) {
        std::vector<LocalOperator> pts = cur.points;
        int which = rng.uniform_int(0, static_cast<int>(pts.size()) - 1);
        if (rng.uniform() < 0.5) {
            // unitary conjugation of a single point
            CMatrix h = random_hermitian();
            double tau = move_step * rng.normal();
            Eigen::SelfAdjointEigenSolver<CMatrix> es(h);
            CVector ph(f);
            for (int i = 0; i < f; ++i) ph(i) = std::exp(kI * (tau * es.eigenvalues()(i)));
            CMatrix u = es.eigenvectors() * ph.asDiagonal() * es.eigenvectors().adjoint();
            const auto& x = pts[which];
            pts[which] = LocalOperator(f, n_spin, u * x.basis(), x.eigenvalues());
        } else {
            // eigenvalue nudge within the admissible signature
            const auto& x = pts[which];
            if (x.rank() == 0) continue;
            RVector lam = x.eigenvalues();
            int k = rng.uniform_int(0, x.rank() - 1);
            double factor = std::exp(move_step * rng.normal());
            lam(k) *= factor; // keeps the sign, hence the signature
            pts[which] = LocalOperator(f, n_spin, x.basis(), lam);
        }
        DiscreteMeasure cand;
        try {
            cand = reweight(pts);
        } catch (const InfeasibleConstraints&) {
            continue;
        }
        double fcand = effective_action(cand, cfg);
        bool accept = fcand <= fcur || rng.uniform() < std::exp(-(fcand - fcur) / temp);
        if (accept) {
            cur = cand;
            fcur = fcand;
            if (fcur < fbest - 1e-15 * scale0) {
                best = cur;
                fbest = fcur;
                stagnation = 0;
            } else {
                ++stagnation;
            }
        } else {
            ++stagnation;
        }
        if (log) {
            ActionReport ar = action_report(cur);
            log->push_back({it, ar.action, ar.boundedness, ar.volume, ar.trace_integral,
                            accept, temp});
        }
        temp *= cfg.anneal_ratio;
        if (stagnation > 60 && restarts < cfg.anneal_restarts) {
            temp = cfg.anneal_t0 * scale0 * std::pow(0.5, restarts + 1);
            cur = best;
            fcur = fbest;
            move_step *= 0.6;
            stagnation = 0;
            ++restarts;
        }
    }
    // final admissibility sweep
    for (const auto& p : best.points) {
        auto [pp, qq] = p.signature();
        if (pp > n_spin || qq > n_spin || p.rank() > 2 * n_spin)
            throw SignatureViolation("solver produced an inadmissible point");
    }
    return best;
}

/// tau-derivative of the surface layer integral for the unitary flow
/// generated by a Hermitian matrix, over the split Omega / complement.
inline double surface_layer_derivative(const DiscreteMeasure& m, const std::vector<int>& omega,
                                       const CMatrix& generator, double kappa = 0.0,
                                       double h = 1e-4) {
    m.validate();
    const int n = m.size();
    std::vector<char> inside(n, 0);
    for (int idx : omega) {
        if (idx < 0 || idx >= n) throw BadIndexSet("omega index out of range");
        if (inside[idx]) throw BadIndexSet("omega index repeated");
        inside[idx] = 1;
    }
    if (omega.empty() || static_cast<int>(omega.size()) == n) return 0.0;

    auto layer_sum = [&](double tau) {
        DiscreteMeasure plus = unitary_pushforward(m, generator, tau);
        DiscreteMeasure minus = unitary_pushforward(m, generator, -tau);
        double acc = 0;
        for (int i = 0; i < n; ++i) {
            if (!inside[i]) continue;
            for (int j = 0; j < n; ++j) {
                if (inside[j]) continue;
                double lp = lagrangian(plus.points[i], m.points[j], kappa);
                double lm = lagrangian(minus.points[i], m.points[j], kappa);
                acc += m.weights[i] * m.weights[j] * (lp - lm);
            }
        }
        return acc;
    };
    return (layer_sum(h) - layer_sum(-h)) / (2 * h);
}

} // namespace cfs
