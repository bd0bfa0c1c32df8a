#pragma once

#include <functional>
#include <optional>

#include "cfs/errors.hpp"
#include "cfs/linalg.hpp"
#include "cfs/measure.hpp"
#include "cfs/solvers.hpp"

namespace cfs {

/// Causal variational principle in the compact setting: a finite point set
/// with a symmetric nonnegative Lagrangian matrix; minimization runs over
/// normalized weight vectors.
struct CompactSpace {
    std::vector<Eigen::Vector3d> coords; // empty for abstract spaces
    RMatrix lagrangian_matrix;

    int size() const { return static_cast<int>(lagrangian_matrix.rows()); }

    void validate() const {
        const RMatrix& l = lagrangian_matrix;
        if (l.rows() != l.cols() || l.rows() == 0) throw Error("L must be square and nonempty");
        if ((l - l.transpose()).norm() > 1e-12 * std::max(1.0, l.norm()))
            throw Error("L must be symmetric");
        if (l.minCoeff() < 0) throw Error("L must be nonnegative");
        if (!coords.empty() && static_cast<int>(coords.size()) != l.rows())
            throw Error("coords size mismatch");
    }
};

inline double cvp_action(const CompactSpace& space, const RVector& w) {
    space.validate();
    if (w.size() != space.size()) throw DimensionMismatch("weight count");
    if (w.minCoeff() < 0 || std::abs(w.sum() - 1.0) > 1e-10)
        throw NotNormalized("weights must be nonnegative and sum to one");
    return w.dot(space.lagrangian_matrix * w);
}

struct CvpResult {
    RVector weights;
    double action = 0;
    std::vector<int> support;                 // indices with weight > prune threshold
    std::vector<std::vector<int>> timelike;   // support pairs with L > 0 (causal report)
};

/// Simplex-projected gradient descent with support pruning. Deterministic
/// multi-start (uniform plus every vertex); ties resolve to the
/// lexicographically smallest support, then to maximum entropy.
inline CvpResult cvp_minimize(const CompactSpace& space, const SolverConfig& cfg = {}) {
    space.validate();
    const int n = space.size();
    const RMatrix& l = space.lagrangian_matrix;
    double lscale = std::max(l.norm(), 1e-300);

    auto descend = [&](RVector w) {
        double step = cfg.step0 / lscale;
        double fw = w.dot(l * w);
        for (int it = 0; it < cfg.max_iters; ++it) {
            RVector grad = 2 * (l * w);
            RVector cand = detail::project_simplex(w - step * grad, 1.0);
            double fc = cand.dot(l * cand);
            if (fc < fw - 1e-16 * lscale) {
                w = cand;
                fw = fc;
                step *= 1.2;
            } else {
                step *= 0.5;
                if (step * grad.norm() < 1e-15) break;
            }
        }
        return std::make_pair(w, fw);
    };

    std::vector<std::pair<RVector, double>> finals;
    finals.push_back(descend(RVector::Constant(n, 1.0 / n)));
    for (int i = 0; i < n; ++i) {
        RVector v = RVector::Zero(n);
        v(i) = 1.0;
        finals.push_back(descend(v));
    }
    auto support_of = [&](const RVector& w) {
        std::vector<int> s;
        for (int i = 0; i < n; ++i)
            if (w(i) > 1e-12) s.push_back(i);
        return s;
    };
    auto entropy = [&](const RVector& w) {
        double e = 0;
        for (int i = 0; i < n; ++i)
            if (w(i) > 1e-300) e -= w(i) * std::log(w(i));
        return e;
    };
    int bestidx = 0;
    for (int k = 1; k < static_cast<int>(finals.size()); ++k) {
        double fk = finals[k].second, fb = finals[bestidx].second;
        double tol = 1e-11 * std::max(1.0, lscale);
        if (fk < fb - tol) {
            bestidx = k;
        } else if (std::abs(fk - fb) <= tol) {
            auto sk = support_of(finals[k].first), sb = support_of(finals[bestidx].first);
            if (sk < sb ||
                (sk == sb && entropy(finals[k].first) > entropy(finals[bestidx].first) + 1e-12))
                bestidx = k;
        }
    }
    CvpResult res;
    res.weights = finals[bestidx].first;
    for (int i = 0; i < n; ++i)
        if (res.weights(i) <= 1e-12) res.weights(i) = 0;
    res.weights /= res.weights.sum();
    res.action = res.weights.dot(l * res.weights);
    res.support = support_of(res.weights);
    for (int a : res.support) {
        std::vector<int> row;
        for (int b : res.support)
            if (l(a, b) > 0) row.push_back(b);
        res.timelike.push_back(row);
    }
    return res;
}

/// Inner variational principle data: region, external potential, Lagrange
/// parameter s, and the initial-condition measure rho0.
struct InnerProblem {
    std::vector<int> inner_region;
    RVector phi;  // on the inner region
    double s = 1.0;
    RVector rho0; // componentwise lower bound on the minimizer
};

inline double inner_action(const InnerProblem& p, const CompactSpace& space, const RVector& w) {
    space.validate();
    const int k = static_cast<int>(p.inner_region.size());
    if (w.size() != k || p.phi.size() != k) throw DimensionMismatch("inner sizes");
    for (int idx : p.inner_region)
        if (idx < 0 || idx >= space.size()) throw IndexOutOfRegion("inner index out of space");
    if (p.phi.minCoeff() < 0) throw Error("phi must be nonnegative");
    double quad = 0;
    for (int a = 0; a < k; ++a)
        for (int b = 0; b < k; ++b)
            quad += w(a) * w(b) * space.lagrangian_matrix(p.inner_region[a], p.inner_region[b]);
    double lin = 0;
    for (int a = 0; a < k; ++a) lin += w(a) * (p.phi(a) - p.s);
    return quad + 2 * lin;
}

struct InnerResult {
    RVector weights;
    RVector phi;          // selected potential
    double phi_max = 0;
    double action = 0;
    bool initial_data_met = false;
};

namespace detail {

inline RVector inner_descend(const RMatrix& l, const RVector& phi, double s, int iters) {
    const int k = static_cast<int>(phi.size());
    RVector w = RVector::Constant(k, std::max(s, 1e-3));
    double lscale = std::max(l.norm(), 1e-12);
    double step = 0.5 / lscale;
    auto f = [&](const RVector& v) { return v.dot(l * v) + 2 * v.dot(phi - RVector::Constant(k, s)); };
    double fw = f(w);
    for (int it = 0; it < iters; ++it) {
        RVector grad = 2 * (l * w + phi - RVector::Constant(k, s));
        RVector cand = (w - step * grad).cwiseMax(0.0);
        double fc = f(cand);
        if (fc < fw - 1e-16) {
            w = cand;
            fw = fc;
            step *= 1.2;
        } else {
            step *= 0.5;
            if (step * grad.norm() < 1e-15) break;
        }
    }
    return w;
}

} // namespace detail

/// Minimizes the inner action over the nonnegative cone, then searches a
/// declared parametric family of potentials (constants, plus radial bumps
/// when coordinates exist) for the smallest sup-norm phi whose minimizer
/// dominates rho0.
inline InnerResult inner_minimize(const InnerProblem& p, const CompactSpace& space,
                                  const SolverConfig& cfg = {}) {
    space.validate();
    const int k = static_cast<int>(p.inner_region.size());
    if (p.rho0.size() != k) throw DimensionMismatch("rho0 size");
    RMatrix l(k, k);
    for (int a = 0; a < k; ++a)
        for (int b = 0; b < k; ++b)
            l(a, b) = space.lagrangian_matrix(p.inner_region[a], p.inner_region[b]);

    const bool vacuous = p.rho0.maxCoeff() <= 0;
    std::vector<RVector> candidates;
    candidates.push_back(RVector::Zero(k)); // phi = 0 first: preferred when feasible
    if (!vacuous) {
        for (int ic = 1; ic <= 8; ++ic)
            candidates.push_back(RVector::Constant(k, p.s * ic / 8.0));
        if (!space.coords.empty()) {
            for (int center = 0; center < k; ++center)
                for (int ia = 1; ia <= 4; ++ia) {
                    RVector bump(k);
                    const Eigen::Vector3d& c0 = space.coords[p.inner_region[center]];
                    for (int a = 0; a < k; ++a) {
                        double d = (space.coords[p.inner_region[a]] - c0).norm();
                        bump(a) = std::exp(-2.0 * d * d);
                    }
                    candidates.push_back((p.s * ia / 4.0) * bump);
                }
        }
    }
    std::optional<InnerResult> best;
    for (const RVector& phi : candidates) {
        RVector w = detail::inner_descend(l, phi, p.s, cfg.max_iters);
        bool ok = true;
        for (int a = 0; a < k; ++a)
            if (w(a) < p.rho0(a) - 1e-9 * std::max(1.0, p.rho0(a))) ok = false;
        if (!ok) continue;
        double pm = phi.size() ? phi.maxCoeff() : 0.0;
        if (!best || pm < best->phi_max - 1e-15) {
            InnerResult r;
            r.weights = w;
            r.phi = phi;
            r.phi_max = pm;
            InnerProblem q = p;
            q.phi = phi;
            r.action = inner_action(q, space, w);
            r.initial_data_met = true;
            best = r;
        }
    }
    if (!best) throw InfeasibleInitialData("no potential in the family meets rho >= rho0");
    return *best;
}

/// Symmetric sphere discretizations carrying exact discrete rotations.
inline CompactSpace octahedron_space(const std::function<double(double)>& g) {
    CompactSpace s;
    s.coords = {{1, 0, 0}, {-1, 0, 0}, {0, 1, 0}, {0, -1, 0}, {0, 0, 1}, {0, 0, -1}};
    const int n = static_cast<int>(s.coords.size());
    s.lagrangian_matrix.resize(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            s.lagrangian_matrix(i, j) = g(s.coords[i].dot(s.coords[j]));
    return s;
}

inline CompactSpace icosahedron_space(const std::function<double(double)>& g) {
    CompactSpace s;
    const double ph = 0.5 * (1.0 + std::sqrt(5.0));
    std::vector<Eigen::Vector3d> v = {{0, 1, ph},  {0, -1, ph},  {0, 1, -ph}, {0, -1, -ph},
                                      {1, ph, 0},  {-1, ph, 0},  {1, -ph, 0}, {-1, -ph, 0},
                                      {ph, 0, 1},  {-ph, 0, 1},  {ph, 0, -1}, {-ph, 0, -1}};
    for (auto& x : v) s.coords.push_back(x.normalized());
    const int n = static_cast<int>(s.coords.size());
    s.lagrangian_matrix.resize(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            s.lagrangian_matrix(i, j) = g(s.coords[i].dot(s.coords[j]));
    return s;
}

/// Surface-layer conservation residual of the rotation flow on a sphere
/// problem: minimizes, verifies scalar-EL convergence, then evaluates the
/// tau-derivative of the layer sum over polar caps for rotations about the
/// coordinate axes. Returns the largest |derivative|.
inline double symmetry_conservation(const CompactSpace& space,
                                    const std::function<double(double)>& g,
                                    const SolverConfig& cfg = {}, double h = 1e-6) {
    if (space.coords.empty()) throw Error("symmetry_conservation needs sphere coordinates");
    CvpResult min = cvp_minimize(space, cfg);
    // scalar EL convergence gate
    RVector lw = space.lagrangian_matrix * min.weights;
    double smin = std::numeric_limits<double>::infinity(), smax = 0, mean = 0;
    for (int i : min.support) {
        smin = std::min(smin, 2 * lw(i));
        smax = std::max(smax, 2 * lw(i));
        mean += 2 * lw(i);
    }
    mean /= std::max<std::size_t>(1, min.support.size());
    if (smax - smin > 100 * cfg.el_tol * std::abs(mean))
        throw NotConverged("scalar EL spread too large for the conservation contract");

    auto rot = [](int axis, double tau, const Eigen::Vector3d& x) {
        Eigen::Vector3d out = x;
        int a = (axis + 1) % 3, b = (axis + 2) % 3;
        double c = std::cos(tau), s = std::sin(tau);
        out(a) = c * x(a) - s * x(b);
        out(b) = s * x(a) + c * x(b);
        return out;
    };
    double worst = 0;
    const int n = space.size();
    for (int axis = 0; axis < 3; ++axis) {
        for (double zcut : {-0.5, 0.0, 0.5}) {
            std::vector<int> omega;
            for (int i = 0; i < n; ++i)
                if (space.coords[i](2) > zcut) omega.push_back(i);
            if (omega.empty() || static_cast<int>(omega.size()) == n) continue;
            std::vector<char> in(n, 0);
            for (int i : omega) in[i] = 1;
            auto d_tau = [&](double tau) {
                double acc = 0;
                for (int i = 0; i < n; ++i) {
                    if (!in[i] || min.weights(i) == 0) continue;
                    for (int j = 0; j < n; ++j) {
                        if (in[j] || min.weights(j) == 0) continue;
                        double lp = g(rot(axis, tau, space.coords[i]).dot(space.coords[j]));
                        double lm = g(rot(axis, -tau, space.coords[i]).dot(space.coords[j]));
                        acc += min.weights(i) * min.weights(j) * (lp - lm);
                    }
                }
                return acc;
            };
            double deriv = (d_tau(h) - d_tau(-h)) / (2 * h);
            worst = std::max(worst, std::abs(deriv));
        }
    }
    return worst;
}

} // namespace cfs
