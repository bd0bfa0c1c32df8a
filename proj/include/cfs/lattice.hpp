#pragma once

#include <array>
#include <map>

#include "cfs/dirac.hpp"
#include "cfs/measure.hpp"
#include "cfs/parallel.hpp"
#include "cfs/sea_kernel.hpp"

namespace cfs {

enum class Regularization { momentum_damping, mollifier, sharp_cutoff };

inline const char* to_string(Regularization r) {
    switch (r) {
        case Regularization::momentum_damping: return "momentum_damping";
        case Regularization::mollifier: return "mollifier";
        default: return "sharp_cutoff";
    }
}

/// Periodic-box configuration: momenta are quantized to (2 pi / L) Z^3 with
/// `modes` values per axis (odd, centered at zero), two spins per momentum.
struct BoxConfig {
    double spatial_size = 7.0;   // L
    int modes = 3;               // per axis, odd
    double mass = 1.0;
    double eps = 0.05;
    Regularization reg = Regularization::momentum_damping;
    int n_t = 8;                 // time slices
    int n_x = 3;                 // spatial lattice sites per axis
    double time_extent = 4.0;
    int max_f = 2 * 11 * 11 * 11;

    int f() const { return 2 * modes * modes * modes; }
    double dt() const { return time_extent / n_t; }
    double dx() const { return spatial_size / n_x; }
    double cell_volume() const { return dt() * dx() * dx() * dx(); }

    void validate() const {
        if (modes < 1 || modes % 2 == 0) throw Error("modes must be odd and positive");
        if (f() > max_f) throw ConfigTooLarge("f = " + std::to_string(f()) + " exceeds cap");
        if (n_x < modes)
            throw Error("n_x must be >= modes so lattice momenta stay distinguishable");
        if (!(mass > 0) || !(eps > 0) || !(spatial_size > 0) || !(time_extent > 0))
            throw Error("mass, eps and box extents must be positive");
        if (n_t < 2) throw Error("need at least two time slices");
    }
};

struct SeaMode {
    Eigen::Vector3d k;
    double omega = 0;
    int spin = 0;
    CVector chi;              // orthonormal 4-spinor
    double reg_factor = 1.0;  // regularization multiplier
};

/// Finite orthonormal family of negative-frequency plane-wave Dirac
/// solutions; exact solutions at every space-time point, normalized so that
/// (u|u) = 2 pi integral u^dag u d^3x = 1 on the box.
struct SeaBasis {
    BoxConfig cfg;
    std::vector<SeaMode> modes;
    double norm_const = 0; // 1/sqrt(2 pi L^3)

    int size() const { return static_cast<int>(modes.size()); }

    /// Regularized wave function of basis vector idx at a space-time point.
    CVector evaluate(int idx, double t, const Eigen::Vector3d& xv) const {
        const SeaMode& md = modes[idx];
        Complex phase = std::exp(kI * (md.omega * t + md.k.dot(xv)));
        return (md.reg_factor * norm_const) * (phase * md.chi);
    }

    /// 4 x f matrix of all regularized wave functions at one point.
    CMatrix evaluation_matrix(double t, const Eigen::Vector3d& xv) const {
        CMatrix e(4, size());
        for (int i = 0; i < size(); ++i) e.col(i) = evaluate(i, t, xv);
        return e;
    }
};

inline SeaBasis build_sea_basis(const BoxConfig& cfg) {
    cfg.validate();
    SeaBasis basis;
    basis.cfg = cfg;
    basis.norm_const = 1.0 / std::sqrt(2.0 * M_PI * std::pow(cfg.spatial_size, 3));
    const int half = (cfg.modes - 1) / 2;
    const double dk = 2.0 * M_PI / cfg.spatial_size;
    for (int a = -half; a <= half; ++a)
        for (int b = -half; b <= half; ++b)
            for (int c = -half; c <= half; ++c) {
                Eigen::Vector3d k(dk * a, dk * b, dk * c);
                CMatrix chi = dirac::negative_energy_spinors(k, cfg.mass);
                for (int s = 0; s < 2; ++s) {
                    SeaMode md;
                    md.k = k;
                    md.omega = std::sqrt(k.squaredNorm() + cfg.mass * cfg.mass);
                    md.spin = s;
                    md.chi = chi.col(s);
                    basis.modes.push_back(std::move(md));
                }
            }
    return basis;
}

namespace detail {

/// Fourier transform of the normalized 1d bump exp(-1/(1-s^2)) on (-1,1),
/// evaluated by Simpson quadrature; even and real with hat(0) = 1.
inline double bump_hat(double q) {
    static const int n = 400;
    auto bump = [](double s) { return std::exp(-1.0 / (1.0 - s * s)); };
    double norm = 0, val = 0;
    for (int i = 0; i <= n; ++i) {
        double s = -1.0 + 2.0 * i / n;
        double w = (i == 0 || i == n) ? 1 : (i % 2 ? 4 : 2);
        if (std::abs(s) >= 1.0) continue;
        double b = bump(s);
        norm += w * b;
        val += w * b * std::cos(q * s);
    }
    return val / norm;
}

} // namespace detail

/// Applies a regularization operator family to the basis. All three kinds
/// act diagonally on the plane-wave modes, so the regularized functions stay
/// exact Dirac solutions:
///  - momentum_damping: factor e^{-eps omega}
///  - mollifier: convolution with the product bump h(x/eps)/eps^4, i.e.
///    multiplication by hat(h)(eps k) in momentum space
///  - sharp_cutoff: modes with |k| > 1/eps dropped
inline SeaBasis regularize(const SeaBasis& basis, const BoxConfig& cfg) {
    if (!(cfg.eps > 0)) throw Error("eps must be positive");
    SeaBasis out = basis;
    out.cfg = cfg;
    for (SeaMode& md : out.modes) {
        switch (cfg.reg) {
            case Regularization::momentum_damping:
                md.reg_factor = std::exp(-cfg.eps * md.omega);
                break;
            case Regularization::mollifier: {
                double fac = detail::bump_hat(cfg.eps * md.omega);
                for (int i = 0; i < 3; ++i) fac *= detail::bump_hat(cfg.eps * md.k(i));
                md.reg_factor = fac;
                break;
            }
            case Regularization::sharp_cutoff:
                md.reg_factor = md.k.norm() > 1.0 / cfg.eps ? 0.0 : 1.0;
                break;
        }
    }
    return out;
}

struct SiteCoord {
    int it = 0, ix = 0, iy = 0, iz = 0;
    double t = 0;
    Eigen::Vector3d x;
};

/// Causal fermion system built from the regularized sea on the box lattice.
/// Evaluation matrices and point operators are computed on demand; the
/// merged measure is materialized by `measure()`.
struct LatticeSystem {
    BoxConfig cfg;
    SeaBasis basis; // regularized
    std::vector<SiteCoord> sites;

    int site_count() const { return static_cast<int>(sites.size()); }

    int site_index(int it, int ix, int iy, int iz) const {
        return ((it * cfg.n_x + ix) * cfg.n_x + iy) * cfg.n_x + iz;
    }

    CMatrix evaluation(int site) const {
        const SiteCoord& s = sites[site];
        return basis.evaluation_matrix(s.t, s.x);
    }

    /// Local correlation operator F(x) = -E(x)^dag gamma^0 E(x).
    LocalOperator local_correlation(int site) const {
        CMatrix e = evaluation(site);
        return make_from_factor(e.adjoint(), -dirac::gamma(0), 2, 1e-12);
    }

    /// Regularized kernel P_eps(x,y) = -E(x) E(y)^dag gamma^0 (4 x 4).
    CMatrix kernel_eps(int sx, int sy) const {
        CMatrix ex = evaluation(sx), ey = evaluation(sy);
        return -(ex * ey.adjoint()) * dirac::gamma(0);
    }

    CMatrix kernel_eps_at(double tx, const Eigen::Vector3d& xx, double ty,
                          const Eigen::Vector3d& xy) const {
        CMatrix ex = basis.evaluation_matrix(tx, xx);
        CMatrix ey = basis.evaluation_matrix(ty, xy);
        return -(ex * ey.adjoint()) * dirac::gamma(0);
    }

    FourVector separation(int sx, int sy) const {
        const SiteCoord& a = sites[sx];
        const SiteCoord& b = sites[sy];
        return {b.t - a.t, b.x(0) - a.x(0), b.x(1) - a.x(1), b.x(2) - a.x(2)};
    }
};

inline LatticeSystem build_lattice(const BoxConfig& cfg) {
    cfg.validate();
    LatticeSystem sys;
    sys.cfg = cfg;
    sys.basis = regularize(build_sea_basis(cfg), cfg);
    sys.sites.reserve(static_cast<std::size_t>(cfg.n_t) * cfg.n_x * cfg.n_x * cfg.n_x);
    const double t0 = -0.5 * cfg.time_extent + 0.5 * cfg.dt();
    for (int it = 0; it < cfg.n_t; ++it)
        for (int ix = 0; ix < cfg.n_x; ++ix)
            for (int iy = 0; iy < cfg.n_x; ++iy)
                for (int iz = 0; iz < cfg.n_x; ++iz) {
                    SiteCoord s;
                    s.it = it;
                    s.ix = ix;
                    s.iy = iy;
                    s.iz = iz;
                    s.t = t0 + it * cfg.dt();
                    s.x = Eigen::Vector3d(ix * cfg.dx(), iy * cfg.dx(), iz * cfg.dx());
                    sys.sites.push_back(s);
                }
    return sys;
}

/// Push-forward measure with equal weights (the cell 4-volume); sites whose
/// local correlation operators coincide within the merge tolerance are
/// identified, realizing the identification of indiscernible points.
/// Returns the measure together with the site -> point index map.
struct LatticeMeasure {
    DiscreteMeasure measure;
    std::vector<int> site_to_point;
};

inline LatticeMeasure build_measure(const LatticeSystem& sys, double merge_tol = 1e-12) {
    const int ns = sys.site_count();
    std::vector<LocalOperator> ops(ns);
    std::vector<CMatrix> evals(ns);
    parallel_for(static_cast<std::size_t>(ns), [&](std::size_t i) {
        evals[i] = sys.evaluation(static_cast<int>(i));
        ops[i] = make_from_factor(evals[i].adjoint(), -dirac::gamma(0), 2, 1e-12);
    });
    // Frobenius distance between F_a and F_b through the 4x4 cross grams:
    // ||F_a - F_b||_F^2 = fnorm(a,a) + fnorm(b,b) - 2 Re tr(g0 G_ab g0 G_ab^H)
    const CMatrix& g0 = dirac::gamma(0);
    std::vector<double> selfsq(ns);
    for (int i = 0; i < ns; ++i) {
        CMatrix gii = evals[i] * evals[i].adjoint();
        selfsq[i] = (g0 * gii * g0 * gii).trace().real();
    }
    LatticeMeasure out;
    out.site_to_point.assign(ns, -1);
    const double w = sys.cfg.cell_volume();
    for (int i = 0; i < ns; ++i) {
        if (out.site_to_point[i] >= 0) continue;
        int id = static_cast<int>(out.measure.points.size());
        out.site_to_point[i] = id;
        out.measure.points.push_back(ops[i]);
        out.measure.weights.push_back(w);
        double scale = std::sqrt(std::max(selfsq[i], 0.0));
        for (int j = i + 1; j < ns; ++j) {
            if (out.site_to_point[j] >= 0) continue;
            CMatrix gij = evals[i] * evals[j].adjoint();
            double cross = (g0 * gij * g0 * gij.adjoint()).trace().real();
            double dist2 = selfsq[i] + selfsq[j] - 2 * cross;
            if (dist2 <= std::pow(merge_tol * std::max(scale, 1e-300), 2)) {
                out.site_to_point[j] = id;
                out.measure.weights[id] += w;
            }
        }
    }
    return out;
}

} // namespace cfs
