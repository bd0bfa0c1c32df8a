#pragma once

#include "cfs/lattice.hpp"
#include "cfs/rng.hpp"
#include "cfs/spin.hpp"

namespace cfs {

/// Wave-function identities at sampled sites: the factorization of the point
/// operators and kernels through the wave evaluation operator, the
/// evaluation-map correspondence, and the Hoelder continuity bound across
/// nearest-neighbor site pairs.
struct WaveIdentityReport {
    double max_point_defect = 0;   // F(x) = -Psi(x)^* Psi(x)
    double max_kernel_defect = 0;  // P(x,y) = -Psi(x) Psi(y)^*
    double max_eval_defect = 0;    // e_x psi^u(x) = (R_eps u)(x)
    double max_hoelder_excess = 0; // violation of the continuity bound
    int samples = 0;
};

inline WaveIdentityReport wave_identities(const LatticeSystem& sys, int n_samples = 100,
                                          std::uint64_t seed = 1) {
    WaveIdentityReport rep;
    Rng rng(seed, 21);
    const int ns = sys.site_count();
    const int f = sys.cfg.f();
    auto random_unit = [&](int dim) {
        CVector v(dim);
        for (int i = 0; i < dim; ++i) v(i) = Complex(rng.normal(), rng.normal());
        return (v / v.norm()).eval();
    };
    for (int s = 0; s < n_samples; ++s) {
        int a = rng.uniform_int(0, ns - 1);
        int b = rng.uniform_int(0, ns - 1);
        LocalOperator fa = sys.local_correlation(a);
        LocalOperator fb = sys.local_correlation(b);
        CVector u = random_unit(f);

        // F(x) u = -Psi(x)^* Psi(x) u, with Psi(x)^* = -x|_{S_x}
        CVector lhs = fa.apply(u);
        CVector psi_u = fa.basis().adjoint() * u;
        CVector rhs = fa.apply(fa.basis() * psi_u);
        rep.max_point_defect = std::max(
            rep.max_point_defect, (lhs - rhs).norm() / std::max(lhs.norm(), 1e-300));

        // P(x,y) = -Psi(x) Psi(y)^* against the projector-route kernel
        SpinSpace sa = spin_space(fa), sb = spin_space(fb);
        CMatrix route1 = kernel(sa, sb).entries;
        CMatrix route2 = fa.basis().adjoint() * (fb.apply(fb.basis()));
        rep.max_kernel_defect =
            std::max(rep.max_kernel_defect,
                     (route1 - route2).norm() / std::max(route1.norm(), 1e-300));

        // e_x |_{S_x} psi^u(x) = (R_eps u)(x) for regular sites
        if (fa.regular()) {
            CMatrix e = sys.evaluation(a);
            CVector via_spin = e * (fa.basis() * psi_u);
            CVector direct = e * u;
            rep.max_eval_defect = std::max(
                rep.max_eval_defect, (via_spin - direct).norm() / std::max(direct.norm(), 1e-300));
        }
        ++rep.samples;
    }
    // Hoelder bound on nearest-neighbor pairs along the time axis and one
    // spatial axis through a fixed bulk site
    const auto bound_check = [&](int sa_idx, int sb_idx) {
        LocalOperator fx = sys.local_correlation(sa_idx);
        LocalOperator fy = sys.local_correlation(sb_idx);
        CVector u = random_unit(f);
        PairFrame fr = pair_frame(fx, fy);
        CMatrix sqx = matrix_sqrt_psd(matrix_abs(fr.x_small));
        CMatrix sqy = matrix_sqrt_psd(matrix_abs(fr.y_small));
        CVector ux = fr.joint.adjoint() * (fx.basis() * (fx.basis().adjoint() * u));
        CVector uy = fr.joint.adjoint() * (fy.basis() * (fy.basis().adjoint() * u));
        double lhs = (sqy * uy - sqx * ux).norm();
        double rhs = std::pow(op_norm_hermitian(fr.y_small - fr.x_small), 0.25) *
                     std::pow(op_norm_hermitian(fr.y_small + fr.x_small), 0.25) * u.norm();
        rep.max_hoelder_excess = std::max(rep.max_hoelder_excess, lhs - rhs);
    };
    for (int it = 0; it + 1 < sys.cfg.n_t; ++it)
        bound_check(sys.site_index(it, 0, 0, 0), sys.site_index(it + 1, 0, 0, 0));
    for (int ix = 0; ix + 1 < sys.cfg.n_x; ++ix)
        bound_check(sys.site_index(0, ix, 0, 0), sys.site_index(0, ix + 1, 0, 0));
    return rep;
}

/// A lattice wave function: one spin-coordinate vector per point of the
/// measure, expressed in each point's spin basis.
using LatticeWave = std::vector<CVector>;

struct KreinReport {
    CMatrix inner;          // <psi_a | psi_b>
    CMatrix norm_gram;      // <<psi_a | psi_b>>
    CMatrix neg_p_gram;     // <psi_a | (-P) psi_b>
    double neg_p_min_eig = 0;
    double witness_defect = 0;  // |Q(a,b) - <phi_a|phi_b>| / scale
    double symmetry_defect = 0; // <P psi|phi> vs <psi|P phi>
};

/// Krein-space structure of the fermionic projector over a finite family of
/// wave functions: the indefinite inner product, the topology-defining
/// scalar product, and the positivity of (-P).
inline KreinReport krein_gram(const DiscreteMeasure& m, const std::vector<LatticeWave>& family) {
    m.validate();
    const int n = m.size();
    const int nf = static_cast<int>(family.size());
    std::vector<SpinSpace> spins;
    for (const auto& p : m.points) spins.push_back(spin_space(p));

    KreinReport rep;
    rep.inner = CMatrix::Zero(nf, nf);
    rep.norm_gram = CMatrix::Zero(nf, nf);
    rep.neg_p_gram = CMatrix::Zero(nf, nf);

    const int f = m.points[0].dim_h();
    // accumulated H-vectors phi_b = sum_x w(x) x psi_b(x); these certify the
    // positivity of (-P) via <psi|(-P)psi> = <phi|phi>
    std::vector<CVector> phi(nf, CVector::Zero(f));
    for (int b = 0; b < nf; ++b)
        for (int x = 0; x < n; ++x)
            phi[b] += m.weights[x] *
                      (m.points[x].basis() *
                       (m.points[x].eigenvalues().cast<Complex>().asDiagonal() * family[b][x]));

    for (int a = 0; a < nf; ++a)
        for (int b = 0; b < nf; ++b) {
            Complex inner = 0, norm = 0;
            for (int x = 0; x < n; ++x) {
                const CVector& ca = family[a][x];
                const CVector& cb = family[b][x];
                inner += m.weights[x] * (ca.adjoint() * spins[x].gram * cb)(0);
                norm += m.weights[x] *
                        (ca.adjoint() *
                         m.points[x].eigenvalues().cwiseAbs().cast<Complex>().asDiagonal() * cb)(0);
            }
            rep.inner(a, b) = inner;
            rep.norm_gram(a, b) = norm;
            // (P psi_b)(x) = sum_y w_y P(x,y) psi_b(y) = B_x^H phi_b, so
            // <psi_a | (-P) psi_b> = - sum_x w_x <psi_a(x) | B_x^H phi_b>_x
            Complex acc = 0;
            for (int x = 0; x < n; ++x) {
                CVector p_at_x = spins[x].basis.adjoint() * phi[b];
                acc += m.weights[x] * (family[a][x].adjoint() * spins[x].gram * p_at_x)(0);
            }
            rep.neg_p_gram(a, b) = -acc;
        }

    // witness: <psi_a|(-P)psi_b> must equal <phi_a|phi_b>
    double scale = std::max(rep.neg_p_gram.norm(), 1e-300);
    for (int a = 0; a < nf; ++a)
        for (int b = 0; b < nf; ++b) {
            Complex w = phi[a].adjoint() * phi[b];
            rep.witness_defect =
                std::max(rep.witness_defect, std::abs(rep.neg_p_gram(a, b) - w) / scale);
        }

    Eigen::SelfAdjointEigenSolver<CMatrix> es(hermitian_part(rep.neg_p_gram),
                                              Eigen::EigenvaluesOnly);
    rep.neg_p_min_eig = es.eigenvalues().minCoeff();

    // symmetry: <P psi_a | psi_b> = <psi_a | P psi_b>
    for (int a = 0; a < nf; ++a)
        for (int b = 0; b < nf; ++b) {
            Complex left = 0, right = 0;
            for (int x = 0; x < n; ++x) {
                CVector pa = spins[x].basis.adjoint() * phi[a];
                CVector pb = spins[x].basis.adjoint() * phi[b];
                left += m.weights[x] * (pa.adjoint() * spins[x].gram * family[b][x])(0);
                right += m.weights[x] * (family[a][x].adjoint() * spins[x].gram * pb)(0);
            }
            rep.symmetry_defect =
                std::max(rep.symmetry_defect,
                         std::abs(left - right) / std::max({std::abs(left), std::abs(right), 1e-300}));
        }
    return rep;
}

/// Physical wave function of an H-vector over the measure's support.
inline LatticeWave physical_wave(const DiscreteMeasure& m, const CVector& u) {
    LatticeWave w;
    for (const auto& p : m.points) w.push_back(p.basis().adjoint() * u);
    return w;
}

struct ChargeLayerResult {
    double layer_t0 = 0;
    double layer_t1 = 0;
    double dirac_integral_t0 = 0;
};

/// Conserved surface-layer integral of the unitary flow generated by the
/// projector onto span(u), with Omega the slab of sites with time index in
/// [t0, t1]. Exact free evolution makes the two layer values agree; each is
/// proportional to the Dirac probability integral of u for small eps.
inline ChargeLayerResult charge_surface_layer(const LatticeSystem& sys, int t0, int t1,
                                              const CVector& u_coeffs, double h = 1e-4) {
    if (!(0 < t0 && t0 <= t1 && t1 < sys.cfg.n_t - 1))
        throw BadTimeRange("need 0 < t0 <= t1 < n_t-1 so both layers have an exterior");
    const int f = sys.cfg.f();
    if (u_coeffs.size() != f) throw DimensionMismatch("u must have f coefficients");

    ChargeLayerResult res;
    const double w = sys.cfg.cell_volume();
    const double unorm2 = u_coeffs.squaredNorm();

    // Dirac probability integral of the regularized wave at the t0 slice
    {
        double acc = 0;
        for (int ix = 0; ix < sys.cfg.n_x; ++ix)
            for (int iy = 0; iy < sys.cfg.n_x; ++iy)
                for (int iz = 0; iz < sys.cfg.n_x; ++iz) {
                    int s = sys.site_index(t0, ix, iy, iz);
                    CVector val = sys.evaluation(s) * u_coeffs;
                    acc += val.squaredNorm(); // <u|g^0 u> with the g^0 of the adjoint
                }
        res.dirac_integral_t0 = acc * std::pow(sys.cfg.dx(), 3);
    }
    if (unorm2 == 0.0) return res; // generator vanishes: both layers zero

    // operators per site, with the flow applied as a rank-one basis rotation
    const CVector u = u_coeffs / std::sqrt(unorm2);
    std::vector<LocalOperator> ops(sys.site_count());
    parallel_for(static_cast<std::size_t>(sys.site_count()), [&](std::size_t i) {
        ops[i] = sys.local_correlation(static_cast<int>(i));
    });
    auto flowed = [&](const LocalOperator& x, double tau) {
        // U_tau = 1 + (e^{i tau} - 1) |u><u|
        CMatrix b = x.basis();
        CMatrix overlap = u.adjoint() * b; // 1 x k
        b += (std::exp(kI * tau) - 1.0) * (u * overlap);
        return LocalOperator(x.dim_h(), x.spin_dim(), std::move(b), x.eigenvalues());
    };
    const int per_slice = sys.cfg.n_x * sys.cfg.n_x * sys.cfg.n_x;
    auto slice_sites = [&](int lo, int hi) {
        std::vector<int> v;
        for (int it = lo; it <= hi; ++it)
            for (int a = 0; a < per_slice; ++a) v.push_back(it * per_slice + a);
        return v;
    };
    auto layer = [&](int ext_lo, int ext_hi) {
        // d/dtau sum_{x in slab} sum_{y in exterior} w^2 [L(Phi_tau x, y) - L(Phi_-tau x, y)]
        std::vector<int> slab = slice_sites(t0, t1);
        std::vector<int> ext = slice_sites(ext_lo, ext_hi);
        auto eval = [&](double tau) {
            std::vector<LocalOperator> fl(slab.size());
            parallel_for(slab.size(), [&](std::size_t i) { fl[i] = flowed(ops[slab[i]], tau); });
            return parallel_sum<double>(slab.size() * ext.size(), [&](std::size_t idx) {
                std::size_t i = idx / ext.size(), j = idx % ext.size();
                return w * w * lagrangian(fl[i], ops[ext[j]]);
            });
        };
        // D(tau) = eval(tau) - eval(-tau) is the bracketed sum of Eq-style
        // [L(Phi_tau x,y) - L(Phi_-tau x,y)]; central difference of D is
        // (D(h) - D(-h)) / 2h = (eval(h) - eval(-h)) / h.
        return (eval(h) - eval(-h)) / h;
    };
    res.layer_t0 = layer(0, t0 - 1);
    res.layer_t1 = -layer(t1 + 1, sys.cfg.n_t - 1);
    return res;
}

struct SurveyResult {
    // rows: Minkowski class (0 spacelike, 1 timelike), cols: abstract tag
    std::array<std::array<long, 3>, 2> table{};
    long pairs_surveyed = 0;
    long pairs_excluded = 0;
    double agreement = 0;              // fraction agreeing outside the band
    long timelike_checked = 0;
    long orientation_agree = 0;        // time_direction sign vs sign(xi^0)
    long properly_timelike_count = 0;
};

/// Pairwise comparison of the abstract causal classification against the
/// Minkowski one, excluding a band around the light cone; time orientation is
/// compared on timelike pairs.
inline SurveyResult causal_agreement_survey(const LatticeSystem& sys, double band,
                                            double classify_tol = 0.05,
                                            int max_pairs = 200000, std::uint64_t seed = 3) {
    SurveyResult res;
    const int ns = sys.site_count();
    std::vector<LocalOperator> ops(ns);
    parallel_for(static_cast<std::size_t>(ns), [&](std::size_t i) {
        ops[i] = sys.local_correlation(static_cast<int>(i));
    });
    std::vector<std::pair<int, int>> pairs;
    long total = static_cast<long>(ns) * (ns - 1) / 2;
    Rng rng(seed, 11);
    if (total <= max_pairs) {
        for (int a = 0; a < ns; ++a)
            for (int b = a + 1; b < ns; ++b) pairs.emplace_back(a, b);
    } else {
        for (int k = 0; k < max_pairs; ++k) {
            int a = rng.uniform_int(0, ns - 1), b = rng.uniform_int(0, ns - 1);
            if (a == b) continue;
            pairs.emplace_back(std::min(a, b), std::max(a, b));
        }
    }
    long agree = 0;
    for (auto [a, b] : pairs) {
        FourVector xi = sys.separation(a, b);
        double r = xi.r();
        if (std::abs(std::abs(xi.t) - r) <= band) {
            ++res.pairs_excluded;
            continue;
        }
        int mink = xi.xi_sq() > 0 ? 1 : 0;
        CausalClass c = classify_causal(ops[a], ops[b], classify_tol);
        int tag = static_cast<int>(c.tag);
        res.table[mink][tag]++;
        ++res.pairs_surveyed;
        bool ok = (mink == 0 && c.tag == CausalTag::Spacelike) ||
                  (mink == 1 && c.tag == CausalTag::Timelike);
        if (ok) ++agree;
        if (mink == 1 && c.tag == CausalTag::Timelike) {
            ++res.timelike_checked;
            if (c.properly_timelike) ++res.properly_timelike_count;
            double cdir = time_direction(ops[a], ops[b]);
            if (cdir * xi.t > 0) ++res.orientation_agree;
        }
    }
    res.agreement = res.pairs_surveyed ? static_cast<double>(agree) / res.pairs_surveyed : 0.0;
    return res;
}

} // namespace cfs
