#pragma once

#include <cmath>

#include "cfs/bessel.hpp"
#include "cfs/errors.hpp"
#include "cfs/operators.hpp"

namespace cfs {

/// Minkowski four-vector, signature (+,-,-,-).
struct FourVector {
    double t = 0, x1 = 0, x2 = 0, x3 = 0;

    double r() const { return std::sqrt(x1 * x1 + x2 * x2 + x3 * x3); }
    double xi_sq() const { return t * t - (x1 * x1 + x2 * x2 + x3 * x3); }
    int time_sign() const { return t >= 0 ? 1 : -1; }

    FourVector operator-(const FourVector& o) const {
        return {t - o.t, x1 - o.x1, x2 - o.x2, x3 - o.x3};
    }
    FourVector operator-() const { return {-t, -x1, -x2, -x3}; }
};

inline double minkowski_dot(const FourVector& a, const FourVector& b) {
    return a.t * b.t - a.x1 * b.x1 - a.x2 * b.x2 - a.x3 * b.x3;
}

/// Boost with velocity (vx, vy, vz), |v| < 1.
inline FourVector boost(const FourVector& x, double vx, double vy, double vz) {
    double v2 = vx * vx + vy * vy + vz * vz;
    if (v2 >= 1.0) throw Error("boost velocity must be subluminal");
    if (v2 == 0.0) return x;
    double gamma = 1.0 / std::sqrt(1.0 - v2);
    double bx = x.x1 * vx + x.x2 * vy + x.x3 * vz; // v . x
    double tp = gamma * (x.t - bx);
    double coef = (gamma - 1.0) * bx / v2 - gamma * x.t;
    return {tp, x.x1 + coef * vx, x.x2 + coef * vy, x.x3 + coef * vz};
}

/// Band around the light cone inside which pointwise evaluation is refused.
inline double lightcone_tol(const FourVector& xi) {
    return 1e-6 * (1.0 + xi.t * xi.t + xi.r() * xi.r());
}

/// Regularized scalar kernel
///   T_eps(xi) = m^2/(2 pi)^3 K1(z)/z,  z = m sqrt(r^2 + (eps + i t)^2),
/// smooth for every eps > 0, including on the light cone.
inline Complex t_eps(const FourVector& xi, double m, double eps) {
    const double r = xi.r();
    Complex zsq = r * r + (eps + kI * xi.t) * (eps + kI * xi.t);
    Complex z = m * std::sqrt(zsq); // principal branch, Re z > 0 for eps > 0
    constexpr double two_pi_cubed = 248.05021344239856140381632;
    return (m * m / two_pi_cubed) * bessel::k1(z) / z;
}

/// Pole part of T_eps on the light cone, 1/(2 pi)^3 / (r^2 + (eps+it)^2);
/// subtracting it leaves a log-bounded remainder as eps -> 0.
inline Complex singular_part(const FourVector& xi, double eps) {
    const double r = xi.r();
    constexpr double two_pi_cubed = 248.05021344239856140381632;
    return 1.0 / (two_pi_cubed * (r * r + (eps + kI * xi.t) * (eps + kI * xi.t)));
}

/// Unregularized kernel away from the light cone:
/// timelike  (m/16 pi^2) (Y1 + i sgn(t) J1)(m s)/s with s = sqrt(xi^2),
/// spacelike (m/8 pi^3) K1(m s)/s with s = sqrt(-xi^2).
inline Complex t_unreg(const FourVector& xi, double m, double tol_lc = -1.0) {
    double s2 = xi.xi_sq();
    double band = tol_lc >= 0 ? tol_lc : lightcone_tol(xi);
    if (std::abs(s2) <= band)
        throw LightconeSingular("xi^2 too close to the light cone");
    constexpr double pi = 3.14159265358979323846264338;
    if (s2 > 0) {
        double u = std::sqrt(s2);
        double w = m * u;
        double sgn = xi.time_sign();
        return (m / (16 * pi * pi)) *
               Complex(bessel::y1(w), sgn * bessel::j1(w)) / u;
    }
    double u = std::sqrt(-s2);
    double w = m * u;
    return Complex((m / (8 * pi * pi * pi)) * bessel::k1(w) / u, 0.0);
}

/// Vector and scalar coefficients of the kernel P(x,y) = alpha xi_j gamma^j + beta,
/// obtained from T by the chain rule (xi = y - x, so d(xi^2)/dx^j = -2 xi_j):
/// beta = m T(xi^2), alpha = -2i T'(xi^2), with T' from the closed-form Bessel
/// derivative identities.
struct KernelScalars {
    Complex alpha;
    Complex beta;
    double xi_sq = 0;
    int time_sign = 1;
};

inline KernelScalars kernel_scalars(const FourVector& xi, double m, double tol_lc = -1.0) {
    double s2 = xi.xi_sq();
    double band = tol_lc >= 0 ? tol_lc : lightcone_tol(xi);
    if (std::abs(s2) <= band)
        throw LightconeSingular("xi^2 too close to the light cone");
    constexpr double pi = 3.14159265358979323846264338;
    KernelScalars ks;
    ks.xi_sq = s2;
    ks.time_sign = xi.time_sign();
    Complex t_val, t_prime;
    if (s2 > 0) {
        double u = std::sqrt(s2), w = m * u;
        Complex z0(bessel::y0(w), ks.time_sign * bessel::j0(w));
        Complex z1(bessel::y1(w), ks.time_sign * bessel::j1(w));
        double c = m / (16 * pi * pi);
        t_val = c * z1 / u;
        t_prime = c * (m * z0 / (2 * u * u) - z1 / (u * u * u));
    } else {
        double u = std::sqrt(-s2), w = m * u;
        double c = m / (8 * pi * pi * pi);
        t_val = Complex(c * bessel::k1(w) / u, 0.0);
        t_prime = Complex(c * (m * bessel::k0(w) / (2 * u * u) + bessel::k1(w) / (u * u * u)), 0.0);
    }
    ks.beta = m * t_val;
    ks.alpha = -2.0 * kI * t_prime;
    return ks;
}

/// Regularized variant: the same decomposition for the eps-smeared kernel
/// P_eps = (i d-slash + m) T_eps. Regularization breaks Lorentz invariance,
/// so the vectorial part splits into a time component and a radial spatial
/// component: P_eps = at gamma^0 + as (xi_vec . gamma_vec) + beta.
struct RegularizedScalars {
    Complex alpha_t; // coefficient of gamma^0
    Complex alpha_s; // coefficient of sum_i xi^i gamma^i
    Complex beta;
};

inline RegularizedScalars kernel_scalars_eps(const FourVector& xi, double m, double eps) {
    const double r = xi.r();
    constexpr double two_pi_cubed = 248.05021344239856140381632;
    Complex w = eps + kI * xi.t;
    Complex zsq = r * r + w * w;
    Complex z = m * std::sqrt(zsq);
    Complex g = bessel::k1(z) / z;
    // dg/dz = K1'(z)/z - K1/z^2 = -(K0/z + 2 K1/z^2)
    Complex dg = -(bessel::k0(z) / z + 2.0 * bessel::k1(z) / (z * z));
    const double c = m * m / two_pi_cubed;
    // z = m sqrt(r^2 + w^2): dz/dt = m^2 i w / z, dz/dr = m^2 r / z
    Complex df_dt = c * dg * (m * m * kI * w / z);
    Complex df_dr = c * dg * (m * m * r / z);
    RegularizedScalars out;
    out.beta = m * c * g;
    out.alpha_t = -kI * df_dt;
    out.alpha_s = r > 0 ? -kI * df_dr / r : Complex(0, 0);
    return out;
}

/// Closed-chain invariants a, b and the characteristic roots b +- sqrt(a^2 xi^2),
/// each of multiplicity two.
struct ChainInvariants {
    double a = 0;
    double b = 0;
    Complex root_plus;
    Complex root_minus;
};

inline ChainInvariants chain_invariants(const KernelScalars& ks) {
    ChainInvariants ci;
    ci.a = 2.0 * (ks.alpha * std::conj(ks.beta)).real();
    ci.b = std::norm(ks.alpha) * ks.xi_sq + std::norm(ks.beta);
    Complex disc = std::sqrt(Complex(ci.a * ci.a * ks.xi_sq, 0.0));
    ci.root_plus = ci.b + disc;
    ci.root_minus = ci.b - disc;
    if (ks.xi_sq > 0) {
        double lhs = std::abs(ci.a) * std::sqrt(ks.xi_sq);
        if (lhs > ci.b * (1 + 1e-12))
            throw Error("Schwarz bound b >= |a| sqrt(xi^2) violated");
    }
    return ci;
}

/// Causal classification of a Minkowski pair from the closed-chain roots.
/// Spacelike <-> xi^2 < 0, properly timelike <-> xi^2 > 0; on the cone the
/// classification is refused.
inline CausalClass classify_minkowski(const FourVector& xi, double m, double tol = 1e-8) {
    ChainInvariants ci = chain_invariants(kernel_scalars(xi, m));
    ChainSpectrum s;
    s.spin_dim = 2;
    s.values = {ci.root_plus, ci.root_plus, ci.root_minus, ci.root_minus};
    s.scale = std::max(std::abs(ci.root_plus), std::abs(ci.root_minus));
    CausalClass c = classify_spectrum(s, tol, s.scale > 0 ? 1.0 : 0.0);
    if (c.tag == CausalTag::Timelike) {
        double gap = ci.b - std::abs(ci.a) * std::sqrt(std::max(xi.xi_sq(), 0.0));
        c.properly_timelike = ci.root_minus.real() > 0 && gap > 0;
    }
    return c;
}

/// Coincidence values of the regularized vacuum kernel,
/// P_eps(x,x) = v0 gamma^0 + beta0: both are closed Bessel expressions.
struct CoincidenceKernel {
    double v0 = 0;
    double beta0 = 0;
    double rho() const { return v0 * v0 - beta0 * beta0; }
};

inline CoincidenceKernel coincidence_kernel(double m, double eps) {
    constexpr double pi = 3.14159265358979323846264338;
    double w = m * eps;
    CoincidenceKernel c;
    c.beta0 = (m * m * m / (8 * pi * pi * pi)) * bessel::k1(w) / w;
    c.v0 = -(m * m * m / (8 * pi * pi * pi)) * (bessel::k0(w) / w + 2 * bessel::k1(w) / (w * w));
    return c;
}

/// Time-direction functional of the regularized vacuum,
///   C(x,y) = 16 a / (rho(x) rho(y)) Im(alpha conj(beta))
///            [ (v(x).xi)(v(y).xi) - xi^2 (v(x).v(y)) ],
/// with v, beta read off the coincidence kernel. Requires timelike,
/// non-degenerate xi (linearly independent of the purely temporal v).
inline double c_functional(const FourVector& x, const FourVector& y, double m, double eps) {
    FourVector xi = y - x;
    double s2 = xi.xi_sq();
    if (s2 <= lightcone_tol(xi)) throw NotTimelike("c_functional needs timelike separation");
    double r = xi.r();
    if (r <= 1e-9 * std::sqrt(xi.t * xi.t + r * r))
        throw DegenerateDirection("xi is parallel to the coincidence vector field");
    CoincidenceKernel ck = coincidence_kernel(m, eps);
    double rho = ck.rho();
    if (std::abs(rho) <= 1e-12 * (ck.v0 * ck.v0 + ck.beta0 * ck.beta0))
        throw NonInvertibleCoincidence("coincidence kernel not invertible");
    KernelScalars ks = kernel_scalars(xi, m);
    ChainInvariants ci = chain_invariants(ks);
    double im_ab = (ks.alpha * std::conj(ks.beta)).imag();
    double vxi = ck.v0 * xi.t; // v = (v0, 0): v.xi = v0 t, v.v = v0^2
    double bracket = vxi * vxi - s2 * ck.v0 * ck.v0;
    return 16.0 * ci.a / (rho * rho) * im_ab * bracket;
}

} // namespace cfs
