#include <catch_amalgamated.hpp>

#include <cfs/dirac.hpp>
#include <cfs/spin.hpp>

#include "test_util.hpp"

using namespace cfs;
using testutil::random_operator;
using testutil::random_regular;

namespace {

CMatrix cdiag(std::initializer_list<double> d) {
    CMatrix m = CMatrix::Zero(d.size(), d.size());
    int i = 0;
    for (double v : d) m(i, i) = v, ++i;
    return m;
}

} // namespace

TEST_CASE("spin space basis, gram, and signature") {
    LocalOperator x = make_local_operator(cdiag({-1, 2, 0}), 1);
    SpinSpace s = spin_space(x);
    REQUIRE(s.dim() == 2);
    // eigenbasis ascending: {-1 (e1), 2 (e2)}; gram = -diag(lambda)
    REQUIRE(std::abs(s.gram(0, 0) - Complex(1, 0)) < 1e-12);
    REQUIRE(std::abs(s.gram(1, 1) - Complex(-2, 0)) < 1e-12);
    REQUIRE(s.p == 1);
    REQUIRE(s.q == 1);

    LocalOperator z = make_local_operator(CMatrix::Zero(3, 3), 1);
    REQUIRE(spin_space(z).dim() == 0);

    Rng rng(7, 1);
    LocalOperator reg = random_regular(rng, 8, 2);
    SpinSpace sr = spin_space(reg);
    REQUIRE(sr.p == 2);
    REQUIRE(sr.q == 2);
    // gram really is -B^H x B
    CMatrix direct = -(sr.basis.adjoint() * reg.apply(sr.basis));
    REQUIRE((direct - sr.gram).norm() < 1e-10 * std::max(1.0, direct.norm()));
}

TEST_CASE("kernel entries, trace identity, adjointness") {
    LocalOperator x = make_local_operator(cdiag({1, -1}), 1);
    LocalOperator y = make_local_operator(cdiag({2, -3}), 1);
    SpinSpace sx = spin_space(x), sy = spin_space(y);

    // P(x,y) as an operator on the standard basis equals pi_x y pi_y = y here
    KernelMatrix k = kernel(sx, sy);
    CMatrix as_op = sx.basis * k.entries * sy.basis.adjoint();
    REQUIRE((as_op - y.dense()).norm() < 1e-12);

    // trace identity at coincidence
    KernelMatrix kxx = kernel(sx, sx);
    REQUIRE(kxx.entries.trace().real() == Catch::Approx(x.trace()));

    // adjointness P(x,y)^* = P(y,x) on random regular pairs
    Rng rng(7, 2);
    for (int trial = 0; trial < 100; ++trial) {
        int n = 1 + trial % 2;
        int f = 4 * n + rng.uniform_int(0, 4);
        LocalOperator a = random_regular(rng, f, n);
        LocalOperator b = random_regular(rng, f, n);
        SpinSpace sa = spin_space(a), sb = spin_space(b);
        KernelMatrix kab = kernel(sa, sb);
        KernelMatrix kba = kernel(sb, sa);
        double scale = std::max(1.0, kab.entries.norm());
        REQUIRE((spin_adjoint(kab) - kba.entries).norm() <= 1e-10 * scale);
        // trace identity on random points
        KernelMatrix kaa = kernel(sa, sa);
        REQUIRE(std::abs(kaa.entries.trace() - Complex(a.trace(), 0)) <= 1e-10 * a.norm());
    }
}

TEST_CASE("closed chain is isospectral to the operator product") {
    Rng rng(7, 3);
    for (int trial = 0; trial < 100; ++trial) {
        int n = 1 + trial % 2;
        int f = 4 * n + rng.uniform_int(0, 4);
        LocalOperator x = random_regular(rng, f, n);
        LocalOperator y = random_regular(rng, f, n);
        SpinSpace sx = spin_space(x), sy = spin_space(y);
        CMatrix a = closed_chain(sx, sy);

        // Tr A_xy = tr(yx)
        double tr_prod = (y.dense() * x.dense()).trace().real();
        REQUIRE(std::abs(a.trace().real() - tr_prod) <= 1e-9 * std::abs(tr_prod) + 1e-12);

        std::vector<Complex> ca = eigenvalues_sorted(a);
        ChainSpectrum ps = product_spectrum(x, y);
        for (std::size_t i = 0; i < ca.size(); ++i)
            REQUIRE(std::abs(ca[i] - ps.values[i]) <= 1e-9 * ps.scale);
    }

    // x = y: A_xx = P(x,x)^2 with the squared eigenvalues
    LocalOperator x = make_local_operator(cdiag({2, -1, 0}), 1);
    SpinSpace sx = spin_space(x);
    CMatrix a = closed_chain(sx, sx);
    std::vector<Complex> ev = eigenvalues_sorted(a);
    REQUIRE(std::abs(ev[0] - Complex(4, 0)) < 1e-12);
    REQUIRE(std::abs(ev[1] - Complex(1, 0)) < 1e-12);
}

TEST_CASE("properly timelike rejects the identity chain on an indefinite space") {
    // x = y with eigenvalues (1,1,-1,-1): A_xx = identity, eigenspace S_x indefinite
    LocalOperator x = make_local_operator(cdiag({1, 1, -1, -1}), 2);
    TimelikeCheck c = properly_timelike_check(x, x);
    REQUIRE_FALSE(c.value);
    REQUIRE(c.reason == "indefinite eigenspace");

    // non-regular points fail with a reason
    LocalOperator sing = make_local_operator(cdiag({1, 0, 0, 0}), 2);
    REQUIRE_FALSE(properly_timelike_check(sing, x).value);
}

TEST_CASE("properly timelike is symmetric") {
    Rng rng(7, 4);
    for (int trial = 0; trial < 60; ++trial) {
        int n = 1 + trial % 2;
        int f = 4 * n + 2;
        LocalOperator x = random_regular(rng, f, n);
        LocalOperator y = random_regular(rng, f, n);
        REQUIRE(properly_timelike(x, y) == properly_timelike(y, x));
    }
}

TEST_CASE("euclidean sign operator") {
    LocalOperator x = make_local_operator(cdiag({-1, 2}), 1);
    SpinSpace sx = spin_space(x);
    CMatrix s = euclidean_sign(sx);
    REQUIRE(std::abs(s(0, 0) - Complex(1, 0)) < 1e-14);  // eigenvalue -1 slot
    REQUIRE(std::abs(s(1, 1) - Complex(-1, 0)) < 1e-14); // eigenvalue +2 slot

    Rng rng(7, 5);
    for (int trial = 0; trial < 50; ++trial) {
        int n = 1 + trial % 2;
        LocalOperator a = random_regular(rng, 4 * n + 1, n);
        SpinSpace sa = spin_space(a);
        CMatrix sg = euclidean_sign(sa);
        REQUIRE((sg * sg - CMatrix::Identity(sa.dim(), sa.dim())).norm() < 1e-12);
        // spin symmetric: G s = s^H G
        REQUIRE((sa.gram * sg - sg.adjoint() * sa.gram).norm() < 1e-12);
        // spans a (1,0) Clifford subspace
        auto sig = is_clifford_subspace(sa, {sg});
        REQUIRE(sig.has_value());
        REQUIRE(*sig == std::pair<int, int>(1, 0));
    }

    LocalOperator sing = make_local_operator(cdiag({1, 0}), 1);
    REQUIRE_THROWS_AS(euclidean_sign(spin_space(sing)), SingularPoint);
}

TEST_CASE("clifford subspace predicate") {
    // Dirac matrices on the (2,2) spin space with gram gamma^0
    CMatrix gram = dirac::gamma(0);
    std::vector<CMatrix> gens = {dirac::gamma(0), dirac::gamma(1), dirac::gamma(2),
                                 dirac::gamma(3)};
    auto sig = is_clifford_subspace(gram, gens);
    REQUIRE(sig.has_value());
    REQUIRE(*sig == std::pair<int, int>(1, 3));

    // dependent set: degenerate bilinear form
    auto dep = is_clifford_subspace(gram, {dirac::gamma(0), dirac::gamma(0)});
    REQUIRE_FALSE(dep.has_value());

    // a non-anticommuting set is rejected
    CMatrix odd = dirac::gamma(1) * dirac::gamma(2);
    auto bad = is_clifford_subspace(gram, {dirac::gamma(1), dirac::gamma(1) + 0.3 * odd});
    REQUIRE_FALSE(bad.has_value());
}

TEST_CASE("directional sign operator on a built timelike pair") {
    // commuting regular points with distinct positive products, so every
    // eigenspace of the chain is one-dimensional and definite
    LocalOperator x = make_local_operator(cdiag({2, 1, -1, -2}), 2);
    LocalOperator y = make_local_operator(cdiag({5, 1, -2, -3}), 2);
    REQUIRE(properly_timelike(x, y));
    SpinSpace sx = spin_space(x), sy = spin_space(y);
    CMatrix v = directional_sign(sx, sy);
    REQUIRE((v * v - CMatrix::Identity(4, 4)).norm() < 1e-9);
    CMatrix a = closed_chain(sx, sy);
    REQUIRE((v * a - a * v).norm() < 1e-9 * a.norm());

    REQUIRE_THROWS_AS(directional_sign(spin_space(x), spin_space(x)), NotProperlyTimelike);

    LocalOperator small = make_local_operator(cdiag({1, -1}), 1);
    SpinSpace ss = spin_space(small);
    REQUIRE_THROWS_AS(directional_sign(ss, ss), WrongSpinDimension);
}
