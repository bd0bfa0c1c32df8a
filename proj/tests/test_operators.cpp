#include <catch_amalgamated.hpp>

#include <cfs/operators.hpp>
#include <cfs/rng.hpp>
#include <cfs/spin.hpp>

#include "test_util.hpp"

using namespace cfs;
using testutil::dense_product_spectrum;
using testutil::random_operator;
using testutil::rel_diff;

namespace {

ChainSpectrum spectrum_of(std::vector<Complex> v, int n) {
    ChainSpectrum s;
    s.spin_dim = n;
    s.scale = 0;
    for (auto& l : v) s.scale = std::max(s.scale, std::abs(l));
    s.values = std::move(v);
    s.values.resize(2 * n, Complex(0, 0));
    return s;
}

CMatrix cdiag(std::initializer_list<double> d) {
    CMatrix m = CMatrix::Zero(d.size(), d.size());
    int i = 0;
    for (double v : d) m(i, i) = v, ++i;
    return m;
}

} // namespace

TEST_CASE("make_local_operator validates signature and rank") {
    LocalOperator x = make_local_operator(cdiag({1, -1}), 1);
    REQUIRE(x.rank() == 2);
    REQUIRE(x.signature() == std::pair<int, int>(1, 1));
    REQUIRE(x.regular());

    REQUIRE_THROWS_AS(make_local_operator(cdiag({1, 1, -1}), 1), SignatureViolation);

    LocalOperator z = make_local_operator(CMatrix::Zero(3, 3), 1);
    REQUIRE(z.rank() == 0);
    REQUIRE(z.norm() == 0.0);

    CMatrix bad(2, 2);
    bad << 1, Complex(0, 1), Complex(0, 1), 1; // not Hermitian
    REQUIRE_THROWS_AS(make_local_operator(bad, 1), NotHermitian);

    REQUIRE_THROWS_AS(make_local_operator(CMatrix::Zero(2, 3), 1), DimensionMismatch);
}

TEST_CASE("spectral weight sums absolute values") {
    REQUIRE(spectral_weight(spectrum_of({4, 1}, 1)) == Catch::Approx(5.0));
    REQUIRE(spectral_weight(spectrum_of({Complex(0, 2), Complex(0, -2)}, 1)) ==
            Catch::Approx(4.0));
    REQUIRE(spectral_weight(spectrum_of({}, 1)) == 0.0);
}

TEST_CASE("product spectrum on diagonal pairs") {
    LocalOperator x = make_local_operator(cdiag({1, -1}), 1);
    ChainSpectrum s = product_spectrum(x, x);
    REQUIRE(s.values.size() == 2);
    REQUIRE(std::abs(s.values[0] - Complex(1, 0)) < 1e-12);
    REQUIRE(std::abs(s.values[1] - Complex(1, 0)) < 1e-12);

    LocalOperator y = make_local_operator(cdiag({2, -3}), 1);
    ChainSpectrum s2 = product_spectrum(x, y);
    std::vector<double> mods = {std::abs(s2.values[0]), std::abs(s2.values[1])};
    std::sort(mods.begin(), mods.end());
    REQUIRE(mods[0] == Catch::Approx(2.0));
    REQUIRE(mods[1] == Catch::Approx(3.0));
}

TEST_CASE("product spectrum matches the dense oracle and is isospectral") {
    Rng rng(2024, 1);
    for (int trial = 0; trial < 200; ++trial) {
        int n = 1 + trial % 2;
        int f = 4 * n + rng.uniform_int(0, 8);
        LocalOperator x = random_operator(rng, f, n);
        LocalOperator y = random_operator(rng, f, n, rng.uniform_int(0, 2 * n));
        ChainSpectrum fast = product_spectrum(x, y);
        std::vector<Complex> oracle = dense_product_spectrum(x, y);
        // compare as multisets sorted by modulus
        std::size_t nz = 0;
        for (const auto& l : fast.values)
            if (std::abs(l) > 0) ++nz;
        REQUIRE(nz == oracle.size());
        for (std::size_t i = 0; i < oracle.size(); ++i)
            REQUIRE(std::abs(fast.values[i] - oracle[i]) <= 1e-9 * fast.scale);

        ChainSpectrum rev = product_spectrum(y, x);
        for (std::size_t i = 0; i < fast.values.size(); ++i)
            REQUIRE(std::abs(fast.values[i] - rev.values[i]) <= 1e-9 * fast.scale);
    }
}

TEST_CASE("lagrangian closed-form cases") {
    REQUIRE(lagrangian(spectrum_of({4, 1}, 1)) == Catch::Approx(4.5));
    // equal-modulus conjugate pair: spacelike, vanishing Lagrangian
    REQUIRE(lagrangian(spectrum_of({Complex(0, 2), Complex(0, -2)}, 1)) ==
            Catch::Approx(0.0).margin(1e-14));

    for (int n : {1, 2, 3}) {
        CMatrix d = CMatrix::Zero(2 * n + 1, 2 * n + 1);
        for (int i = 0; i < n; ++i) d(i, i) = 1;
        for (int i = n; i < 2 * n; ++i) d(i, i) = -1;
        LocalOperator x = make_local_operator(d, n);
        ChainSpectrum s = product_spectrum(x, x);
        REQUIRE(lagrangian(s) == Catch::Approx(0.0).margin(1e-12));
        double t = spectral_weight(s) * spectral_weight(s);
        REQUIRE(t == Catch::Approx(4.0 * n * n)); // T > 0 while S = 0
    }
}

TEST_CASE("lagrangian symmetry and quarter-sum identity") {
    Rng rng(2024, 2);
    for (int trial = 0; trial < 200; ++trial) {
        int n = 1 + trial % 2;
        int f = 4 * n + rng.uniform_int(0, 6);
        LocalOperator x = random_operator(rng, f, n);
        LocalOperator y = random_operator(rng, f, n);
        double lxy = lagrangian(x, y), lyx = lagrangian(y, x);
        REQUIRE(rel_diff(lxy, lyx) < 1e-12);

        ChainSpectrum s = product_spectrum(x, y);
        double quarter = 0;
        for (const auto& li : s.values)
            for (const auto& lj : s.values) {
                double d = std::abs(li) - std::abs(lj);
                quarter += d * d;
            }
        quarter /= 4.0 * n;
        REQUIRE(std::abs(lxy - quarter) <= 1e-10 * std::max(1.0, std::abs(lxy)));
    }
}

TEST_CASE("causal classification of synthetic spectra") {
    double tol = 1e-8;
    CausalClass c1 = classify_spectrum(spectrum_of({Complex(1, 2), Complex(1, -2)}, 1), tol, 1);
    REQUIRE(c1.tag == CausalTag::Spacelike);

    CausalClass c2 = classify_spectrum(spectrum_of({3, 1, 3, 1}, 2), tol, 1);
    REQUIRE(c2.tag == CausalTag::Timelike);

    CausalClass c3 = classify_spectrum(spectrum_of({Complex(1, 0), Complex(0, 1)}, 1), tol, 1);
    REQUIRE(c3.tag == CausalTag::Lightlike);

    CausalClass c4 = classify_spectrum(spectrum_of({}, 1), tol, 1);
    REQUIRE(c4.tag == CausalTag::Spacelike);
    REQUIRE(c4.degenerate);
}

TEST_CASE("classification through operator pairs") {
    // diagonal timelike pair: spectrum {3, 1}
    LocalOperator x = make_local_operator(cdiag({1, -1}), 1);
    LocalOperator y = make_local_operator(cdiag({3, -1}), 1);
    REQUIRE(classify_causal(x, y).tag == CausalTag::Timelike);

    // zero pair is degenerate spacelike
    LocalOperator z = make_local_operator(CMatrix::Zero(2, 2), 1);
    CausalClass c = classify_causal(x, z);
    REQUIRE(c.tag == CausalTag::Spacelike);
    REQUIRE(c.degenerate);

    REQUIRE_THROWS_AS(classify_causal(x, y, 0.7), Error);
}

TEST_CASE("classification symmetry on random pairs") {
    Rng rng(2024, 3);
    for (int trial = 0; trial < 100; ++trial) {
        int n = 1 + trial % 2;
        int f = 4 * n + 2;
        LocalOperator x = random_operator(rng, f, n);
        LocalOperator y = random_operator(rng, f, n);
        REQUIRE(classify_causal(x, y).tag == classify_causal(y, x).tag);
    }
}

TEST_CASE("spacelike pairs have vanishing Lagrangian") {
    Rng rng(2024, 4);
    int found = 0;
    for (int trial = 0; trial < 400; ++trial) {
        int f = 6;
        LocalOperator x = random_operator(rng, f, 1);
        LocalOperator y = random_operator(rng, f, 1);
        ChainSpectrum s = product_spectrum(x, y);
        CausalClass c = classify_spectrum(s, 1e-10, x.norm() * y.norm());
        if (c.tag == CausalTag::Spacelike && !c.degenerate) {
            ++found;
            REQUIRE(lagrangian(s) <= 1e-9 * s.scale * s.scale);
        }
    }
    // deterministic spacelike pairs: involution-like points give equal moduli
    for (double c : {0.5, 1.0, 2.0}) {
        CMatrix d = CMatrix::Zero(4, 4);
        d(0, 0) = c;
        d(1, 1) = -c;
        LocalOperator x = make_local_operator(d, 1);
        ChainSpectrum s = product_spectrum(x, x);
        REQUIRE(classify_spectrum(s, 1e-10, x.norm() * x.norm()).tag == CausalTag::Spacelike);
        REQUIRE(lagrangian(s) <= 1e-9 * s.scale * s.scale);
        ++found;
    }
    REQUIRE(found > 0);
}

TEST_CASE("time direction is antisymmetric and vanishes on the diagonal") {
    Rng rng(2024, 5);
    for (int trial = 0; trial < 100; ++trial) {
        int n = 1 + trial % 2;
        int f = 4 * n + 3;
        LocalOperator x = random_operator(rng, f, n);
        LocalOperator y = random_operator(rng, f, n);
        double scale = x.norm() * x.norm() * y.norm() * y.norm();
        REQUIRE(std::abs(time_direction(x, x)) <= 1e-10 * x.norm() * x.norm() * x.norm() * x.norm() + 1e-300);
        REQUIRE(std::abs(time_direction(x, y) + time_direction(y, x)) <= 1e-10 * scale + 1e-300);
    }
}

TEST_CASE("sqrt-abs operator inequality") {
    LocalOperator x0 = make_local_operator(cdiag({1, -1}), 1);
    auto [l0, r0] = sqrt_abs_bound(x0, x0);
    REQUIRE(l0 == Catch::Approx(0.0).margin(1e-12));
    REQUIRE(r0 == Catch::Approx(0.0).margin(1e-12));

    LocalOperator zero = make_local_operator(CMatrix::Zero(1, 1), 1);
    LocalOperator four = make_local_operator(cdiag({4}), 1);
    auto [l1, r1] = sqrt_abs_bound(zero, four);
    REQUIRE(l1 == Catch::Approx(2.0));
    REQUIRE(r1 == Catch::Approx(2.0));

    Rng rng(2024, 6);
    for (int trial = 0; trial < 500; ++trial) {
        int n = 1 + trial % 2;
        int f = 4 * n + rng.uniform_int(0, 4);
        LocalOperator x = random_operator(rng, f, n, rng.uniform_int(0, 2 * n));
        LocalOperator y = random_operator(rng, f, n, rng.uniform_int(1, 2 * n));
        auto [lhs, rhs] = sqrt_abs_bound(x, y);
        double scale = std::max(x.norm(), y.norm());
        REQUIRE(lhs <= rhs + 1e-10 * std::sqrt(scale));
    }
}
