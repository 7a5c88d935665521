#include "tilie/lattice.hpp"

#include <gtest/gtest.h>

#include <random>

using namespace tilie;

namespace {

LatticeSpec ring(int m) { return {1, m, Sector::fermion()}; }

CirculantCoeffs<Rational> random_circulant(const LatticeSpec& lat, std::mt19937_64& rng) {
    std::uniform_int_distribution<int> coef(-4, 4);
    std::uniform_int_distribution<int> den(1, 3);
    CirculantCoeffs<Rational> g(lat);
    for (std::int64_t i = 0; i < lat.N; ++i) {
        int c = coef(rng);
        if (c != 0) g.add_at(offset_from_index(i, lat), Rational(c, den(rng)));
    }
    return g;
}

}  // namespace

TEST(Offsets, CanonicalizationAndNegation) {
    LatticeSpec lat(2, 3, Sector::fermion());
    EXPECT_EQ(canonical_offset({-1, 5}, lat), (Offset{2, 2}));
    EXPECT_EQ(offset_neg({1, 2}, lat), (Offset{2, 1}));
    EXPECT_EQ(offset_neg({0, 0}, lat), (Offset{0, 0}));
    EXPECT_EQ(offset_add({2, 2}, {2, 2}, lat), (Offset{1, 1}));
}

TEST(Offsets, SelfInverse) {
    LatticeSpec lat4 = ring(4);
    EXPECT_TRUE(offset_self_inverse({0}, lat4));
    EXPECT_TRUE(offset_self_inverse({2}, lat4));
    EXPECT_FALSE(offset_self_inverse({1}, lat4));
    LatticeSpec lat2 = ring(2);
    EXPECT_TRUE(offset_self_inverse({1}, lat2));
}

TEST(ShiftCoeffs, IdentityAtZero) {
    auto g = shift_coeffs(ring(5), {0});
    EXPECT_EQ(g, CirculantCoeffs<Rational>::identity(ring(5)));
}

TEST(ShiftCoeffs, SelfInverseAtMTwo) {
    // At m = 2, +1 and -1 are the same offset.
    auto lat = ring(2);
    EXPECT_EQ(shift_coeffs(lat, {1}), shift_coeffs(lat, {-1}));
    EXPECT_TRUE(shift_minus(lat, {1}).is_zero());
}

TEST(ShiftCoeffs, DenseDeltaRule) {
    LatticeSpec lat(2, 3, Sector::fermion());
    auto g = shift_coeffs(lat, {1, 2});
    auto mat = dense_realize(g);
    int ones = 0;
    for (std::int64_t k = 0; k < lat.N; ++k) {
        for (std::int64_t l = 0; l < lat.N; ++l) {
            Rational v = mat(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(l));
            if (!v.is_zero()) {
                ++ones;
                EXPECT_EQ(v, Rational(1));
                // M^(v)_{kl} = delta_{l,k+v}
                Offset ko = offset_from_index(k, lat);
                Offset lo = offset_from_index(l, lat);
                EXPECT_EQ(lo, offset_add(ko, {1, 2}, lat));
            }
        }
    }
    EXPECT_EQ(ones, 9);
}

TEST(Convolve, ShiftComposition) {
    LatticeSpec lat(2, 4, Sector::fermion());
    auto a = shift_coeffs(lat, {1, 3});
    auto b = shift_coeffs(lat, {2, 2});
    EXPECT_EQ(convolve(a, b), shift_coeffs(lat, {3, 1}));
    EXPECT_EQ(convolve(a, CirculantCoeffs<Rational>::identity(lat)), a);
}

TEST(Convolve, FrozenExampleM4) {
    // {1:1, 3:1} * {1:1, 3:1} = {0:2, 2:2} on the 4-ring.
    auto lat = ring(4);
    CirculantCoeffs<Rational> g(lat);
    g.add_at({1}, 1);
    g.add_at({3}, 1);
    auto p = convolve(g, g);
    CirculantCoeffs<Rational> expect(lat);
    expect.add_at({0}, 2);
    expect.add_at({2}, 2);
    EXPECT_EQ(p, expect);
}

TEST(Convolve, LatticeMismatchRejected) {
    auto a = shift_coeffs(ring(4), {1});
    auto b = shift_coeffs(ring(5), {1});
    EXPECT_THROW(convolve(a, b), LatticeMismatchError);
}

TEST(Convolve, CommutesAndMatchesDense) {
    std::mt19937_64 rng(7);
    for (const LatticeSpec& lat : {ring(4), ring(7), LatticeSpec(2, 3, Sector::fermion())}) {
        for (int it = 0; it < 10; ++it) {
            auto a = random_circulant(lat, rng);
            auto b = random_circulant(lat, rng);
            auto ab = convolve(a, b);
            EXPECT_EQ(ab, convolve(b, a));
            DenseMatrix<Rational> lhs = dense_realize(ab);
            DenseMatrix<Rational> rhs = dense_realize(a) * dense_realize(b);
            EXPECT_TRUE(lhs == rhs);
        }
    }
}

TEST(FourierSymbol, ShiftOnFourRing) {
    auto sym = fourier_symbol(shift_coeffs(ring(4), {1}));
    ASSERT_EQ(sym.size(), 4u);
    EXPECT_NEAR(sym[0].real(), 1.0, 1e-12);
    EXPECT_NEAR(sym[1].imag(), -1.0, 1e-12);
    EXPECT_NEAR(sym[2].real(), -1.0, 1e-12);
    EXPECT_NEAR(sym[3].imag(), 1.0, 1e-12);
    for (auto z : sym) EXPECT_NEAR(std::abs(z), 1.0, 1e-12);
}

TEST(FourierSymbol, IdentityAllOnes) {
    auto sym = fourier_symbol(CirculantCoeffs<Rational>::identity(ring(6)));
    for (auto z : sym) {
        EXPECT_NEAR(z.real(), 1.0, 1e-12);
        EXPECT_NEAR(z.imag(), 0.0, 1e-12);
    }
}

TEST(FourierSymbol, RingHomomorphism) {
    std::mt19937_64 rng(11);
    auto lat = LatticeSpec(2, 4, Sector::fermion());
    auto a = random_circulant(lat, rng);
    auto b = random_circulant(lat, rng);
    auto sa = fourier_symbol(a), sb = fourier_symbol(b);
    auto ssum = fourier_symbol(a + b);
    auto sconv = fourier_symbol(convolve(a, b));
    for (std::size_t i = 0; i < sa.size(); ++i) {
        EXPECT_NEAR(std::abs(ssum[i] - (sa[i] + sb[i])), 0.0, 1e-9);
        EXPECT_NEAR(std::abs(sconv[i] - sa[i] * sb[i]), 0.0, 1e-9);
    }
}

TEST(ClassPredicates, SymmetryMirrorsDense) {
    auto lat = ring(5);
    auto sym = shift_plus(lat, {2});
    auto anti = shift_minus(lat, {2});
    EXPECT_TRUE(sym.is_symmetric());
    EXPECT_FALSE(sym.is_antisymmetric());
    EXPECT_TRUE(anti.is_antisymmetric());
    auto ms = dense_realize(sym);
    auto ma = dense_realize(anti);
    EXPECT_TRUE(ms == DenseMatrix<Rational>(ms.transpose()));
    EXPECT_TRUE(ma == DenseMatrix<Rational>(-ma.transpose()));
}

TEST(ClassPredicates, AntisymmetricForcesZeroAtSelfInverse) {
    auto lat = ring(4);
    CirculantCoeffs<Rational> g(lat);
    g.add_at({2}, 1);
    EXPECT_FALSE(g.is_antisymmetric());
    EXPECT_TRUE(g.is_symmetric());
}

TEST(DenseRealize, CyclicShiftShape) {
    auto mat = dense_realize(shift_coeffs(ring(3), {1}));
    // ones at (k, k+1 mod 3)
    for (int k = 0; k < 3; ++k)
        for (int l = 0; l < 3; ++l)
            EXPECT_EQ(mat(k, l), (l == (k + 1) % 3) ? Rational(1) : Rational(0));
}

TEST(DenseRealize, CapEnforced) {
    LatticeSpec big(1, 5000, Sector::fermion());
    EXPECT_THROW(dense_realize(CirculantCoeffs<Rational>::identity(big)), SizeCapError);
}

TEST(FloatScalars, PruningOnAdd) {
    LatticeSpec lat = ring(3);
    CirculantCoeffs<double> g(lat);
    g.add_at({1}, 0.5);
    g.add_at({1}, -0.5);
    EXPECT_TRUE(g.is_zero());
}
