#include "tilie/quadratic.hpp"

#include <gtest/gtest.h>

#include <random>

using namespace tilie;

namespace {

LatticeSpec fring(int m) { return {1, m, Sector::fermion()}; }
LatticeSpec bring(int m) { return {1, m, Sector::boson()}; }

using QE = QuadraticElement<Rational>;

QE hx(const LatticeSpec& l, int k) { return fermion_named(l, FermionKind::HX, {k}).element; }
QE hw(const LatticeSpec& l, int k) { return fermion_named(l, FermionKind::HW, {k}).element; }
QE hwp(const LatticeSpec& l, int k) { return fermion_named(l, FermionKind::HWPlus, {k}).element; }
QE hwm(const LatticeSpec& l, int k) { return fermion_named(l, FermionKind::HWMinus, {k}).element; }

CirculantCoeffs<Rational> random_class_map(const LatticeSpec& lat, std::mt19937_64& rng,
                                           int parity /* -1 anti, +1 sym, 0 free */) {
    std::uniform_int_distribution<int> coef(-3, 3);
    std::uniform_int_distribution<int> den(1, 2);
    CirculantCoeffs<Rational> g(lat);
    for (std::int64_t i = 0; i < lat.N; ++i) {
        Offset v = offset_from_index(i, lat);
        Rational c(coef(rng), den(rng));
        if (c.is_zero()) continue;
        if (parity == 0) {
            g.add_at(v, c);
        } else {
            Offset nv = offset_neg(v, lat);
            if (parity < 0 && v == nv) continue;
            g.add_at(v, c);
            g.add_at(nv, parity < 0 ? -c : c);
        }
    }
    return g;
}

QE random_element(const LatticeSpec& lat, std::mt19937_64& rng) {
    int parity = lat.sector.kind == SectorKind::Fermion ? -1 : 1;
    return {lat, random_class_map(lat, rng, parity), random_class_map(lat, rng, parity),
            random_class_map(lat, rng, 0)};
}

template <typename S>
DenseMatrix<S> dense_comm(const QuadraticElement<S>& a, const QuadraticElement<S>& b) {
    auto da = dense_realize(a), db = dense_realize(b);
    return da * db - db * da;
}

}  // namespace

TEST(FermionGenerators, OnsiteSquaresToMinusIdentity) {
    auto lat = fring(4);
    auto e = dense_realize(fermion_onsite(lat));
    DenseMatrix<Rational> sq = e * e;
    for (Eigen::Index i = 0; i < sq.rows(); ++i)
        for (Eigen::Index j = 0; j < sq.cols(); ++j)
            EXPECT_EQ(sq(i, j), i == j ? Rational(-1) : Rational(0));
}

TEST(FermionGenerators, NamedDegenerateCases) {
    auto lat = fring(2);
    EXPECT_THROW(fermion_named(lat, FermionKind::HX, {0}), ValidationError);
    auto named = fermion_named(lat, FermionKind::HX, {1});
    EXPECT_TRUE(named.degenerate);
    EXPECT_TRUE(named.element.is_zero());
    auto lat6 = fring(6);
    EXPECT_TRUE(fermion_named(lat6, FermionKind::HWMinus, {3}).degenerate);
    EXPECT_FALSE(fermion_named(lat6, FermionKind::HWMinus, {2}).degenerate);
}

TEST(FermionGenerators, PlusDecomposition) {
    // H_{W+}^(v) = H_W^(v) + H_W^(-v)
    auto lat = fring(5);
    EXPECT_EQ(hwp(lat, 2), hw(lat, 2) + hw(lat, -2 + 5));
}

TEST(FermionGenerators, NnSectorSymmetry) {
    auto lat = fring(5);
    EXPECT_EQ(sector_symmetry(fermion_nn<Rational>(lat, 1, 1, -1, 1, 0)), SectorSymmetry::FermionR);
    EXPECT_EQ(sector_symmetry(fermion_nn<Rational>(lat, 1, 1, 1, 1, 1)), SectorSymmetry::None);
    EXPECT_EQ(sector_symmetry(fermion_onsite(lat)), SectorSymmetry::FermionR);
}

TEST(FermionRelations, FullSuiteSmallRings) {
    // [H_X^(k), E] = 2 H_{W-}^(k)         (zero at self-inverse k)
    // [E, H_W^(k)] = H_X^(k)
    // [H_X^(k), H_X^(l)] = 0
    // [H_X^(k), H_W^(l)] = 2(H_W^(l+k) - H_W^(l-k))
    // [H_W^(k), H_W^(l)] = H_X^((l-k))
    for (int m = 2; m <= 8; ++m) {
        auto lat = fring(m);
        auto E = fermion_onsite(lat);
        for (int k = 1; k < m; ++k) {
            EXPECT_EQ(fermion_commutator(hx(lat, k), E), Rational(2) * hwm(lat, k));
            EXPECT_EQ(fermion_commutator(E, hw(lat, k)), hx(lat, k));
            for (int l = 1; l < m; ++l) {
                EXPECT_TRUE(fermion_commutator(hx(lat, k), hx(lat, l)).is_zero());
                auto lhs = fermion_commutator(hx(lat, k), hw(lat, l));
                auto rhs = Rational(2) * (hw(lat, (l + k) % m) - hw(lat, ((l - k) % m + m) % m));
                EXPECT_EQ(lhs, rhs) << "m=" << m << " k=" << k << " l=" << l;
                auto lhs2 = fermion_commutator(hw(lat, k), hw(lat, l));
                int d = ((l - k) % m + m) % m;
                auto rhs2 = d == 0 ? QE::zero(lat) : hx(lat, d);
                EXPECT_EQ(lhs2, rhs2);
            }
        }
    }
}

TEST(FermionCommutator, AlwaysLandsInR) {
    std::mt19937_64 rng(3);
    auto lat = fring(6);
    for (int i = 0; i < 50; ++i) {
        auto c = fermion_commutator(random_element(lat, rng), random_element(lat, rng));
        EXPECT_EQ(c.Y, -c.X);
        EXPECT_EQ(sector_symmetry(c), SectorSymmetry::FermionR);
    }
}

TEST(FermionCommutator, MatchesDenseCommutator) {
    std::mt19937_64 rng(5);
    for (const auto& lat : {fring(3), fring(4), LatticeSpec(2, 3, Sector::fermion())}) {
        for (int i = 0; i < 8; ++i) {
            auto a = random_element(lat, rng), b = random_element(lat, rng);
            auto structured = dense_realize(fermion_commutator(a, b));
            EXPECT_TRUE(structured == dense_comm(a, b));
        }
    }
}

TEST(FermionDense, GeneratorsAreAntisymmetric) {
    std::mt19937_64 rng(9);
    auto lat = fring(5);
    for (int i = 0; i < 10; ++i) {
        auto d = dense_realize(random_element(lat, rng));
        EXPECT_TRUE(d == DenseMatrix<Rational>(-d.transpose()));
    }
}

TEST(Jacobi, ExactInBothSectors) {
    std::mt19937_64 rng(12);
    for (auto lat : {fring(4), bring(4)}) {
        for (int i = 0; i < 15; ++i) {
            auto a = random_element(lat, rng);
            auto b = random_element(lat, rng);
            auto c = random_element(lat, rng);
            auto j = quadratic_commutator(a, quadratic_commutator(b, c)) +
                     quadratic_commutator(b, quadratic_commutator(c, a)) +
                     quadratic_commutator(c, quadratic_commutator(a, b));
            EXPECT_TRUE(j.is_zero());
        }
    }
}

// ---- bosonic sector -----------------------------------------------------------

TEST(BosonGenerators, OnsiteZeroAndSpecials) {
    auto lat = bring(5);
    EXPECT_TRUE(boson_onsite<Rational>(lat, 0, 0, 0).is_zero());
    EXPECT_EQ(boson_nn<Rational>(lat, {1}, 1, 0, 0, 0), boson_named(lat, BosonKind::LX, {1}));
    EXPECT_EQ(boson_nn<Rational>(lat, {1}, 0, 1, 0, 0), boson_named(lat, BosonKind::LY, {1}));
    EXPECT_EQ(boson_nn<Rational>(lat, {1}, 0, 0, 1, -1), boson_named(lat, BosonKind::LW, {1}));
    EXPECT_THROW(boson_nn<Rational>(lat, {0}, 1, 0, 0, 0), ValidationError);
}

TEST(BosonRelations, ProofIdentities) {
    for (int m = 3; m <= 8; ++m) {
        auto lat = bring(m);
        auto LY1 = boson_named(lat, BosonKind::LY, {1});
        auto LX1 = boson_named(lat, BosonKind::LX, {1});
        auto E100 = boson_onsite<Rational>(lat, 1, 0, 0);
        auto E001 = boson_onsite<Rational>(lat, 0, 0, 1);

        // [L_Y^(e1), E_(1,0,0)] = L_W^(e1)
        EXPECT_EQ(boson_commutator(LY1, E100), boson_named(lat, BosonKind::LW, {1}));

        // [L_Y^(e1), L_X^(e1)] - 2 E_(0,0,1) = L_W^(2e1)
        EXPECT_EQ(boson_commutator(LY1, LX1) - Rational(2) * E001,
                  boson_named(lat, BosonKind::LW, {2}));

        // [L_Y^(k e1), L_X^(e1)] = L_W^((k+1)e1) + L_W^((k-1)e1)
        for (int k = 1; k < m; ++k) {
            auto lhs = boson_commutator(boson_named(lat, BosonKind::LY, {k}), LX1);
            auto rhs = boson_named(lat, BosonKind::LW, {(k + 1) % m}) +
                       boson_named(lat, BosonKind::LW, {(k - 1 + m) % m});
            EXPECT_EQ(lhs, rhs) << "m=" << m << " k=" << k;
        }

        // W-block transfer: [L_W^(v)-type diag, E_(0,-1/2,0)] moves W into Y,
        // [., E_(1/2,0,0)] moves W into X.
        for (int v = 0; v < m; ++v) {
            auto LW = boson_named(lat, BosonKind::LW, {v});
            auto toY = boson_commutator(LW, boson_onsite<Rational>(lat, 0, Rational(-1, 2), 0));
            EXPECT_EQ(toY, QE(lat, CirculantCoeffs<Rational>(lat), LW.W, CirculantCoeffs<Rational>(lat)));
            auto toX = boson_commutator(LW, boson_onsite<Rational>(lat, Rational(1, 2), 0, 0));
            EXPECT_EQ(toX, QE(lat, LW.W, CirculantCoeffs<Rational>(lat), CirculantCoeffs<Rational>(lat)));
        }

        // Seed normalization identity of the w-branch:
        // [L^(e1), E_(0,-1,0)] = (w - w~) L_Y^(e1) + x L_W^(e1) in this convention.
        Rational x(3), y(0), w(2), wt(5);
        auto seed = boson_nn<Rational>(lat, {1}, x, y, w, wt);
        auto got = boson_commutator(seed, boson_onsite<Rational>(lat, 0, -1, 0));
        auto expect = (w - wt) * boson_named(lat, BosonKind::LY, {1}) +
                      x * boson_named(lat, BosonKind::LW, {1});
        EXPECT_EQ(got, expect);
    }
}

TEST(BosonCommutator, WBlockAlwaysSymmetric) {
    std::mt19937_64 rng(21);
    auto lat = bring(6);
    for (int i = 0; i < 50; ++i) {
        auto c = boson_commutator(random_element(lat, rng), random_element(lat, rng));
        EXPECT_TRUE(c.W.is_symmetric());
        EXPECT_EQ(sector_symmetry(c), SectorSymmetry::BosonP);
    }
}

TEST(BosonCommutator, MatchesDenseCommutator) {
    std::mt19937_64 rng(23);
    for (const auto& lat : {bring(3), bring(4), LatticeSpec(2, 3, Sector::boson())}) {
        for (int i = 0; i < 8; ++i) {
            auto a = random_element(lat, rng), b = random_element(lat, rng);
            EXPECT_TRUE(dense_realize(boson_commutator(a, b)) == dense_comm(a, b));
        }
    }
}

TEST(BosonDense, GeneratorsAreSymplectic) {
    // sigma L + L^T sigma = 0 with sigma = [[0, 1], [-1, 0]].
    std::mt19937_64 rng(31);
    auto lat = bring(4);
    const auto n = static_cast<Eigen::Index>(lat.N);
    DenseMatrix<Rational> sigma(2 * n, 2 * n);
    sigma.setConstant(Rational(0));
    for (Eigen::Index i = 0; i < n; ++i) {
        sigma(i, n + i) = Rational(1);
        sigma(n + i, i) = Rational(-1);
    }
    for (int i = 0; i < 10; ++i) {
        auto L = dense_realize(random_element(lat, rng));
        DenseMatrix<Rational> z = sigma * L + L.transpose() * sigma;
        for (Eigen::Index r = 0; r < z.rows(); ++r)
            for (Eigen::Index c = 0; c < z.cols(); ++c) EXPECT_TRUE(z(r, c).is_zero());
    }
}

TEST(Commutator, AntisymmetryAndSectorGuards) {
    std::mt19937_64 rng(41);
    auto lat = bring(5);
    auto a = random_element(lat, rng);
    EXPECT_TRUE(boson_commutator(a, a).is_zero());
    auto flat = fring(5);
    auto f = random_element(flat, rng);
    EXPECT_THROW(fermion_commutator(a, a), SectorError);
    EXPECT_THROW(boson_commutator(f, f), SectorError);
    auto f2 = random_element(fring(6), rng);
    EXPECT_THROW(fermion_commutator(f, f2), LatticeMismatchError);
}

// ---- representation conversion -------------------------------------------------

TEST(ConvertRepresentation, ZeroMapsToZero) {
    QuadraticHamiltonianAB<Rational> h;
    h.lattice = fring(4);
    h.A = h.B = h.C = h.D = CirculantCoeffs<GaussianRational>(h.lattice);
    EXPECT_TRUE(convert_representation(h).is_zero());
}

TEST(ConvertRepresentation, RealHoppingLandsInR) {
    // Real symmetric hopping: C = t(M^(1) + M^(-1)), B = -C (fermion), A = D = 0.
    auto lat = fring(5);
    QuadraticHamiltonianAB<Rational> h;
    h.lattice = lat;
    h.A = h.D = CirculantCoeffs<GaussianRational>(lat);
    CirculantCoeffs<GaussianRational> c(lat);
    c.add_at({1}, GaussianRational(Rational(2)));
    c.add_at({4}, GaussianRational(Rational(2)));
    h.C = c;
    h.B = GaussianRational(Rational(-1)) * c;
    auto el = convert_representation(h);
    EXPECT_FALSE(el.is_zero());
    EXPECT_EQ(sector_symmetry(el), SectorSymmetry::FermionR);

    // Oracle: dense block relation, checked numerically on the dense forms.
    auto back = convert_representation_inverse(el);
    EXPECT_EQ(convert_representation(back), el);
}

TEST(ConvertRepresentation, ImaginaryHoppingLeavesR) {
    // i t (a^dag_k a_{k+1} - h.c.): C = it(M^(1) - M^(-1)) is Hermitian.
    auto lat = fring(5);
    QuadraticHamiltonianAB<Rational> h;
    h.lattice = lat;
    h.A = h.D = CirculantCoeffs<GaussianRational>(lat);
    CirculantCoeffs<GaussianRational> c(lat);
    c.add_at({1}, GaussianRational(Rational(0), Rational(1)));
    c.add_at({4}, GaussianRational(Rational(0), Rational(-1)));
    h.C = c;
    // B = tau C^T keeps the pair already balanced.
    h.B = GaussianRational(Rational(-1)) * c.transpose();
    auto el = convert_representation(h);
    EXPECT_FALSE(el.is_zero());
    EXPECT_EQ(sector_symmetry(el), SectorSymmetry::None);
}

TEST(ConvertRepresentation, HermiticityViolationNamed) {
    auto lat = fring(4);
    QuadraticHamiltonianAB<Rational> h;
    h.lattice = lat;
    h.A = h.B = h.C = h.D = CirculantCoeffs<GaussianRational>(lat);
    CirculantCoeffs<GaussianRational> bad(lat);
    bad.add_at({1}, GaussianRational(Rational(1)));
    h.B = bad;  // B != B^dag
    try {
        convert_representation(h);
        FAIL() << "expected ValidationError";
    } catch (const ValidationError& e) {
        EXPECT_NE(std::string(e.what()).find("B = B^dag"), std::string::npos);
    }
}

TEST(ConvertRepresentation, RoundTripFromTriple) {
    // Triple -> (A,B,C,D) -> triple is the exact identity in both sectors.
    std::mt19937_64 rng(55);
    for (auto lat : {fring(4), fring(5), bring(4), bring(5)}) {
        for (int i = 0; i < 10; ++i) {
            auto el = random_element(lat, rng);
            auto h = convert_representation_inverse(el);
            EXPECT_EQ(convert_representation(h), el);
        }
    }
}

TEST(ModuloOnsite, FermionEDirection) {
    auto lat = fring(4);
    auto e = fermion_onsite(lat);
    auto a = hw(lat, 1);
    EXPECT_FALSE(a + e == a);
    EXPECT_TRUE(equal_modulo_onsite(a + e, a));
    EXPECT_FALSE(equal_modulo_onsite(a + hx(lat, 1), a));
}
