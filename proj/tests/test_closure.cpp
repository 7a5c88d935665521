#include "tilie/closure.hpp"

#include <gtest/gtest.h>

#include "oracle.hpp"

using namespace tilie;

namespace {

LatticeSpec fring(int m) { return {1, m, Sector::fermion()}; }
LatticeSpec bring(int m) { return {1, m, Sector::boson()}; }
LatticeSpec sring(int m) { return {1, m, Sector::spin(2)}; }

using QE = QuadraticElement<Rational>;

std::vector<QE> fermion_seed(const LatticeSpec& lat, Rational x, Rational y, Rational w,
                             Rational wt) {
    return {fermion_onsite(lat), fermion_nn<Rational>(lat, 1, x, y, w, wt)};
}

SpinElement tau2(const LatticeSpec& lat, int k, int l) {
    return tau_symmetrize(lat, {{0, static_cast<std::uint8_t>(k), {0, 1}},
                                {1, static_cast<std::uint8_t>(l), {0, 1}}});
}
SpinElement tau1(const LatticeSpec& lat, int k) {
    return tau_symmetrize(lat, {{0, static_cast<std::uint8_t>(k), {0, 1}}});
}

std::vector<SpinElement> onsite_nn_generators(const LatticeSpec& lat) {
    std::vector<SpinElement> gens;
    for (int k = 1; k <= 3; ++k) gens.push_back(tau1(lat, k));
    for (int k = 1; k <= 3; ++k)
        for (int l = 1; l <= 3; ++l) gens.push_back(tau2(lat, k, l));
    return gens;
}

template <typename Space, typename Rep>
void check_words_expand(Space& space, const Rep& report,
                        const std::vector<typename Space::Element>& gens) {
    using S = typename Space::Scalar;
    auto br = [&](const typename Space::Element& a, const typename Space::Element& b) {
        return space.bracket(a, b);
    };
    for (std::size_t i = 0; i < report.basis.size(); ++i) {
        auto expanded = word_expand<typename Space::Element>(
            report.words[i], std::span<const typename Space::Element>(gens), br);
        if constexpr (scalar_traits<S>::exact) {
            EXPECT_TRUE(expanded == report.basis[i]) << "word " << i << " fails to expand";
        } else {
            auto diff = space.to_coords(expanded - report.basis[i]);
            double err = 0;
            for (const auto& [idx, c] : diff) {
                (void)idx;
                err += c * c;
            }
            EXPECT_LT(std::sqrt(err), 1e-9) << "word " << i << " fails to expand";
        }
    }
}

}  // namespace

TEST(Closure, SingleGeneratorAbelian) {
    auto lat = fring(5);
    QuadraticSpace<Rational> space(lat);
    std::vector<QE> gens{fermion_onsite(lat)};
    auto rep = close(space, std::span<const QE>(gens));
    EXPECT_EQ(rep.dimension, 1);
    EXPECT_TRUE(rep.converged);
}

TEST(Closure, FermionOddCaseA) {
    // X0 = Y0, symmetric W0: nothing beyond the seeds.
    auto lat = fring(5);
    QuadraticSpace<Rational> space(lat);
    auto gens = fermion_seed(lat, 1, 1, 2, 2);
    auto rep = close(space, std::span<const QE>(gens));
    EXPECT_EQ(rep.dimension, 2);
    EXPECT_TRUE(rep.converged);
}

TEST(Closure, FermionOddGenericMatchesDenseOracle) {
    for (int m : {3, 5}) {
        auto lat = fring(m);
        QuadraticSpace<Rational> space(lat);
        auto gens = fermion_seed(lat, 1, 0, 0, 0);
        auto rep = close(space, std::span<const QE>(gens));
        std::vector<DenseMatrix<Rational>> dense;
        for (const auto& g : gens) dense.push_back(dense_realize(g));
        EXPECT_EQ(rep.dimension, oracle::dense_lie_closure_dim(dense)) << "m=" << m;
        // the real-hopping space: H_X^(k) and H_W^(k) all lie in the span
        for (int k = 1; k < m; ++k) {
            auto r1 = member(space, fermion_named(lat, FermionKind::HX, {k}).element, rep);
            auto r2 = member(space, fermion_named(lat, FermionKind::HW, {k}).element, rep);
            EXPECT_TRUE(r1.in_span && r2.in_span);
        }
    }
}

TEST(Closure, FermionClosureInsideRPlusSeedSpan) {
    // Everything reachable lies in the real-hopping space up to linear
    // combinations of the initial generators.
    auto lat = fring(7);
    QuadraticSpace<Rational> space(lat);
    auto gens = fermion_seed(lat, 1, 2, 1, 0);
    auto rep = close(space, std::span<const QE>(gens));
    detail::RationalReducer r_plus_seeds;
    for (const auto& g : gens) r_plus_seeds.insert(space.to_coords(g));
    for (int k = 1; k < 7; ++k) {
        r_plus_seeds.insert(space.to_coords(fermion_named(lat, FermionKind::HX, {k}).element));
        r_plus_seeds.insert(space.to_coords(fermion_named(lat, FermionKind::HW, {k}).element));
    }
    r_plus_seeds.insert(space.to_coords(fermion_onsite(lat)));
    for (const auto& b : rep.basis) {
        auto [in, c] = r_plus_seeds.project(space.to_coords(b));
        (void)c;
        EXPECT_TRUE(in);
    }
    // and the closure genuinely grew beyond the seeds
    EXPECT_GT(rep.dimension, 2);
}

TEST(Closure, WordsExpandToBasisExactly) {
    auto lat = fring(6);
    QuadraticSpace<Rational> space(lat);
    auto gens = fermion_seed(lat, 1, 2, 1, 0);
    auto rep = close(space, std::span<const QE>(gens));
    check_words_expand(space, rep, gens);

    auto blat = bring(4);
    QuadraticSpace<Rational> bspace(blat);
    std::vector<QE> bgens{boson_onsite<Rational>(blat, 1, 0, 0), boson_onsite<Rational>(blat, 0, 1, 0),
                          boson_onsite<Rational>(blat, 0, 0, 1),
                          boson_nn<Rational>(blat, {1}, 1, 2, 1, 1)};
    auto brep = close(bspace, std::span<const QE>(bgens));
    check_words_expand(bspace, brep, bgens);
}

TEST(Closure, BosonMatchesDenseOracle) {
    for (int m : {3, 4, 5}) {
        auto lat = bring(m);
        QuadraticSpace<Rational> space(lat);
        std::vector<QE> gens{boson_onsite<Rational>(lat, 1, 0, 0), boson_onsite<Rational>(lat, 0, 1, 0),
                             boson_onsite<Rational>(lat, 0, 0, 1),
                             boson_nn<Rational>(lat, {1}, 1, 2, 1, 1)};
        auto rep = close(space, std::span<const QE>(gens));
        std::vector<DenseMatrix<Rational>> dense;
        for (const auto& g : gens) dense.push_back(dense_realize(g));
        EXPECT_EQ(rep.dimension, oracle::dense_lie_closure_dim(dense)) << "m=" << m;
        EXPECT_TRUE(rep.converged);
    }
}

TEST(Closure, MemberFindsGeneratorsWithUnitExpansion) {
    auto lat = bring(5);
    QuadraticSpace<Rational> space(lat);
    std::vector<QE> gens{boson_onsite<Rational>(lat, 1, 0, 0), boson_onsite<Rational>(lat, 0, 0, 1),
                         boson_nn<Rational>(lat, {1}, 0, 1, 0, 0)};
    auto rep = close(space, std::span<const QE>(gens));
    for (const auto& g : gens) {
        auto res = member(space, g, rep);
        ASSERT_TRUE(res.in_span);
        // the word must reproduce the generator exactly
        auto br = [&](const QE& a, const QE& b) { return space.bracket(a, b); };
        auto expanded = word_expand<QE>(res.word, std::span<const QE>(gens), br);
        EXPECT_TRUE(expanded == g);
    }
}

TEST(Closure, MemberRejectsOutsideTarget) {
    auto lat = fring(5);
    QuadraticSpace<Rational> space(lat);
    auto gens = fermion_seed(lat, 1, 1, 2, 2);  // abelian case
    auto rep = close(space, std::span<const QE>(gens));
    auto target = fermion_named(lat, FermionKind::HX, {2}).element;
    auto res = member(space, target, rep);
    EXPECT_FALSE(res.in_span);
    EXPECT_GT(res.residual_norm, 0.1);
}

TEST(Closure, Determinism) {
    auto lat = fring(6);
    auto gens = fermion_seed(lat, 1, 2, 1, 0);
    QuadraticSpace<Rational> s1(lat), s2(lat);
    auto r1 = close(s1, std::span<const QE>(gens));
    auto r2 = close(s2, std::span<const QE>(gens));
    ASSERT_EQ(r1.dimension, r2.dimension);
    for (int i = 0; i < r1.dimension; ++i) EXPECT_TRUE(r1.basis[i] == r2.basis[i]);
}

TEST(Closure, DimensionMonotoneInGenerators) {
    auto lat = fring(5);
    QuadraticSpace<Rational> space(lat);
    std::vector<QE> small{fermion_onsite(lat)};
    std::vector<QE> big = small;
    big.push_back(fermion_nn<Rational>(lat, 1, 1, 0, 0, 0));
    QuadraticSpace<Rational> s2(lat);
    EXPECT_LE(close(space, std::span<const QE>(small)).dimension,
              close(s2, std::span<const QE>(big)).dimension);
}

TEST(Closure, MaxDimTruncationFlagged) {
    auto lat = fring(7);
    QuadraticSpace<Rational> space(lat);
    auto gens = fermion_seed(lat, 1, 0, 0, 0);
    ClosureOptions opt;
    opt.max_dim = 3;
    auto rep = close(space, std::span<const QE>(gens), opt);
    EXPECT_EQ(rep.dimension, 3);
    EXPECT_FALSE(rep.converged);
}

TEST(Closure, BigIntegerEngineAgrees) {
    auto lat = fring(5);
    auto gens = fermion_seed(lat, Rational(1, 3), Rational(-2, 7), Rational(5, 11), 0);
    QuadraticSpace<Rational> s1(lat), s2(lat);
    ClosureOptions opt;
    auto r1 = detail::ExactCloser<QuadraticSpace<Rational>, std::int64_t>(
                  s1, std::span<const QE>(gens), opt)
                  .run();
    auto r2 =
        detail::ExactCloser<QuadraticSpace<Rational>, mpz_class>(s2, std::span<const QE>(gens), opt)
            .run();
    ASSERT_EQ(r1.dimension, r2.dimension);
    for (int i = 0; i < r1.dimension; ++i) EXPECT_TRUE(r1.basis[i] == r2.basis[i]);
}

TEST(Closure, FloatModeMatchesExactDimension) {
    auto lat = fring(6);
    QuadraticSpace<Rational> se(lat);
    auto ge = fermion_seed(lat, 1, 2, 1, 0);
    auto re = close(se, std::span<const QE>(ge));

    LatticeSpec latd = lat;
    QuadraticSpace<double> sd(latd);
    std::vector<QuadraticElement<double>> gd{fermion_onsite<double>(latd),
                                             fermion_nn<double>(latd, 1, 1.0, 2.0, 1.0, 0.0)};
    auto rd = close(sd, std::span<const QuadraticElement<double>>(gd));
    EXPECT_EQ(re.dimension, rd.dimension);
    check_words_expand(sd, rd, gd);
    // member in float mode
    auto res = member(sd, fermion_named<double>(latd, FermionKind::HX, {2}).element, rd);
    EXPECT_TRUE(res.in_span);
}

TEST(Closure, MixedLatticeRejected) {
    auto lat = fring(5);
    QuadraticSpace<Rational> space(lat);
    std::vector<QE> gens{fermion_onsite(fring(6))};
    EXPECT_THROW(close(space, std::span<const QE>(gens)), LatticeMismatchError);
    std::vector<QE> empty;
    EXPECT_THROW(close(space, std::span<const QE>(empty)), ValidationError);
}

// ---- spin closures ------------------------------------------------------------

TEST(SpinClosure, MatchesDenseOracleSmall) {
    for (int m : {2, 3, 4}) {
        auto lat = sring(m);
        SpinSpace space(lat);
        auto gens = onsite_nn_generators(lat);
        auto rep = close(space, std::span<const SpinElement>(gens));
        // dense oracle over i*H matrices: bracket closure of dense realizations
        std::vector<DenseMatrix<GaussianRational>> dense;
        for (const auto& g : gens) {
            auto d = dense_realize_spin<GaussianRational>(g);
            DenseMatrix<GaussianRational> ih(d.rows(), d.cols());
            for (Eigen::Index i = 0; i < d.rows(); ++i)
                for (Eigen::Index j = 0; j < d.cols(); ++j)
                    ih(i, j) = GaussianRational::i() * d(i, j);
            dense.push_back(std::move(ih));
        }
        EXPECT_EQ(rep.dimension, oracle::dense_lie_closure_dim(dense)) << "m=" << m;
        EXPECT_TRUE(rep.converged);
    }
}

TEST(SpinClosure, NextNearestVerdictsByRingSize) {
    {
        auto lat = sring(4);
        SpinSpace space(lat);
        auto gens = onsite_nn_generators(lat);
        auto rep = close(space, std::span<const SpinElement>(gens));
        EXPECT_EQ(rep.dimension, 57);  // proper subalgebra of the 69-necklace space
        auto n1 = tau_symmetrize(lat, {{0, 1, {0, 1}}, {2, 1, {0, 1}}});
        EXPECT_FALSE(member(space, n1, rep).in_span);
    }
    {
        auto lat = sring(5);
        SpinSpace space(lat);
        auto gens = onsite_nn_generators(lat);
        auto rep = close(space, std::span<const SpinElement>(gens));
        EXPECT_EQ(rep.dimension, 204);
        auto n1 = tau_symmetrize(lat, {{0, 1, {0, 1}}, {2, 1, {0, 1}}});
        auto res = member(space, n1, rep);
        EXPECT_TRUE(res.in_span);
    }
}

TEST(SpinClosure, WordsExpandExactly) {
    auto lat = sring(3);
    SpinSpace space(lat);
    auto gens = onsite_nn_generators(lat);
    auto rep = close(space, std::span<const SpinElement>(gens));
    check_words_expand(space, rep, gens);
}
