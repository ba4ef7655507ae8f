#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <random>

#include "rdseed/adjoint.hpp"
#include "rdseed/errors.hpp"
#include "rdseed/initial_data.hpp"
#include "rdseed/rearrange.hpp"

using namespace rdseed;

namespace {

const Grid kHalf = Grid::line(0.0, M_PI, 201);
const TimeConfig kShort = TimeConfig::uniform(0.5, 500);
const ReactionModel kSquare = ReactionModel::convex_power(2.0);

TorusField random_torus(std::size_t n, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> U(0.0, 1.0);
    TorusField tf;
    tf.dx = 2 * M_PI / static_cast<double>(n);
    tf.values.resize(n);
    for (auto& v : tf.values) v = std::round(U(rng) * 8.0) / 8.0;  // plenty of ties
    return tf;
}

}  // namespace

TEST(Distribution, IndicatorAndConstant) {
    const Grid g = Grid::line(0.0, 4.0, 41);
    ScalarField u(g, 0.0);
    for (std::size_t i = 10; i <= 20; ++i) u[i] = 1.0;
    const auto mu = distribution_function(u);
    EXPECT_DOUBLE_EQ(mu(1.0), 1.1);
    EXPECT_DOUBLE_EQ(mu(0.5), 1.1);
    EXPECT_DOUBLE_EQ(mu(0.0), 4.0);
    EXPECT_DOUBLE_EQ(mu(-1.0), 4.0);
    EXPECT_EQ(mu(1.5), 0.0);
    const auto c = distribution_function(ScalarField(g, 0.3));
    EXPECT_DOUBLE_EQ(c(0.3), 4.0);
    EXPECT_EQ(c(0.3000001), 0.0);
}

TEST(Distribution, MatchesBruteForceCounting) {
    const auto u = random_interior_field(kHalf, 8, 0.0, 1.0);
    const auto w = kHalf.weights();
    const auto mu = distribution_function(u);
    for (std::size_t i = 1; i < mu.measures.size(); ++i) ASSERT_LE(mu.measures[i], mu.measures[i - 1]);
    EXPECT_NEAR(mu.measures.front(), M_PI, 1e-12);
    for (int l = 0; l < 100; ++l) {
        const double t = -0.05 + 1.1 * l / 99.0;
        double count = 0.0;
        for (std::size_t i = 0; i < u.size(); ++i) if (u[i] >= t) count += w[i];
        ASSERT_NEAR(mu(t), count, 1e-12) << "t=" << t;
    }
}

TEST(Torus, SymmetrizeExtend) {
    const auto tf = symmetrize_extend(ScalarField(kHalf, 0.4));
    EXPECT_EQ(tf.size(), 400u);
    for (double v : tf.values) EXPECT_EQ(v, 0.4);

    ScalarField c(kHalf);
    for (std::size_t i = 0; i < c.size(); ++i) c[i] = std::cos(kHalf.x().node(i));
    const auto tc = symmetrize_extend(c);
    for (std::size_t j = 0; j < tc.size(); ++j) {
        EXPECT_NEAR(tc.values[j], std::cos(tc.position(j)), 1e-12);
    }
    const auto r = random_interior_field(kHalf, 3);
    EXPECT_NEAR(symmetrize_extend(r).mass(), 2.0 * mass(r), 1e-12);
}

TEST(Torus, RearrangementEquimeasurable) {
    for (std::uint64_t s = 1; s <= 10; ++s) {
        const auto tf = random_torus(s % 2 ? 64 : 101, s);
        const auto star = periodic_rearrangement(tf);
        auto a = tf.values, b = star.values;
        std::sort(a.begin(), a.end());
        std::sort(b.begin(), b.end());
        ASSERT_EQ(a, b);
        const std::vector<double> w(tf.size(), tf.dx);
        const auto m1 = distribution_function(tf.values, w);
        const auto m2 = distribution_function(star.values, w);
        ASSERT_EQ(m1.levels, m2.levels);
        ASSERT_EQ(m1.measures, m2.measures);
        EXPECT_NEAR(star.mass(), tf.mass(), 1e-12);
        EXPECT_EQ(periodic_rearrangement(star).values, star.values);
        // Non-increasing away from the center on both sides.
        for (std::size_t j = star.center(); j + 1 < star.size(); ++j) ASSERT_GE(star.values[j], star.values[j + 1]);
        for (std::size_t j = star.center(); j-- > 0;) ASSERT_GE(star.values[j + 1], star.values[j]);
    }
}

TEST(Torus, ArcBecomesCenteredBlock) {
    TorusField tf;
    tf.dx = 2 * M_PI / 100.0;
    tf.values.assign(100, 0.0);
    for (std::size_t j = 90; j < 110; ++j) tf.values[j % 100] = 1.0;  // wraps around
    const auto star = periodic_rearrangement(tf);
    const std::size_t c = star.center();
    for (std::size_t j = 0; j < 100; ++j) {
        const bool inside = j + 10 >= c && j < c + 10;
        EXPECT_EQ(star.values[j], inside ? 1.0 : 0.0) << j;
    }
}

TEST(BlockCheck, ReflectedBlockMatchesBlock) {
    const auto block = interval_indicator(kHalf, 0.0, 1.0);
    const auto mirror = interval_indicator(kHalf, M_PI - 1.0, M_PI);
    for (const auto& f : {kSquare, ReactionModel::bistable(0.25)}) {
        EXPECT_NEAR(evaluate_objective(block, f, kShort), evaluate_objective(mirror, f, kShort), 1e-8);
    }
}

TEST(BlockCheck, LinearReactionDependsOnlyOnMass) {
    const auto lin = ReactionModel::cubic(0.0, 0.0, 0.7, 0.0);
    double lo = 1e300, hi = -1e300;
    for (std::uint64_t s = 0; s < 10; ++s) {
        const auto u = random_profile(kHalf, 1.0, s % 2 == 0, s);
        const double J = evaluate_objective(u, lin, kShort);
        lo = std::min(lo, J);
        hi = std::max(hi, J);
    }
    EXPECT_LE(hi - lo, 1e-8);
}

TEST(BlockCheck, RandomProfilesAdmissible) {
    for (std::uint64_t s = 0; s < 20; ++s) {
        const auto u = random_profile(kHalf, 1.0, s % 2 == 0, s);
        EXPECT_NEAR(mass(u), 1.0, 1e-12);
        for (double v : u.values) {
            ASSERT_GE(v, 0.0);
            ASSERT_LE(v, 1.0);
        }
    }
    EXPECT_THROW(random_profile(kHalf, 4.0, true, 1), ConfigError);
}

TEST(BlockCheck, ConvexAndConcaveSmallSuite) {
    const auto convex = convex_block_check(kSquare, 1.0, kShort, 20, 3);
    EXPECT_TRUE(convex.convex);
    EXPECT_GE(convex.min_margin, -1e-6);
    // f = u - u^2 is concave with f(0) = 0: the block minimizes.
    const auto concave = convex_block_check(ReactionModel::cubic(0.0, -1.0, 1.0, 0.0), 1.0, kShort, 20, 3);
    EXPECT_TRUE(concave.concave);
    EXPECT_LE(concave.max_margin, 1e-6);
    EXPECT_THROW(convex_block_check(ReactionModel::bistable(0.25), 1.0, kShort, 2, 1), ConfigError);
}

TEST(BlockCheck, ExtremePointProjectionNeverWorse) {
    for (std::uint64_t s = 0; s < 50; ++s) {
        const auto u = random_profile(kHalf, 1.0, false, 100 + s);
        const auto bang = extreme_point_projection(u, 1.0);
        EXPECT_NEAR(mass(bang), 1.0, 1e-12);
        std::size_t partial = 0;
        for (double v : bang.values) if (v > 0.0 && v < 1.0) ++partial;
        EXPECT_LE(partial, 1u);
        EXPECT_GE(evaluate_objective(bang, kSquare, kShort), evaluate_objective(u, kSquare, kShort) - 1e-6);
    }
}

TEST(Comparison, BlockDataGivesZeroMargin) {
    const auto block = interval_indicator(kHalf, 0.0, 1.0);
    const auto rep = parabolic_comparison_check(kSquare, block, kShort);
    ASSERT_EQ(rep.rows.size(), 25u);
    for (const auto& r : rep.rows) EXPECT_NEAR(r.margin, 0.0, 1e-12);
}

TEST(Comparison, RandomBangBangProfiles) {
    for (std::uint64_t s = 0; s < 5; ++s) {
        const auto u = random_profile(kHalf, 1.0, true, 7 + s);
        const auto rep = parabolic_comparison_check(kSquare, u, kShort);
        EXPECT_GE(rep.worst_margin, -1e-6);
    }
}

TEST(Comparison, CenteredWindowsConcentrateAtTimeZero) {
    for (std::uint64_t s = 0; s < 5; ++s) {
        const auto tf = symmetrize_extend(random_profile(kHalf, 1.0, s % 2 == 0, 30 + s));
        const auto star = periodic_rearrangement(tf);
        auto sorted = tf.values;
        std::sort(sorted.begin(), sorted.end(), std::greater<>());
        const std::size_t c = star.center();
        double plain = 0.0, concentrated = 0.0, top = 0.0;
        for (std::size_t K = 0; K < c; ++K) {
            plain += tf.values[c - K] + (K > 0 ? tf.values[c + K] : 0.0);
            concentrated += star.values[c - K] + (K > 0 ? star.values[c + K] : 0.0);
            top += sorted[2 * K] + (K > 0 ? sorted[2 * K - 1] : 0.0);
            ASSERT_DOUBLE_EQ(concentrated, top);
            ASSERT_LE(plain, concentrated + 1e-12);
        }
    }
}
