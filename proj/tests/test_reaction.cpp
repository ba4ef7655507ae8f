#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "rdseed/errors.hpp"
#include "rdseed/reaction.hpp"

using namespace rdseed;

namespace {

// Both roots of f'(v) = t for a cubic c3 v^3 + c2 v^2 + c1 v + c0.
std::vector<double> quadratic_roots(const ReactionModel& m, double t) {
    const auto& c = m.coefficients();
    const double a = 3.0 * c[0], b = 2.0 * c[1], cc = c[2] - t;
    const double disc = b * b - 4.0 * a * cc;
    if (disc < 0.0) return {};
    const double s = std::sqrt(disc);
    std::vector<double> r{(-b - s) / (2.0 * a), (-b + s) / (2.0 * a)};
    std::sort(r.begin(), r.end());
    return r;
}

}  // namespace

TEST(Reaction, BistableValues) {
    const auto f = ReactionModel::bistable(0.25);
    EXPECT_EQ(f.f(0.0), 0.0);
    EXPECT_EQ(f.f(1.0), 0.0);
    EXPECT_NEAR(f.f(0.25), 0.0, 1e-15);
    const double vertex = 1.25 / 3.0;
    EXPECT_NEAR(f.d2f(vertex), 0.0, 1e-14);
    EXPECT_NEAR(f.d2f(0.3), -6.0 * 0.3 + 2.5, 1e-14);
}

TEST(Reaction, MonostableAndConvexEndpoints) {
    const auto g = ReactionModel::monostable(0.25);
    EXPECT_EQ(g.f(0.0), 0.0);
    EXPECT_NEAR(g.f(1.0), 0.0, 1e-15);
    const auto c = ReactionModel::convex_power(2.0);
    EXPECT_EQ(c.f(0.0), 0.0);
    EXPECT_DOUBLE_EQ(c.f(0.6), 0.18);
    for (double v : {-0.5, -0.1, 0.0, 0.4, 1.5}) EXPECT_GE(c.d2f(v), 0.0);
}

TEST(Reaction, RejectsBadParameters) {
    EXPECT_THROW(ReactionModel::bistable(0.0), ConfigError);
    EXPECT_THROW(ReactionModel::bistable(1.2), ConfigError);
    EXPECT_THROW(ReactionModel::convex_power(1.0), ConfigError);
    EXPECT_THROW(ReactionModel::cubic(NAN, 0, 0, 0), ConfigError);
}

TEST(Reaction, FirstDerivativeAtHalf) {
    const auto f = ReactionModel::bistable(0.25);
    const double h = 1e-6;
    const double fd = (f.f(0.5 + h) - f.f(0.5 - h)) / (2 * h);
    EXPECT_NEAR(f.eval(1, 0.5), fd, 1e-8);
}

TEST(Reaction, DerivativeConsistencyRandom) {
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> U(0.0, 1.0);
    const double h = 1e-5;
    for (const auto& model : {ReactionModel::bistable(0.25), ReactionModel::monostable(0.3),
                              ReactionModel::convex_power(2.5),
                              ReactionModel::cubic(0.7, -1.1, 0.2, 0.05)}) {
        for (int s = 0; s < 1000; ++s) {
            // Stay clear of the kink of |u|^a at 0.
            const double v = model.kind() == ReactionKind::convex_power ? 0.01 + 0.99 * U(rng) : U(rng);
            for (int k = 1; k <= 2; ++k) {
                const double fd = (model.eval(k - 1, v + h) - model.eval(k - 1, v - h)) / (2 * h);
                ASSERT_NEAR(model.eval(k, v), fd, 1e-6) << model.describe() << " v=" << v;
            }
        }
    }
}

TEST(Reaction, ConcavitySigns) {
    const auto f = ReactionModel::bistable(0.25);
    EXPECT_EQ(concavity_sign(f, 0.9), -1);
    EXPECT_EQ(concavity_sign(f, 0.1), 1);
    EXPECT_EQ(concavity_sign(f, 1.25 / 3.0), 0);
    const auto c = ReactionModel::convex_power(2.0);
    for (double v : {0.0, 0.3, 1.0}) EXPECT_EQ(concavity_sign(c, v), 1);
}

TEST(Reaction, FprimeTwoRootsQuadraticOracle) {
    const auto f = ReactionModel::bistable(0.25);
    const double target = f.df(0.9);
    const auto oracle = quadratic_roots(f, target);
    ASSERT_EQ(oracle.size(), 2u);
    // The companion root of 0.9 sits at 2.5/3 - 0.9 < 0, so both show up only on the
    // extended range.
    const auto roots = solve_fprime(f, target, -0.5, 1.5);
    ASSERT_EQ(roots.size(), 2u);
    int concave = 0;
    for (std::size_t i = 0; i < 2; ++i) {
        EXPECT_NEAR(roots[i].value, oracle[i], 1e-10);
        if (roots[i].concavity == -1) {
            ++concave;
            EXPECT_NEAR(roots[i].value, 0.9, 1e-10);
        }
    }
    EXPECT_EQ(concave, 1);
    const auto unit = solve_fprime(f, target, 0.0, 1.0);
    ASSERT_EQ(unit.size(), 1u);
    EXPECT_NEAR(unit[0].value, 0.9, 1e-10);
    EXPECT_EQ(unit[0].concavity, -1);
    // f'(0.6) has both roots inside [0, 1].
    const auto both = solve_fprime(f, f.df(0.6), 0.0, 1.0);
    ASSERT_EQ(both.size(), 2u);
    EXPECT_NEAR(both[0].value, 2.5 / 3.0 - 0.6, 1e-10);
    EXPECT_EQ(both[0].concavity, 1);
    EXPECT_NEAR(both[1].value, 0.6, 1e-10);
    EXPECT_EQ(both[1].concavity, -1);
}

TEST(Reaction, FprimeVertexTangency) {
    const auto f = ReactionModel::bistable(0.25);
    const double vertex = 1.25 / 3.0;
    const auto roots = solve_fprime(f, f.df(vertex), 0.0, 1.0);
    ASSERT_EQ(roots.size(), 1u);
    EXPECT_NEAR(roots[0].value, vertex, 1e-6);
}

TEST(Reaction, FprimeAboveMaximumIsEmpty) {
    const auto f = ReactionModel::bistable(0.25);
    EXPECT_TRUE(solve_fprime(f, f.df(1.25 / 3.0) + 1.0, 0.0, 1.0).empty());
}

TEST(Reaction, FprimeMatchesDenseSampling) {
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> U(0.0, 1.0);
    const auto f = ReactionModel::bistable(0.25);
    const int N = 10000;
    for (int s = 0; s < 200; ++s) {
        const double target = -0.6 + 0.9 * U(rng);
        std::vector<double> sampled;
        double prev = f.df(0.0) - target;
        for (int i = 1; i <= N; ++i) {
            const double v = static_cast<double>(i) / N;
            const double cur = f.df(v) - target;
            if ((prev < 0.0) != (cur < 0.0)) sampled.push_back(v);
            prev = cur;
        }
        const auto roots = solve_fprime(f, target, 0.0, 1.0);
        ASSERT_EQ(roots.size(), sampled.size()) << "target " << target;
        ASSERT_LE(roots.size(), 2u);
        int concave = 0;
        for (std::size_t i = 0; i < roots.size(); ++i) {
            EXPECT_NEAR(roots[i].value, sampled[i], 1.0 / N);
            EXPECT_LE(std::abs(f.df(roots[i].value) - target), 1e-12);
            if (roots[i].concavity == -1) ++concave;
        }
        EXPECT_LE(concave, 1);
    }
}
