#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "rdseed/errors.hpp"
#include "rdseed/initial_data.hpp"
#include "rdseed/optimizer.hpp"

using namespace rdseed;

namespace {

const ReactionModel kBistable = ReactionModel::bistable(0.25);

double weight_sum(const Grid& g, const std::vector<std::size_t>& idx) {
    const auto w = g.weights();
    double s = 0.0;
    for (std::size_t i : idx) s += w[i];
    return s;
}

void expect_admissible(const ScalarField& u, double m) {
    for (double v : u.values) {
        ASSERT_GE(v, 0.0);
        ASSERT_LE(v, 1.0);
    }
    ASSERT_NEAR(mass(u), m, 1e-10 * m);
}

struct SmallProblem {
    Grid grid = Grid::line(-20.0, 20.0, 200);
    TimeConfig tc = TimeConfig::uniform(10.0, 1000);
    double m = 6.0;
    ScalarField init = centered_block(grid, 6.0, 0.0);
};

}  // namespace

TEST(Bathtub, StrictlyDecreasingProfile) {
    const Grid g = Grid::line(0.0, 1.0, 101);
    ScalarField p(g);
    for (std::size_t i = 0; i < 101; ++i) p[i] = 2.0 - g.x().node(i);
    const auto s = bathtub_split(p, 0.5, 1e-6);
    EXPECT_TRUE(s.flat.empty());
    ASSERT_TRUE(s.fractional.has_value());
    EXPECT_EQ(*s.fractional, 50u);
    EXPECT_DOUBLE_EQ(s.c, p[50]);
    ASSERT_EQ(s.upper.size(), 50u);
    EXPECT_EQ(s.upper.back(), 49u);
    EXPECT_NEAR(s.fractional_fill, 0.5, 1e-12);
}

TEST(Bathtub, ConstantProfileIsAllFlat) {
    const Grid g = Grid::line(0.0, 1.0, 50);
    const auto s = bathtub_split(ScalarField(g, 3.0), 0.4, 1e-8);
    EXPECT_EQ(s.c, 3.0);
    EXPECT_EQ(s.flat.size(), 50u);
    EXPECT_TRUE(s.upper.empty());
    EXPECT_TRUE(s.lower.empty());
}

TEST(Bathtub, TwoLevelProfile) {
    const Grid g = Grid::line(0.0, 1.0, 101);
    ScalarField p(g, 1.0);
    for (std::size_t i = 0; i < 30; ++i) p[i] = 2.0;
    const auto s = bathtub_split(p, 0.6, 1e-8);
    EXPECT_EQ(s.c, 1.0);
    EXPECT_EQ(s.flat.size(), 71u);
    EXPECT_NEAR(weight_sum(g, s.upper), 0.295, 1e-14);
}

TEST(Bathtub, PartitionInvariants) {
    std::mt19937_64 rng(17);
    std::uniform_real_distribution<double> U(0.1, 2.0);
    const Grid g = Grid::line(-5.0, 5.0, 301);
    for (int trial = 0; trial < 50; ++trial) {
        ScalarField p(g);
        for (auto& v : p.values) v = U(rng);
        // Some ties so the band is sometimes wider than one node.
        if (trial % 2 == 0) for (std::size_t i = 100; i < 140; ++i) p[i] = 1.0;
        const double m = 0.5 + 9.0 * U(rng) / 2.0;
        const auto s = bathtub_split(p, m, 1e-9);
        std::vector<int> seen(g.size(), 0);
        for (auto* set : {&s.upper, &s.lower, &s.flat}) for (std::size_t i : *set) ++seen[i];
        if (s.fractional) ++seen[*s.fractional];
        for (int c : seen) ASSERT_EQ(c, 1);
        const double mu = weight_sum(g, s.upper);
        EXPECT_LT(mu, m);
        const double band = s.fractional ? g.weights()[*s.fractional] : weight_sum(g, s.flat);
        EXPECT_GE(mu + band, m - 1e-12);
    }
    EXPECT_THROW(bathtub_split(ScalarField(g, 1.0), 10.0, 0.0), ConfigError);
    EXPECT_THROW(bathtub_split(ScalarField(g, 1.0), 0.0, 0.0), ConfigError);
}

TEST(ArcFill, PicksConcaveRoot) {
    const Grid g = Grid::line(0.0, 1.0, 5);
    BathtubSplit s;
    s.c = 2.0;
    s.flat = {1, 2, 3};
    ScalarField p0(g, 2.0), pt0(g, -kBistable.df(0.9) * 2.0);
    const auto fill = singular_arc_fill(kBistable, s, p0, pt0);
    ASSERT_EQ(fill.values.size(), 3u);
    for (double v : fill.values) EXPECT_NEAR(v, 0.9, 1e-10);
    EXPECT_EQ(fill.fallback_cells, 0u);
    EXPECT_EQ(fill.wrong_branch_cells, 0u);
    // f' is symmetric about its vertex 1.25/3, so f'(0.6) is also hit at 2.5/3 - 0.6.
    ScalarField pt1(g, -kBistable.df(0.6) * 2.0);
    const auto convex = singular_arc_fill(kBistable, s, p0, pt1, nullptr, RootRule::convex);
    for (double v : convex.values) EXPECT_NEAR(v, 2.5 / 3.0 - 0.6, 1e-10);
}

TEST(ArcFill, FallbackWhenNoRoot) {
    const Grid g = Grid::line(0.0, 1.0, 5);
    BathtubSplit s;
    s.c = 1.0;
    s.flat = {2};
    const double target = kBistable.df(1.25 / 3.0) + 1.0;
    const auto fill = singular_arc_fill(kBistable, s, ScalarField(g, 1.0), ScalarField(g, -target));
    EXPECT_EQ(fill.fallback_cells, 1u);
    const double expect = std::abs(kBistable.df(0.0) - target) <= std::abs(kBistable.df(1.0) - target) ? 0.0 : 1.0;
    EXPECT_EQ(fill.values[0], expect);
}

TEST(ArcFill, ConcaveReactionUniqueRoot) {
    // f = u - u^2: f' = 1 - 2u is decreasing, f'' = -2.
    const auto f = ReactionModel::cubic(0.0, -1.0, 1.0, 0.0);
    const Grid g = Grid::line(0.0, 1.0, 5);
    BathtubSplit s;
    s.c = 1.0;
    s.flat = {0, 4};
    const auto fill = singular_arc_fill(f, s, ScalarField(g, 1.0), ScalarField(g, -0.4));
    for (double v : fill.values) EXPECT_NEAR(v, 0.3, 1e-12);
}

TEST(RestoreMass, HitsTargetWithinBounds) {
    const Grid g = Grid::line(0.0, 4.0, 41);
    const auto w = g.weights();
    std::mt19937_64 rng(2);
    std::uniform_real_distribution<double> U(0.0, 1.0);
    for (int trial = 0; trial < 20; ++trial) {
        std::vector<double> v(41);
        for (auto& x : v) x = U(rng) < 0.5 ? 0.0 : (U(rng) < 0.5 ? 1.0 : U(rng));
        std::vector<std::size_t> scal, prio(41);
        for (std::size_t i = 0; i < 41; ++i) if (v[i] > 0.0 && v[i] < 1.0) scal.push_back(i);
        std::iota(prio.begin(), prio.end(), std::size_t{0});
        const double m = 0.5 + 3.0 * U(rng);
        restore_mass(v, w, m, scal, prio);
        double s = 0.0;
        for (std::size_t i = 0; i < 41; ++i) {
            ASSERT_GE(v[i], 0.0);
            ASSERT_LE(v[i], 1.0);
            s += w[i] * v[i];
        }
        EXPECT_NEAR(s, m, 1e-12);
    }
}

TEST(FixedPoint, IteratesStayAdmissibleAndAscend) {
    SmallProblem P;
    OptimizeOptions opts;
    auto state = make_state(P.init, kBistable, P.tc, P.m, opts);
    double prev = state.objective;
    for (int it = 0; it < 8 && !state.stalled; ++it) {
        state = fixed_point_step(state, kBistable, P.tc, P.m, opts);
        expect_admissible(state.iterate, P.m);
        EXPECT_GE(state.objective, prev);
        prev = state.objective;
    }
}

TEST(Optimize, TraceMonotoneAndCertificate) {
    SmallProblem P;
    OptimizeOptions opts;
    opts.max_iter = 30;
    const auto r = optimize(P.init, kBistable, P.tc, P.m, opts);
    expect_admissible(r.iterate, P.m);
    ASSERT_FALSE(r.trace.empty());
    for (std::size_t i = 1; i < r.trace.size(); ++i) {
        EXPECT_GE(r.trace[i].objective, r.trace[i - 1].objective);
    }
    EXPECT_GE(r.objective, r.trace.front().objective);
    const auto cert = prop1_certificate(r.iterate, kBistable, r.arc_fallbacks);
    EXPECT_TRUE(cert.passed) << to_text(cert);
    EXPECT_LE(cert.max_fpp_on_arc, 1e-6);

    // Bit-reproducible.
    const auto again = optimize(P.init, kBistable, P.tc, P.m, opts);
    EXPECT_EQ(again.objective, r.objective);
    EXPECT_EQ(again.iterate.values, r.iterate.values);
}

TEST(Optimize, ConvexRootVariantNeverBetter) {
    SmallProblem P;
    OptimizeOptions opts;
    opts.max_iter = 30;
    const auto good = optimize(P.init, kBistable, P.tc, P.m, opts);
    opts.rule = RootRule::convex;
    opts.cleanup = false;
    const auto bad = optimize(P.init, kBistable, P.tc, P.m, opts);
    EXPECT_LE(bad.objective, good.objective);
}

TEST(Optimize, RejectsInadmissibleStart) {
    SmallProblem P;
    EXPECT_THROW(optimize(P.init, kBistable, P.tc, P.m + 1.0), ConfigError);
}

TEST(ArcCertificate, VacuousAndConcaveCases) {
    const Grid g = Grid::line(-5.0, 5.0, 101);
    const auto block = centered_block(g, 2.0, 0.0);
    ScalarField bang = block;
    for (auto& v : bang.values) v = v > 0.5 ? 1.0 : 0.0;
    const auto r = prop1_certificate(bang, kBistable);
    EXPECT_TRUE(r.empty_arc);
    EXPECT_TRUE(r.passed);
    const auto concave = ReactionModel::cubic(0.0, -1.0, 1.0, 0.0);
    EXPECT_TRUE(prop1_certificate(ScalarField(g, 0.3), concave).passed);
    EXPECT_FALSE(prop1_certificate(ScalarField(g, 0.2), kBistable).passed);
    EXPECT_TRUE(prop1_certificate(ScalarField(g, 0.8), kBistable).passed);
}

TEST(Anneal, ZeroTemperatureIsGreedy) {
    SmallProblem P;
    P.tc = TimeConfig::uniform(10.0, 200);
    AnnealConfig cfg;
    cfg.initial_temp = 1e-300;
    cfg.max_evaluations = 200;
    cfg.seed = 5;
    const auto r = simulated_annealing(P.init, kBistable, P.tc, P.m, cfg);
    expect_admissible(r.result.iterate, P.m);
    for (std::size_t i = 1; i < r.trace.size(); ++i) {
        EXPECT_GE(r.trace[i].current, r.trace[i - 1].current);
    }
    EXPECT_GE(r.result.objective, evaluate_objective(P.init, kBistable, P.tc));
}

TEST(Anneal, DeterministicAndAdmissible) {
    SmallProblem P;
    P.tc = TimeConfig::uniform(10.0, 200);
    AnnealConfig cfg;
    cfg.max_evaluations = 300;
    cfg.seed = 42;
    const auto a = simulated_annealing(P.init, kBistable, P.tc, P.m, cfg);
    const auto b = simulated_annealing(P.init, kBistable, P.tc, P.m, cfg);
    EXPECT_EQ(a.result.iterate.values, b.result.iterate.values);
    EXPECT_EQ(a.result.objective, b.result.objective);
    expect_admissible(a.result.iterate, P.m);
    cfg.seed = 43;
    const auto c = simulated_annealing(P.init, kBistable, P.tc, P.m, cfg);
    EXPECT_NE(a.result.iterate.values, c.result.iterate.values);
    expect_admissible(c.result.iterate, P.m);
}

TEST(Anneal, ConfigValidation) {
    AnnealConfig cfg;
    cfg.cooling = 1.0;
    EXPECT_THROW(cfg.validate(), ConfigError);
    cfg.cooling = 0.9;
    cfg.moves_per_temp = 0;
    EXPECT_THROW(cfg.validate(), ConfigError);
}
