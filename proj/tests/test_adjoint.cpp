#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>

#include "rdseed/adjoint.hpp"
#include "rdseed/errors.hpp"
#include "rdseed/initial_data.hpp"

using namespace rdseed;

namespace {

const ReactionModel kBistable = ReactionModel::bistable(0.25);
const ReactionModel kZero = ReactionModel::cubic(0.0, 0.0, 0.0, 0.0);

// Scalar ODE oracle: v' = f(v) by RK4 on a fine mesh; returns v at `samples` + 1
// equally spaced times together with exp(int_t^T f'(v)) by the trapezoidal rule.
struct OdeOracle {
    std::vector<double> v;
    std::vector<double> p;
};

OdeOracle ode_oracle(const ReactionModel& f, double c, double T, std::size_t samples,
                     std::size_t refine) {
    const std::size_t steps = samples * refine;
    const double h = T / static_cast<double>(steps);
    std::vector<double> v(steps + 1);
    v[0] = c;
    for (std::size_t s = 0; s < steps; ++s) {
        const double x = v[s];
        const double k1 = f.f(x), k2 = f.f(x + 0.5 * h * k1), k3 = f.f(x + 0.5 * h * k2),
                     k4 = f.f(x + h * k3);
        v[s + 1] = x + h * (k1 + 2 * k2 + 2 * k3 + k4) / 6.0;
    }
    std::vector<double> integral(steps + 1, 0.0);
    for (std::size_t s = steps; s-- > 0;) {
        integral[s] = integral[s + 1] + 0.5 * h * (f.df(v[s]) + f.df(v[s + 1]));
    }
    OdeOracle out;
    for (std::size_t k = 0; k <= samples; ++k) {
        out.v.push_back(v[k * refine]);
        out.p.push_back(std::exp(integral[k * refine]));
    }
    return out;
}

ScalarField scaled(const ScalarField& h, double a) {
    ScalarField out = h;
    for (auto& x : out.values) x *= a;
    return out;
}

}  // namespace

TEST(Adjoint, HeatAdjointIsOne) {
    const Grid g = Grid::line(0.0, M_PI, 80);
    const auto traj = forward_solve(random_interior_field(g, 1), kZero, TimeConfig::uniform(1.0, 100));
    const auto adj = adjoint_solve(traj, kZero);
    for (std::size_t n = 0; n < adj.p.levels(); ++n) {
        for (double v : adj.p.at(n)) ASSERT_NEAR(v, 1.0, 1e-13);
    }
    const auto h = random_direction(g, 4);
    EXPECT_NEAR(directional_derivative(adj, h), 0.0, 1e-13);
    for (double v : estimate_pt0(adj).values) EXPECT_NEAR(v, 0.0, 1e-10);
    EXPECT_FALSE(adj.positivity_violated);
}

TEST(Adjoint, TerminalConditionAndPositivity) {
    const Grid g = Grid::line(-20.0, 20.0, 160);
    const auto traj = forward_solve(centered_block(g, 6.0, 0.0), kBistable, TimeConfig::uniform(10.0, 1000));
    const auto adj = adjoint_solve(traj, kBistable);
    for (double v : adj.p.final_state()) EXPECT_EQ(v, 1.0);
    EXPECT_GT(adj.p.min_value(), 0.0);
    EXPECT_FALSE(adj.positivity_violated);
}

TEST(Adjoint, SpatiallyConstantMatchesOdeOracle) {
    const Grid g = Grid::line(0.0, 5.0, 20);
    const double T = 4.0;
    const std::size_t nt = 40000;  // the adjoint step is first order in dt
    for (double c : {0.3, 0.6}) {
        const auto traj = forward_solve(ScalarField(g, c), kBistable, TimeConfig::uniform(T, nt));
        const auto adj = adjoint_solve(traj, kBistable);
        const auto oracle = ode_oracle(kBistable, c, T, nt, 4);
        for (std::size_t n = 0; n <= nt; n += 4000) {
            for (double v : adj.p.at(n)) ASSERT_NEAR(v, oracle.p[n], 1e-4 * oracle.p[n]) << "level " << n;
        }
        // p_t(0) = -f'(u(0)) p(0) for the constant state.
        const auto pt = estimate_pt0(adj);
        const double expected = -kBistable.df(c) * adj.p.at(0)[0];
        EXPECT_NEAR(pt[0], expected, 10.0 * T / nt * std::abs(expected) + 1e-3);
    }
}

TEST(Adjoint, Pt0FirstOrderUnderRefinement) {
    const Grid g = Grid::line(0.0, 5.0, 20);
    const double c = 0.6, T = 2.0;
    std::vector<double> errs;
    for (std::size_t nt : {500u, 1000u, 2000u}) {
        const auto traj = forward_solve(ScalarField(g, c), kBistable, TimeConfig::uniform(T, nt));
        const auto adj = adjoint_solve(traj, kBistable);
        const double expected = -kBistable.df(c) * adj.p.at(0)[0];
        errs.push_back(std::abs(estimate_pt0(adj)[0] - expected));
    }
    EXPECT_NEAR(errs[0] / errs[1], 2.0, 0.3);
    EXPECT_NEAR(errs[1] / errs[2], 2.0, 0.3);
}

TEST(Adjoint, DirectionalDerivativeIsLinear) {
    const Grid g = Grid::line(-10.0, 10.0, 120);
    const auto u0 = random_interior_field(g, 5);
    const auto rep = gradient_report(u0, kBistable, TimeConfig::uniform(5.0, 500));
    const auto traj = forward_solve(u0, kBistable, TimeConfig::uniform(5.0, 500));
    const auto adj = adjoint_solve(traj, kBistable);
    const auto h = random_direction(g, 6);
    const double d = directional_derivative(adj, h);
    EXPECT_DOUBLE_EQ(directional_derivative(adj, scaled(h, 3.0)), 3.0 * d);
    EXPECT_DOUBLE_EQ(directional_derivative(adj, scaled(h, -0.5)), -0.5 * d);
    for (double v : rep.gradient_field.values) EXPECT_GT(v, 0.0);
}

TEST(Adjoint, GradientMatchesCentralDifferences) {
    const Grid g = Grid::line(-50.0, 50.0, 200);
    const auto u0 = random_interior_field(g, 12);
    const auto h = random_direction(g, 13);
    const auto coarse = gradient_check(u0, kBistable, TimeConfig::uniform(5.0, 2000), h, {1e-4});
    const auto fine = gradient_check(u0, kBistable, TimeConfig::uniform(5.0, 4000), h, {1e-4});
    EXPECT_LE(coarse[0].rel_error, 1e-3);
    EXPECT_LT(fine[0].rel_error, coarse[0].rel_error);
}

TEST(Linearized, ZeroDataStaysZero) {
    const Grid g = Grid::line(-10.0, 10.0, 80);
    const auto traj = forward_solve(random_interior_field(g, 3), kBistable, TimeConfig::uniform(2.0, 200));
    const auto h = linearized_solve(traj, kBistable, ScalarField(g, 0.0));
    EXPECT_EQ(h.min_value(), 0.0);
    EXPECT_EQ(h.max_value(), 0.0);
}

TEST(Linearized, NeumannEigenfunction) {
    const std::size_t n = 161;
    const Grid g = Grid::line(0.0, M_PI, n);
    const double T = 0.5;
    const auto traj = forward_solve(ScalarField(g, 0.5), kZero, TimeConfig::uniform(T, 1000));
    for (int k : {1, 3}) {
        ScalarField h0(g);
        for (std::size_t i = 0; i < n; ++i) h0[i] = std::cos(k * g.x().node(i));
        const auto h = linearized_solve(traj, kZero, h0);
        const auto last = h.final_state();
        for (std::size_t i = 0; i < n; ++i) {
            ASSERT_NEAR(last[i], std::exp(-k * k * T) * h0[i], 1e-4);
        }
    }
}

TEST(Linearized, Superposition) {
    const Grid g = Grid::line(-10.0, 10.0, 100);
    const auto traj = forward_solve(random_interior_field(g, 7), kBistable, TimeConfig::uniform(3.0, 300));
    const auto g1 = random_direction(g, 1), g2 = random_direction(g, 2);
    const double a = 0.7, b = -1.3;
    ScalarField mix(g);
    for (std::size_t i = 0; i < mix.size(); ++i) mix[i] = a * g1[i] + b * g2[i];
    const auto h1 = linearized_solve(traj, kBistable, g1);
    const auto h2 = linearized_solve(traj, kBistable, g2);
    const auto hm = linearized_solve(traj, kBistable, mix);
    for (std::size_t n = 0; n < traj.levels(); ++n) {
        for (std::size_t i = 0; i < mix.size(); ++i) {
            ASSERT_NEAR(hm.at(n)[i], a * h1.at(n)[i] + b * h2.at(n)[i], 1e-12);
        }
    }
}

TEST(Hessian, LinearReactionGivesZero) {
    const auto lin = ReactionModel::cubic(0.0, 0.0, 0.4, 0.0);
    const Grid g = Grid::line(0.0, 5.0, 60);
    const auto tc = TimeConfig::uniform(1.0, 100);
    const auto u0 = random_interior_field(g, 2);
    const auto h = random_direction(g, 3);
    const auto rep = gradient_report(u0, lin, tc, &h);
    EXPECT_EQ(*rep.hessian_form, 0.0);
}

TEST(Hessian, ConvexReactionPositiveAndEven) {
    const auto cvx = ReactionModel::convex_power(2.0);
    const Grid g = Grid::line(0.0, M_PI, 101);
    const auto tc = TimeConfig::uniform(0.5, 500);
    const auto u0 = random_interior_field(g, 4, 0.0, 0.5);
    const auto traj = forward_solve(u0, cvx, tc);
    const auto adj = adjoint_solve(traj, cvx);
    for (std::uint64_t s = 1; s <= 3; ++s) {
        const auto h = random_direction(g, s);
        const double q = hessian_quadratic_form(traj, adj, h);
        EXPECT_GT(q, 0.0);
        EXPECT_EQ(hessian_quadratic_form(traj, adj, scaled(h, -1.0)), q);
    }
}

TEST(Hessian, MatchesSecondDifferences) {
    const Grid g = Grid::line(-20.0, 20.0, 160);
    const auto tc = TimeConfig::uniform(5.0, 1000);
    SolverOptions loose;
    loose.check_bounds = false;
    for (std::uint64_t s = 1; s <= 3; ++s) {
        const auto u0 = random_interior_field(g, 20 + s, 0.2, 0.8);
        const auto h = random_direction(g, 40 + s);
        const auto traj = forward_solve(u0, kBistable, tc);
        const auto adj = adjoint_solve(traj, kBistable);
        const double q = hessian_quadratic_form(traj, adj, h);
        const double eps = 1e-3;
        ScalarField up = u0, dn = u0;
        for (std::size_t i = 0; i < u0.size(); ++i) {
            up[i] += eps * h[i];
            dn[i] -= eps * h[i];
        }
        const double fd = (evaluate_objective(up, kBistable, tc, loose) - 2 * objective(traj) +
                           evaluate_objective(dn, kBistable, tc, loose)) / (eps * eps);
        EXPECT_NEAR(q, fd, 1e-2 * std::abs(fd)) << "seed " << s;
    }
}

TEST(Adjoint, GridMismatchIsConfigError) {
    const Grid g = Grid::line(0.0, 1.0, 20);
    const auto traj = forward_solve(ScalarField(g, 0.5), kBistable, TimeConfig::uniform(1.0, 10));
    const auto adj = adjoint_solve(traj, kBistable);
    EXPECT_THROW(directional_derivative(adj, ScalarField(Grid::line(0.0, 1.0, 21), 0.0)), ConfigError);
    EXPECT_THROW(random_direction(g, 1, 0), ConfigError);
}
