#include "rdseed/rearrange.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <sstream>

#include "rdseed/errors.hpp"
#include "rdseed/initial_data.hpp"

namespace rdseed {

double DistributionFunction::operator()(double t) const {
    const auto it = std::lower_bound(levels.begin(), levels.end(), t);
    if (it == levels.end()) return 0.0;
    return measures[static_cast<std::size_t>(it - levels.begin())];
}

DistributionFunction distribution_function(std::span<const double> values,
                                           std::span<const double> weights) {
    if (values.size() != weights.size()) throw ConfigError("distribution_function: size mismatch");
    std::vector<std::size_t> order(values.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });

    DistributionFunction mu;
    // Walk from the top so each measure is a suffix sum.
    double acc = 0.0;
    for (std::size_t k = order.size(); k-- > 0;) {
        const double v = values[order[k]];
        if (!std::isfinite(v)) throw NumericalError("distribution_function: non-finite value");
        acc += weights[order[k]];
        if (!mu.levels.empty() && mu.levels.back() == v) {
            mu.measures.back() = acc;
        } else {
            mu.levels.push_back(v);
            mu.measures.push_back(acc);
        }
    }
    std::reverse(mu.levels.begin(), mu.levels.end());
    std::reverse(mu.measures.begin(), mu.measures.end());
    return mu;
}

DistributionFunction distribution_function(const ScalarField& field) {
    const auto w = field.grid.weights();
    return distribution_function(field.values, w);
}

double TorusField::position(std::size_t j) const {
    return (static_cast<double>(j) - static_cast<double>(center())) * dx;
}

double TorusField::mass() const {
    double s = 0.0;
    for (double v : values) s += v;
    return s * dx;
}

TorusField symmetrize_extend(const ScalarField& field) {
    if (field.grid.dim() != 1) throw ConfigError("symmetrize_extend: field is not 1D");
    const std::size_t n = field.size();
    TorusField tf;
    tf.dx = field.grid.x().step();
    tf.values.resize(2 * (n - 1));
    // Node j holds position k = j - (n - 2), k in [-(n-2), n-1]; value u(|k|).
    for (std::size_t j = 0; j < tf.values.size(); ++j) {
        const long k = static_cast<long>(j) - static_cast<long>(n - 2);
        tf.values[j] = field[static_cast<std::size_t>(std::labs(k))];
    }
    return tf;
}

TorusField periodic_rearrangement(const TorusField& tf) {
    std::vector<double> sorted = tf.values;
    std::stable_sort(sorted.begin(), sorted.end(), std::greater<>());
    TorusField out;
    out.dx = tf.dx;
    out.values.assign(tf.size(), 0.0);
    const long c = static_cast<long>(tf.center());
    const long n = static_cast<long>(tf.size());
    long left = c - 1, right = c + 1;
    out.values[static_cast<std::size_t>(c)] = sorted[0];
    for (std::size_t k = 1; k < sorted.size(); ++k) {
        const bool go_left = left >= 0 && (k % 2 == 1 || right >= n);
        if (go_left) {
            out.values[static_cast<std::size_t>(left--)] = sorted[k];
        } else {
            out.values[static_cast<std::size_t>(right++)] = sorted[k];
        }
    }
    return out;
}

std::vector<std::vector<double>> torus_solve(const TorusField& tf, const ReactionModel& model,
                                             const TimeConfig& tc, const SolverOptions& opts) {
    const std::size_t n = tf.size();
    if (n < 4) throw ConfigError("torus_solve: need at least 4 nodes");
    const double stiff = tc.max_dt() * model.max_abs_df(-0.5, 1.5);
    if (stiff > opts.max_reaction_stiffness) {
        throw ConfigError("torus_solve: dt * max|f'| exceeds the envelope; refine the time mesh");
    }
    detail::LineStepper stepper(n, tf.dx, true);
    std::vector<double> coeff(n), source(n);
    std::vector<std::vector<double>> levels;
    levels.reserve(tc.steps() + 1);
    levels.push_back(tf.values);
    for (std::size_t s = 0; s < tc.steps(); ++s) {
        const auto& cur = levels.back();
        for (std::size_t i = 0; i < n; ++i) {
            coeff[i] = model.df(cur[i]);
            source[i] = model.f(cur[i]) - coeff[i] * cur[i];
        }
        std::vector<double> next(n);
        stepper.step(cur, coeff, source, tc.dt(s), next);
        detail::guard_values(next, opts.blowup_threshold, s + 1, tc.times()[s + 1]);
        levels.push_back(std::move(next));
    }
    return levels;
}

ScalarField extreme_point_projection(const ScalarField& field, double m) {
    const auto w = field.grid.weights();
    std::vector<std::size_t> order(field.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return field[a] > field[b]; });
    ScalarField out(field.grid, 0.0);
    double left = m;
    for (std::size_t i : order) {
        if (left <= 0.0) break;
        out[i] = std::min(1.0, left / w[i]);
        left -= out[i] * w[i];
    }
    return out;
}

ScalarField random_profile(const Grid& grid, double m, bool bang_bang, std::uint64_t seed) {
    if (grid.dim() != 1) throw ConfigError("random_profile: grid is not 1D");
    const Axis& ax = grid.x();
    if (!(m > 0.0) || !(m < ax.length())) throw ConfigError("random_profile: mass outside (0, |Omega|)");
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> unit(0.0, 1.0);

    if (bang_bang) {
        // k intervals with random lengths summing to m, separated by random gaps.
        const std::size_t k = 1 + static_cast<std::size_t>(unit(rng) * 4.0);
        auto partition = [&](std::size_t parts, double total) {
            std::vector<double> p(parts);
            for (auto& v : p) v = 0.05 + unit(rng);
            const double s = std::accumulate(p.begin(), p.end(), 0.0);
            for (auto& v : p) v *= total / s;
            return p;
        };
        const auto lengths = partition(k, m);
        const auto gaps = partition(k + 1, ax.length() - m);
        ScalarField u(grid, 0.0);
        double x = ax.lo;
        for (std::size_t i = 0; i < k; ++i) {
            x += gaps[i];
            const ScalarField piece = interval_indicator(grid, x, std::min(ax.hi, x + lengths[i]));
            for (std::size_t j = 0; j < u.size(); ++j) u[j] = std::min(1.0, u[j] + piece[j]);
            x += lengths[i];
        }
        return u;
    }

    // Sum of a few Gaussian bumps, clipped to [0, 1] after a mass-fixing shift.
    const std::size_t bumps = 1 + static_cast<std::size_t>(unit(rng) * 5.0);
    std::vector<double> g(grid.size(), 0.0);
    for (std::size_t b = 0; b < bumps; ++b) {
        const double c = ax.lo + unit(rng) * ax.length();
        const double s = 0.1 + 0.5 * unit(rng) * ax.length();
        const double a = 0.2 + 1.5 * unit(rng);
        for (std::size_t i = 0; i < g.size(); ++i) {
            const double d = (ax.node(i) - c) / s;
            g[i] += a * std::exp(-0.5 * d * d);
        }
    }
    auto mass_at = [&](double shift) {
        double s = 0.0;
        for (std::size_t i = 0; i < g.size(); ++i) s += ax.weight(i) * std::clamp(g[i] + shift, 0.0, 1.0);
        return s;
    };
    const auto [gmin, gmax] = std::minmax_element(g.begin(), g.end());
    double lo = -*gmax, hi = 1.0 - *gmin;
    for (int it = 0; it < 200 && hi - lo > 1e-15; ++it) {
        const double mid = 0.5 * (lo + hi);
        (mass_at(mid) < m ? lo : hi) = mid;
    }
    ScalarField u(grid, 0.0);
    for (std::size_t i = 0; i < u.size(); ++i) u[i] = std::clamp(g[i] + 0.5 * (lo + hi), 0.0, 1.0);
    // Remove the bisection residue on the unsaturated nodes.
    const auto w = grid.weights();
    double free_mass = 0.0, fixed = 0.0;
    for (std::size_t i = 0; i < u.size(); ++i) {
        if (u[i] > 0.0 && u[i] < 1.0) free_mass += w[i] * u[i];
        else fixed += w[i] * u[i];
    }
    if (free_mass > 0.0) {
        const double s = (m - fixed) / free_mass;
        for (auto& v : u.values) {
            if (v > 0.0 && v < 1.0) v = std::min(1.0, v * s);
        }
    }
    return u;
}

namespace {

int curvature_class(const ReactionModel& model) {
    bool convex = true, concave = true;
    for (int k = 0; k <= 200; ++k) {
        const double v = k / 200.0;
        const double s = model.d2f(v);
        if (s < -1e-12) convex = false;
        if (s > 1e-12) concave = false;
    }
    return (convex ? 1 : 0) | (concave ? 2 : 0);
}

}  // namespace

BlockCheckReport convex_block_check(const ReactionModel& model, double m, const TimeConfig& tc,
                                    std::size_t trials, std::uint64_t seed, std::size_t n,
                                    const SolverOptions& opts) {
    if (std::abs(model.f(0.0)) > 1e-14) throw ConfigError("convex_block_check: requires f(0) = 0");
    const int cls = curvature_class(model);
    if (cls == 0) throw ConfigError("convex_block_check: f is neither convex nor concave on [0,1]");
    const Grid grid = Grid::line(0.0, M_PI, n);
    if (!(m > 0.0) || !(m < M_PI)) throw ConfigError("convex_block_check: m must lie in (0, pi)");

    BlockCheckReport rep;
    rep.convex = cls & 1;
    rep.concave = cls & 2;
    const ScalarField block = interval_indicator(grid, 0.0, m);
    double j_block = 0.0;
    try {
        j_block = evaluate_objective(block, model, tc, opts);
    } catch (const NumericalError& e) {
        throw NumericalError(std::string(e.what()) + "; reduce T for this convex model");
    }
    rep.min_margin = std::numeric_limits<double>::infinity();
    rep.max_margin = -std::numeric_limits<double>::infinity();
    std::mt19937_64 seeder(seed);
    for (std::size_t t = 0; t < trials; ++t) {
        const bool bang = t % 2 == 0;
        const ScalarField u0 = random_profile(grid, m, bang, seeder());
        BlockCheckRow row;
        row.trial = t;
        row.description = bang ? "bang_bang" : "smooth";
        row.j_block = j_block;
        row.j_candidate = evaluate_objective(u0, model, tc, opts);
        row.margin = j_block - row.j_candidate;
        rep.min_margin = std::min(rep.min_margin, row.margin);
        rep.max_margin = std::max(rep.max_margin, row.margin);
        rep.rows.push_back(std::move(row));
    }
    return rep;
}

ComparisonReport parabolic_comparison_check(const ReactionModel& model, const ScalarField& u0,
                                            const TimeConfig& tc, std::size_t t_samples,
                                            std::size_t r_samples, const SolverOptions& opts) {
    if (t_samples == 0 || r_samples == 0) throw ConfigError("parabolic_comparison_check: no samples");
    const TorusField ext = symmetrize_extend(u0);
    const TorusField star = periodic_rearrangement(ext);
    const auto u = torus_solve(ext, model, tc, opts);
    const auto v = torus_solve(star, model, tc, opts);
    const auto& times = tc.times();
    const std::size_t c = ext.center();
    const std::size_t max_half = ext.size() / 2 - 1;

    ComparisonReport rep;
    rep.worst_margin = std::numeric_limits<double>::infinity();
    std::vector<double> sorted;
    for (std::size_t a = 1; a <= t_samples; ++a) {
        const double t_target = tc.final_time() * static_cast<double>(a) / static_cast<double>(t_samples);
        const auto it = std::lower_bound(times.begin(), times.end(), t_target - 1e-12);
        const std::size_t level = static_cast<std::size_t>(it - times.begin());
        sorted = u[level];
        std::sort(sorted.begin(), sorted.end(), std::greater<>());
        for (std::size_t b = 1; b <= r_samples; ++b) {
            const double r = M_PI * static_cast<double>(b) / static_cast<double>(r_samples + 1);
            const std::size_t half = std::min<std::size_t>(max_half, static_cast<std::size_t>(std::lround(r / ext.dx)));
            ComparisonRow row;
            row.t = times[level];
            row.r = r;
            for (std::size_t j = c - half; j <= c + half; ++j) row.lhs += v[level][j];
            for (std::size_t j = 0; j < 2 * half + 1; ++j) row.rhs += sorted[j];
            row.lhs *= ext.dx;
            row.rhs *= ext.dx;
            row.margin = row.lhs - row.rhs;
            rep.worst_margin = std::min(rep.worst_margin, row.margin);
            rep.rows.push_back(row);
        }
    }
    return rep;
}

std::string to_csv(const BlockCheckReport& report) {
    std::ostringstream os;
    os.precision(17);
    os << "trial,description,J_block,J_candidate,margin\n";
    for (const auto& r : report.rows) {
        os << r.trial << ',' << r.description << ',' << r.j_block << ',' << r.j_candidate << ','
           << r.margin << '\n';
    }
    return os.str();
}

std::string to_csv(const ComparisonReport& report) {
    std::ostringstream os;
    os.precision(17);
    os << "t,r,lhs,rhs,margin\n";
    for (const auto& r : report.rows) {
        os << r.t << ',' << r.r << ',' << r.lhs << ',' << r.rhs << ',' << r.margin << '\n';
    }
    return os.str();
}

}  // namespace rdseed
