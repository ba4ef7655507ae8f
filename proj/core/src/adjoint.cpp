#include "rdseed/adjoint.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "rdseed/errors.hpp"

namespace rdseed {

namespace {

void require_same_grid(const Grid& a, const Grid& b, const char* what) {
    if (!(a == b)) throw ConfigError(std::string(what) + ": field grid differs from trajectory grid");
}

}  // namespace

AdjointTrajectory adjoint_solve(const Trajectory& traj, const ReactionModel& model,
                                const SolverOptions& /*opts*/) {
    if (traj.levels() < 2) throw ConfigError("adjoint_solve: trajectory has fewer than 2 levels");
    AdjointTrajectory adj{Trajectory(traj.grid(), traj.times(), model)};
    Trajectory& p = adj.p;
    const std::size_t last = traj.levels() - 1;
    std::fill(p.at(last).begin(), p.at(last).end(), 1.0);

    detail::Stepper stepper(traj.grid());
    std::vector<double> coeff(traj.nodes());
    const auto& times = traj.times();
    for (std::size_t n = last; n-- > 0;) {
        auto u = traj.at(n);
        for (std::size_t i = 0; i < coeff.size(); ++i) coeff[i] = model.df(u[i]);
        stepper.step(p.at(n + 1), coeff, {}, times[n + 1] - times[n], true, p.at(n));
        detail::guard_values(p.at(n), 1e300, n, times[n]);
    }
    p.update_extremes();
    auto p0 = p.at(0);
    adj.positivity_violated = *std::min_element(p0.begin(), p0.end()) <= 0.0;
    return adj;
}

ScalarField gradient(const AdjointTrajectory& adj) { return adj.initial(); }

double directional_derivative(const AdjointTrajectory& adj, const ScalarField& h0) {
    require_same_grid(adj.p.grid(), h0.grid, "directional_derivative");
    return inner_product(h0.grid, adj.p.at(0), h0.values);
}

Trajectory linearized_solve(const Trajectory& traj, const ReactionModel& model,
                            const ScalarField& h0, const SolverOptions& opts) {
    require_same_grid(traj.grid(), h0.grid, "linearized_solve");
    Trajectory h(traj.grid(), traj.times(), model);
    std::copy(h0.values.begin(), h0.values.end(), h.at(0).begin());
    detail::Stepper stepper(traj.grid());
    std::vector<double> coeff(traj.nodes());
    const auto& times = traj.times();
    const double threshold = std::max(opts.blowup_threshold, 1e300);
    for (std::size_t n = 0; n + 1 < traj.levels(); ++n) {
        auto u = traj.at(n);
        for (std::size_t i = 0; i < coeff.size(); ++i) coeff[i] = model.df(u[i]);
        stepper.step(h.at(n), coeff, {}, times[n + 1] - times[n], false, h.at(n + 1));
        detail::guard_values(h.at(n + 1), threshold, n + 1, times[n + 1]);
    }
    h.update_extremes();
    return h;
}

double hessian_quadratic_form(const Trajectory& traj, const AdjointTrajectory& adj,
                              const ScalarField& h0, const SolverOptions& opts) {
    const ReactionModel& model = traj.model();
    const Trajectory h = linearized_solve(traj, model, h0, opts);
    const auto& times = traj.times();
    std::vector<double> integrand(traj.nodes());
    std::vector<double> level_values(traj.levels());
    for (std::size_t n = 0; n < traj.levels(); ++n) {
        auto u = traj.at(n);
        auto p = adj.p.at(n);
        auto hn = h.at(n);
        for (std::size_t i = 0; i < integrand.size(); ++i) {
            integrand[i] = model.d2f(u[i]) * p[i] * hn[i] * hn[i];
        }
        level_values[n] = integrate(traj.grid(), integrand);
    }
    double total = 0.0;
    for (std::size_t n = 0; n + 1 < traj.levels(); ++n) {
        total += 0.5 * (times[n + 1] - times[n]) * (level_values[n] + level_values[n + 1]);
    }
    return total;
}

ScalarField estimate_pt0(const AdjointTrajectory& adj) {
    if (adj.p.levels() < 2) throw ConfigError("estimate_pt0: adjoint has fewer than 2 levels");
    const double dt = adj.p.times()[1] - adj.p.times()[0];
    auto p0 = adj.p.at(0);
    auto p1 = adj.p.at(1);
    ScalarField out(adj.p.grid(), 0.0);
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = (p1[i] - p0[i]) / dt;
    return out;
}

GradientReport gradient_report(const ScalarField& u0, const ReactionModel& model,
                               const TimeConfig& tc, const ScalarField* direction,
                               const SolverOptions& opts) {
    const Trajectory traj = forward_solve(u0, model, tc, opts);
    const AdjointTrajectory adj = adjoint_solve(traj, model, opts);
    GradientReport report{gradient(adj), std::nullopt, std::nullopt};
    if (direction != nullptr) {
        report.directional = directional_derivative(adj, *direction);
        report.hessian_form = hessian_quadratic_form(traj, adj, *direction, opts);
    }
    return report;
}

std::vector<GradCheckRow> gradient_check(const ScalarField& u0, const ReactionModel& model,
                                         const TimeConfig& tc, const ScalarField& h0,
                                         const std::vector<double>& epsilons,
                                         const SolverOptions& opts) {
    require_same_grid(u0.grid, h0.grid, "gradient_check");
    const GradientReport base = gradient_report(u0, model, tc, nullptr, opts);
    const double adj = inner_product(u0.grid, base.gradient_field.values, h0.values);
    SolverOptions loose = opts;
    loose.check_bounds = false;
    std::vector<GradCheckRow> rows;
    for (double eps : epsilons) {
        if (!(eps > 0.0)) throw ConfigError("gradient_check: epsilon must be positive");
        ScalarField plus = u0, minus = u0;
        for (std::size_t i = 0; i < u0.size(); ++i) {
            plus[i] += eps * h0[i];
            minus[i] -= eps * h0[i];
        }
        const double jp = evaluate_objective(plus, model, tc, loose);
        const double jm = evaluate_objective(minus, model, tc, loose);
        GradCheckRow row;
        row.epsilon = eps;
        row.fd_value = (jp - jm) / (2.0 * eps);
        row.adjoint_value = adj;
        row.rel_error = std::abs(row.fd_value - adj) / std::max(std::abs(row.fd_value), 1e-300);
        rows.push_back(row);
    }
    return rows;
}

namespace {

// Random combination of cosine modes along each axis (products in 2D).
std::vector<double> cosine_mix(const Grid& grid, std::uint64_t seed, int modes, bool with_mean) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> gauss(0.0, 1.0);
    std::vector<double> v(grid.size(), 0.0);
    const Axis& ax = grid.x();
    const Axis& ay = grid.y();
    const int ky_max = grid.dim() == 2 ? modes : 0;
    for (int ky = 0; ky <= ky_max; ++ky) {
        for (int kx = 0; kx <= modes; ++kx) {
            if (!with_mean && kx == 0 && ky == 0) continue;
            const double a = gauss(rng) / (1.0 + kx + ky);
            for (std::size_t j = 0; j < grid.ny(); ++j) {
                const double cy = grid.dim() == 2
                    ? std::cos(ky * M_PI * static_cast<double>(j) / static_cast<double>(ay.n - 1))
                    : 1.0;
                for (std::size_t i = 0; i < ax.n; ++i) {
                    v[j * ax.n + i] += a * cy * std::cos(kx * M_PI * static_cast<double>(i) / static_cast<double>(ax.n - 1));
                }
            }
        }
    }
    return v;
}

}  // namespace

ScalarField random_direction(const Grid& grid, std::uint64_t seed, int modes) {
    if (modes < 1) throw ConfigError("random_direction: need at least one mode");
    std::vector<double> v = cosine_mix(grid, seed, modes, false);
    const double mean = integrate(grid, v) / grid.measure();
    double peak = 0.0;
    for (auto& x : v) {
        x -= mean;
        peak = std::max(peak, std::abs(x));
    }
    for (auto& x : v) x /= peak;
    return ScalarField(grid, std::move(v));
}

ScalarField random_interior_field(const Grid& grid, std::uint64_t seed, double lo, double hi,
                                  int modes) {
    if (!(lo < hi)) throw ConfigError("random_interior_field: need lo < hi");
    std::vector<double> v = cosine_mix(grid, seed, modes, true);
    const auto [mn, mx] = std::minmax_element(v.begin(), v.end());
    const double a = *mn, b = *mx;
    for (auto& x : v) x = b > a ? lo + (hi - lo) * (x - a) / (b - a) : 0.5 * (lo + hi);
    return ScalarField(grid, std::move(v));
}

}  // namespace rdseed
