#include "rdseed/pde.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "rdseed/errors.hpp"
#include "rdseed/tridiagonal.hpp"

namespace rdseed {

Trajectory::Trajectory(Grid grid, std::vector<double> times, ReactionModel model)
    : grid_(grid), times_(std::move(times)), model_(model),
      data_(times_.size() * grid.size(), 0.0) {}

ScalarField Trajectory::field(std::size_t level) const {
    auto s = at(level);
    return ScalarField(grid_, std::vector<double>(s.begin(), s.end()));
}

void Trajectory::update_extremes() {
    if (data_.empty()) return;
    auto [lo, hi] = std::minmax_element(data_.begin(), data_.end());
    min_value_ = *lo;
    max_value_ = *hi;
}

std::size_t trajectory_bytes(const Grid& grid, const TimeConfig& tc) {
    return (tc.steps() + 1) * grid.size() * sizeof(double);
}

void check_envelope(const Grid& grid, const ReactionModel& model, const TimeConfig& tc,
                    const SolverOptions& opts) {
    const double dt = tc.max_dt();
    double h = grid.x().step();
    if (grid.dim() == 2) h = std::min(h, grid.y().step());
    const double ratio = dt / (h * h);
    if (ratio > opts.max_diffusion_ratio) {
        std::ostringstream os;
        os << "dt/dx^2 = " << ratio << " exceeds the Crank-Nicolson envelope "
           << opts.max_diffusion_ratio << "; refine the time mesh";
        throw ConfigError(os.str());
    }
    const double stiff = dt * model.max_abs_df(-0.5, 1.5);
    if (stiff > opts.max_reaction_stiffness) {
        std::ostringstream os;
        os << "dt * max|f'| = " << stiff << " exceeds " << opts.max_reaction_stiffness
           << " for the linearly implicit reaction; refine the time mesh";
        throw ConfigError(os.str());
    }
}

namespace detail {

void guard_values(std::span<const double> v, double threshold, std::size_t step, double t) {
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (!std::isfinite(v[i]) || std::abs(v[i]) > threshold) {
            std::ostringstream os;
            os << "numerical blow-up at step " << step << " (t = " << t << ", node " << i
               << ", value " << v[i] << ")";
            throw NumericalError(os.str());
        }
    }
}

LineStepper::LineStepper(std::size_t n, double dx, bool periodic)
    : n_(n), inv_dx2_(1.0 / (dx * dx)), periodic_(periodic), lower_(n), diag_(n), upper_(n),
      scratch_(n) {}

void LineStepper::step(std::span<const double> in, std::span<const double> coeff,
                       std::span<const double> source, double dt, std::span<double> out) {
    const double a = 0.5 * dt * inv_dx2_;
    const std::size_t n = n_;
    const double* u = in.data();
    const double* c = coeff.data();
    double* o = out.data();
    for (std::size_t i = 1; i + 1 < n; ++i) {
        const double half_j = 0.5 * dt * c[i];
        o[i] = u[i] + a * (u[i - 1] - 2.0 * u[i] + u[i + 1]) + half_j * u[i];
        diag_[i] = 1.0 + 2.0 * a - half_j;
    }
    const double lap0 = periodic_ ? u[n - 1] - 2.0 * u[0] + u[1] : 2.0 * (u[1] - u[0]);
    const double lapn = periodic_ ? u[n - 2] - 2.0 * u[n - 1] + u[0] : 2.0 * (u[n - 2] - u[n - 1]);
    for (std::size_t i : {std::size_t{0}, n - 1}) {
        const double half_j = 0.5 * dt * c[i];
        o[i] = u[i] + a * (i == 0 ? lap0 : lapn) + half_j * u[i];
        diag_[i] = 1.0 + 2.0 * a - half_j;
    }
    if (!source.empty()) {
        for (std::size_t i = 0; i < n; ++i) o[i] += dt * source[i];
    }
    std::fill(lower_.begin(), lower_.end(), -a);
    std::fill(upper_.begin(), upper_.end(), -a);
    if (periodic_) {
        solve_cyclic_tridiagonal(lower_, diag_, upper_, out);
        return;
    }
    // Ghost-node mirror u_{-1} = u_1 doubles the inward coupling at both ends.
    upper_[0] = -2.0 * a;
    lower_[n - 1] = -2.0 * a;
    solve_tridiagonal(lower_, diag_, upper_, out, scratch_);
}

AdiStepper::AdiStepper(const Grid& grid)
    : nx_(grid.nx()), ny_(grid.ny()), inv_dx2_(1.0 / (grid.x().step() * grid.x().step())),
      inv_dy2_(1.0 / (grid.y().step() * grid.y().step())), mid_(grid.size()),
      rhs_(grid.size()) {
    const std::size_t m = std::max(nx_, ny_);
    lower_.resize(m);
    diag_.resize(m);
    upper_.resize(m);
    scratch_.resize(m);
    line_.resize(m);
}

namespace {

// Neumann-mirror second difference of v at position k along a line of length n, where
// element k sits at v[base + k * stride].
inline double mirror_lap(std::span<const double> v, std::size_t base, std::size_t stride,
                         std::size_t k, std::size_t n) {
    const double c = v[base + k * stride];
    if (k == 0) return 2.0 * (v[base + stride] - c);
    if (k + 1 == n) return 2.0 * (v[base + (n - 2) * stride] - c);
    return v[base + (k - 1) * stride] - 2.0 * c + v[base + (k + 1) * stride];
}

}  // namespace

void AdiStepper::half_step(std::span<const double> in, std::span<const double> coeff,
                           std::span<const double> source, double dt, bool implicit_x,
                           std::span<double> out) {
    // Explicit in the other direction, implicit along `implicit_x ? x : y`.
    const double ax = 0.5 * dt * inv_dx2_;
    const double ay = 0.5 * dt * inv_dy2_;
    const double a_impl = implicit_x ? ax : ay;
    const double a_expl = implicit_x ? ay : ax;
    for (std::size_t j = 0; j < ny_; ++j) {
        for (std::size_t i = 0; i < nx_; ++i) {
            const std::size_t idx = j * nx_ + i;
            const double lap = implicit_x ? mirror_lap(in, i, nx_, j, ny_)
                                          : mirror_lap(in, j * nx_, 1, i, nx_);
            rhs_[idx] = in[idx] + a_expl * lap + 0.25 * dt * coeff[idx] * in[idx] +
                        (source.empty() ? 0.0 : 0.5 * dt * source[idx]);
        }
    }
    const std::size_t lines = implicit_x ? ny_ : nx_;
    const std::size_t len = implicit_x ? nx_ : ny_;
    const std::size_t stride = implicit_x ? 1 : nx_;
    for (std::size_t l = 0; l < lines; ++l) {
        const std::size_t base = implicit_x ? l * nx_ : l;
        for (std::size_t k = 0; k < len; ++k) {
            const std::size_t idx = base + k * stride;
            diag_[k] = 1.0 + 2.0 * a_impl - 0.25 * dt * coeff[idx];
            lower_[k] = -a_impl;
            upper_[k] = -a_impl;
            line_[k] = rhs_[idx];
        }
        upper_[0] = -2.0 * a_impl;
        lower_[len - 1] = -2.0 * a_impl;
        std::span<double> x(line_.data(), len);
        solve_tridiagonal(std::span<const double>(lower_.data(), len),
                          std::span<const double>(diag_.data(), len),
                          std::span<const double>(upper_.data(), len), x,
                          std::span<double>(scratch_.data(), len));
        for (std::size_t k = 0; k < len; ++k) out[base + k * stride] = line_[k];
    }
}

void AdiStepper::step(std::span<const double> in, std::span<const double> coeff,
                      std::span<const double> source, double dt, bool reverse,
                      std::span<double> out) {
    half_step(in, coeff, source, dt, !reverse, mid_);
    half_step(mid_, coeff, source, dt, reverse, out);
}

Stepper::Stepper(const Grid& grid)
    : impl_(grid.dim() == 1
                ? std::variant<LineStepper, AdiStepper>(
                      std::in_place_type<LineStepper>, grid.nx(), grid.x().step(), false)
                : std::variant<LineStepper, AdiStepper>(std::in_place_type<AdiStepper>, grid)) {}

void Stepper::step(std::span<const double> in, std::span<const double> coeff,
                   std::span<const double> source, double dt, bool reverse,
                   std::span<double> out) {
    if (auto* line = std::get_if<LineStepper>(&impl_)) {
        line->step(in, coeff, source, dt, out);
    } else {
        std::get<AdiStepper>(impl_).step(in, coeff, source, dt, reverse, out);
    }
}

}  // namespace detail

namespace {

void check_initial(const ScalarField& u0, const SolverOptions& opts) {
    for (std::size_t i = 0; i < u0.size(); ++i) {
        const double v = u0[i];
        if (!std::isfinite(v)) throw ConfigError("initial data contains non-finite values");
        if (opts.check_bounds && (v < -1e-9 || v > 1.0 + 1e-9)) {
            std::ostringstream os;
            os << "initial data outside [0,1] at node " << i << " (value " << v << ")";
            throw ConfigError(os.str());
        }
    }
}

// Advances one forward step of the nonlinear equation from `cur` into `next`.
class ForwardStep {
public:
    ForwardStep(const Grid& grid, const ReactionModel& model)
        : model_(model), stepper_(grid), coeff_(grid.size()), source_(grid.size()) {}

    void operator()(std::span<const double> cur, double dt, std::span<double> next) {
        for (std::size_t i = 0; i < cur.size(); ++i) {
            coeff_[i] = model_.df(cur[i]);
            source_[i] = model_.f(cur[i]) - coeff_[i] * cur[i];
        }
        stepper_.step(cur, coeff_, source_, dt, false, next);
    }

private:
    const ReactionModel& model_;
    detail::Stepper stepper_;
    std::vector<double> coeff_, source_;
};

}  // namespace

Trajectory forward_solve(const ScalarField& u0, const ReactionModel& model,
                         const TimeConfig& tc, const SolverOptions& opts) {
    check_initial(u0, opts);
    check_envelope(u0.grid, model, tc, opts);
    if (trajectory_bytes(u0.grid, tc) > opts.memory_cap_bytes) {
        throw ConfigError("trajectory storage would exceed the memory cap (" +
                          std::to_string(trajectory_bytes(u0.grid, tc)) + " bytes)");
    }
    Trajectory traj(u0.grid, tc.times(), model);
    std::copy(u0.values.begin(), u0.values.end(), traj.at(0).begin());
    ForwardStep step(u0.grid, model);
    for (std::size_t n = 0; n < tc.steps(); ++n) {
        step(traj.at(n), tc.dt(n), traj.at(n + 1));
        detail::guard_values(traj.at(n + 1), opts.blowup_threshold, n + 1, tc.times()[n + 1]);
    }
    traj.update_extremes();
    return traj;
}

Trajectory forward_solve_2d(const ScalarField& u0, const ReactionModel& model,
                            const TimeConfig& tc, const SolverOptions& opts) {
    if (u0.grid.dim() != 2) throw ConfigError("forward_solve_2d: grid is not 2D");
    return forward_solve(u0, model, tc, opts);
}

ScalarField forward_final(const ScalarField& u0, const ReactionModel& model,
                          const TimeConfig& tc, const SolverOptions& opts) {
    check_initial(u0, opts);
    check_envelope(u0.grid, model, tc, opts);
    std::vector<double> cur = u0.values;
    std::vector<double> next(cur.size());
    ForwardStep step(u0.grid, model);
    for (std::size_t n = 0; n < tc.steps(); ++n) {
        step(cur, tc.dt(n), next);
        detail::guard_values(next, opts.blowup_threshold, n + 1, tc.times()[n + 1]);
        cur.swap(next);
    }
    return ScalarField(u0.grid, std::move(cur));
}

double objective(const Trajectory& traj) { return integrate(traj.grid(), traj.final_state()); }

double evaluate_objective(const ScalarField& u0, const ReactionModel& model,
                          const TimeConfig& tc, const SolverOptions& opts) {
    return integrate(forward_final(u0, model, tc, opts));
}

}  // namespace rdseed
