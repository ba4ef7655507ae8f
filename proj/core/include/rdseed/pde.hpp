#pragma once

#include <cstddef>
#include <span>
#include <variant>
#include <vector>

#include "rdseed/grid.hpp"
#include "rdseed/reaction.hpp"
#include "rdseed/time_mesh.hpp"

namespace rdseed {

struct SolverOptions {
    /// Abort when |u| exceeds this at any node (convex f has no upper equilibrium).
    double blowup_threshold = 1e3;
    /// Largest accepted dt / dx^2. Crank-Nicolson is A-stable, but past this ratio the
    /// stiffest grid modes are amplified by nearly -1 per step and rough data rings.
    double max_diffusion_ratio = 1e4;
    /// The linearly implicit reaction keeps the implicit matrix diagonally dominant only
    /// while dt * max|f'| <= this bound (max taken on the extended range [-0.5, 1.5]).
    double max_reaction_stiffness = 1.0;
    /// Cap on the estimated in-memory footprint of a stored trajectory.
    std::size_t memory_cap_bytes = std::size_t{4} << 30;
    /// Reject initial data outside [0, 1] (with a 1e-9 slack).
    bool check_bounds = true;
};

/// Time history of nodal fields on a fixed grid, stored contiguously (level-major).
class Trajectory {
public:
    Trajectory() = default;
    Trajectory(Grid grid, std::vector<double> times, ReactionModel model);

    const Grid& grid() const { return grid_; }
    const ReactionModel& model() const { return model_; }
    const std::vector<double>& times() const { return times_; }
    std::size_t levels() const { return times_.size(); }
    std::size_t nodes() const { return grid_.size(); }

    std::span<const double> at(std::size_t level) const {
        return {data_.data() + level * nodes(), nodes()};
    }
    std::span<double> at(std::size_t level) { return {data_.data() + level * nodes(), nodes()}; }
    std::span<const double> final_state() const { return at(levels() - 1); }
    ScalarField field(std::size_t level) const;

    /// Extremes over every stored value (maximum-principle monitor).
    double min_value() const { return min_value_; }
    double max_value() const { return max_value_; }
    void update_extremes();

private:
    Grid grid_;
    std::vector<double> times_;
    ReactionModel model_;
    std::vector<double> data_;
    double min_value_ = 0.0;
    double max_value_ = 0.0;
};

/// Estimated bytes needed to store a trajectory on `grid` over `tc`.
std::size_t trajectory_bytes(const Grid& grid, const TimeConfig& tc);

/// Solves u_t - Laplace(u) = f(u) with homogeneous Neumann conditions.
///
/// 1D: Crank-Nicolson diffusion; 2D: Peaceman-Rachford ADI. In both, the reaction is
/// linearly implicit, f(u^n) + f'(u^n)(u^{n+1} - u^n)/2, folded into the tridiagonal solves.
Trajectory forward_solve(const ScalarField& u0, const ReactionModel& model,
                         const TimeConfig& tc, const SolverOptions& opts = {});

/// 2D entry point; identical to forward_solve on a 2D grid.
Trajectory forward_solve_2d(const ScalarField& u0, const ReactionModel& model,
                            const TimeConfig& tc, const SolverOptions& opts = {});

/// Final state only, without storing the history (objective-only evaluations).
ScalarField forward_final(const ScalarField& u0, const ReactionModel& model,
                          const TimeConfig& tc, const SolverOptions& opts = {});

/// Trapezoidal quadrature of u(T, .).
double objective(const Trajectory& traj);

/// J_T(u0) without storing the trajectory.
double evaluate_objective(const ScalarField& u0, const ReactionModel& model,
                          const TimeConfig& tc, const SolverOptions& opts = {});

/// Validates grid/time/model against the step-size envelope; throws ConfigError.
void check_envelope(const Grid& grid, const ReactionModel& model, const TimeConfig& tc,
                    const SolverOptions& opts);

namespace detail {

/// One step of v_t = L v + J v + g on a 1D grid:
///   (I - dt/2 L - dt/2 J) out = (I + dt/2 L + dt/2 J) in + dt g.
/// L is the Neumann-mirror (or periodic) second difference. `g` may be empty.
class LineStepper {
public:
    LineStepper(std::size_t n, double dx, bool periodic);
    void step(std::span<const double> in, std::span<const double> coeff,
              std::span<const double> source, double dt, std::span<double> out);

private:
    std::size_t n_;
    double inv_dx2_;
    bool periodic_;
    std::vector<double> lower_, diag_, upper_, scratch_;
};

/// Peaceman-Rachford ADI for v_t = Lx v + Ly v + J v + g; J is split evenly between
/// the two half-steps. `reverse` performs the y-implicit half-step first (used by the
/// backward adjoint sweep, the time-reversed analogue of the forward step).
class AdiStepper {
public:
    explicit AdiStepper(const Grid& grid);
    void step(std::span<const double> in, std::span<const double> coeff,
              std::span<const double> source, double dt, bool reverse, std::span<double> out);

private:
    void half_step(std::span<const double> in, std::span<const double> coeff,
                   std::span<const double> source, double dt, bool implicit_x,
                   std::span<double> out);

    std::size_t nx_, ny_;
    double inv_dx2_, inv_dy2_;
    std::vector<double> mid_, rhs_, lower_, diag_, upper_, scratch_, line_;
};

/// Dispatches to LineStepper or AdiStepper depending on the grid dimension.
class Stepper {
public:
    explicit Stepper(const Grid& grid);
    void step(std::span<const double> in, std::span<const double> coeff,
              std::span<const double> source, double dt, bool reverse, std::span<double> out);

private:
    std::variant<LineStepper, AdiStepper> impl_;
};

/// Throws NumericalError when a value is non-finite or beyond the blow-up threshold.
void guard_values(std::span<const double> v, double threshold, std::size_t step, double t);

}  // namespace detail

}  // namespace rdseed
