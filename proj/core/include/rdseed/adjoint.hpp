#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "rdseed/pde.hpp"

namespace rdseed {

/// Backward solution p of -p_t - Laplace(p) = f'(u) p, p(T) = 1, on the forward mesh.
struct AdjointTrajectory {
    Trajectory p;
    /// Set when min p(0, .) <= 0: the mesh is too coarse for the maximum principle.
    bool positivity_violated = false;

    ScalarField initial() const { return p.field(0); }
};

struct GradientReport {
    ScalarField gradient_field;  // p(0, .)
    std::optional<double> directional;
    std::optional<double> hessian_form;
};

/// Integrates the adjoint backward with the time-reversed analogue of the forward step.
/// The step from t_{n+1} to t_n uses the potential f'(u(t_n)) (continuous adjoint, so
/// the gradient carries an O(dt) mismatch against the discrete objective).
AdjointTrajectory adjoint_solve(const Trajectory& traj, const ReactionModel& model,
                                const SolverOptions& opts = {});

/// L2 gradient of J_T at u0: p(0, .).
ScalarField gradient(const AdjointTrajectory& adj);

/// <p(0, .), h0> under the shared trapezoidal rule.
double directional_derivative(const AdjointTrajectory& adj, const ScalarField& h0);

/// Solves h_t - Laplace(h) = f'(u) h with frozen potential from the forward trajectory.
Trajectory linearized_solve(const Trajectory& traj, const ReactionModel& model,
                            const ScalarField& h0, const SolverOptions& opts = {});

/// Space-time trapezoidal quadrature of f''(u) p h^2, with h = linearized_solve(h0).
double hessian_quadratic_form(const Trajectory& traj, const AdjointTrajectory& adj,
                              const ScalarField& h0, const SolverOptions& opts = {});

/// One-sided difference (p(t_1, .) - p(0, .)) / t_1.
ScalarField estimate_pt0(const AdjointTrajectory& adj);

/// Forward + adjoint + gradient in one call, with optional directional data.
GradientReport gradient_report(const ScalarField& u0, const ReactionModel& model,
                               const TimeConfig& tc, const ScalarField* direction = nullptr,
                               const SolverOptions& opts = {});

struct GradCheckRow {
    double epsilon = 0.0;
    double fd_value = 0.0;       // (J(u0 + eps h0) - J(u0 - eps h0)) / (2 eps)
    double adjoint_value = 0.0;  // <p(0, .), h0>
    double rel_error = 0.0;
};

/// Central differences against the adjoint directional derivative, one row per epsilon.
/// The perturbed solves skip the [0, 1] bound check on their initial data.
std::vector<GradCheckRow> gradient_check(const ScalarField& u0, const ReactionModel& model,
                                         const TimeConfig& tc, const ScalarField& h0,
                                         const std::vector<double>& epsilons,
                                         const SolverOptions& opts = {});

/// Smooth zero-mean direction: random combination of Neumann cosine modes 1..modes,
/// scaled to max |h| = 1.
ScalarField random_direction(const Grid& grid, std::uint64_t seed, int modes = 6);

/// Smooth random datum with values in [lo, hi].
ScalarField random_interior_field(const Grid& grid, std::uint64_t seed, double lo = 0.1,
                                  double hi = 0.9, int modes = 6);

}  // namespace rdseed
