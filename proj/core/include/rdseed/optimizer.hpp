#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "rdseed/adjoint.hpp"

namespace rdseed {

/// Level-set decomposition of p(0, .) around the bathtub threshold c.
///
/// upper = {p > c + eps}, lower = {p < c - eps}, flat = {|p - c| <= eps} when that band
/// holds more than one node (a discrete singular arc). When the band is a single node,
/// flat stays empty and that node is recorded as `fractional` together with the fill
/// value that makes the mass exactly m.
struct BathtubSplit {
    double c = 0.0;
    double eps_flat = 0.0;
    std::vector<std::size_t> upper;
    std::vector<std::size_t> lower;
    std::vector<std::size_t> flat;
    std::optional<std::size_t> fractional;
    double fractional_fill = 0.0;
};

BathtubSplit bathtub_split(const ScalarField& p0, double m, double eps_flat);

/// Which root of f'(v) = target to keep on the singular arc.
enum class RootRule {
    concave,  // f'' <= 0 (the optimality rule)
    convex,   // f'' > 0, kept only for regression comparisons
};

struct ArcFill {
    std::vector<double> values;  // one per split.flat entry
    std::size_t fallback_cells = 0;     // no root at all: endpoint closest in f'
    std::size_t wrong_branch_cells = 0; // only roots on the other branch existed
};

/// Values on the flat cells: root of f'(v) = -pt0(x) / c on [0, 1] selected by `rule`.
/// `previous` (optional, full field) breaks ties among several admissible roots.
ArcFill singular_arc_fill(const ReactionModel& model, const BathtubSplit& split,
                          const ScalarField& p0, const ScalarField& pt0,
                          const ScalarField* previous = nullptr,
                          RootRule rule = RootRule::concave);

/// Restores quadrature mass m: scales `scalable` nodes first, then fills nodes to 1
/// (or drains them to 0) following `priority` (highest priority first).
void restore_mass(std::vector<double>& values, const std::vector<double>& weights, double m,
                  const std::vector<std::size_t>& scalable,
                  const std::vector<std::size_t>& priority);

struct OptimizeOptions {
    std::size_t max_iter = 100;
    double tol = 1e-6;
    std::size_t patience = 3;
    double eps_flat_rel = 1e-4;
    int max_halvings = 8;
    RootRule rule = RootRule::concave;
    // Final pass that clears intermediate values on the convex branch (see concave_cleanup).
    bool cleanup = true;
    double cleanup_delta = 1e-3;
    SolverOptions solver;
};

struct OptimizerState {
    ScalarField iterate;
    double objective = 0.0;
    ScalarField adjoint0;
    ScalarField pt0;
    BathtubSplit split;
    std::size_t iteration = 0;
    double damping = 1.0;
    bool converged = false;
    bool stalled = false;
    std::size_t arc_fallbacks = 0;
    std::size_t solves = 0;  // PDE solves consumed (forward, adjoint)
};

struct TraceRow {
    std::size_t iter = 0;
    double objective = 0.0;
    double threshold_c = 0.0;
    std::size_t flat_cell_count = 0;
    double tau = 0.0;
    double wall_ms = 0.0;
};

struct OptimizeResult {
    ScalarField iterate;
    double objective = 0.0;
    std::vector<TraceRow> trace;
    bool converged = false;
    std::string stop_reason;
    std::size_t iterations = 0;
    std::size_t solves = 0;
    std::size_t arc_fallbacks = 0;
    double wall_seconds = 0.0;
    double mass = 0.0;
    bool cleanup_applied = false;
};

/// Builds the state (forward, adjoint, p_t(0)) for an admissible iterate.
OptimizerState make_state(const ScalarField& iterate, const ReactionModel& model,
                          const TimeConfig& tc, double m, const OptimizeOptions& opts);

/// One fixed-point step: bathtub candidate, singular-arc fill, mass restoration, and a
/// backtracking relaxation u + tau (candidate - u), tau in {1, 1/2, ..., 2^-max_halvings}.
OptimizerState fixed_point_step(const OptimizerState& state, const ReactionModel& model,
                                const TimeConfig& tc, double m, const OptimizeOptions& opts,
                                TraceRow* row = nullptr);

/// Cells with delta < u0 < 1 - delta and f''(u0) > 0 are set to 0 and their mass is moved
/// onto the remaining intermediate cells (scaled), then onto 0/1 cells by decreasing p.
/// The state is replaced only when the objective does not decrease; returns whether it was.
bool concave_cleanup(OptimizerState& state, const ReactionModel& model, const TimeConfig& tc,
                     double m, const OptimizeOptions& opts);

/// Iterates fixed_point_step until the relative objective change stays below tol for
/// `patience` consecutive steps, the step stalls, or max_iter is reached.
OptimizeResult optimize(const ScalarField& u0_init, const ReactionModel& model,
                        const TimeConfig& tc, double m, const OptimizeOptions& opts = {});

struct AnnealConfig {
    double initial_temp = 0.0;  // <= 0: 0.1 * J(u0_init)
    double cooling = 0.95;
    std::size_t moves_per_temp = 50;
    double move_mass = 0.0;     // <= 0: m / 50
    std::uint64_t seed = 0;
    std::size_t cell_nodes = 8; // control cell edge, in nodes
    std::size_t max_evaluations = 20000;
    double min_temp_rel = 1e-5; // stop once temp < min_temp_rel * J(u0_init)

    void validate() const;
};

struct AnnealRow {
    std::size_t level = 0;
    double temperature = 0.0;
    double current = 0.0;
    double best = 0.0;
    std::size_t accepted = 0;
    double wall_ms = 0.0;
};

struct AnnealResult {
    OptimizeResult result;  // iterate/objective hold the best point visited
    std::vector<AnnealRow> trace;
    double initial_temp = 0.0;
    double move_mass = 0.0;
};

/// Metropolis search on -J: each move shifts up to move_mass between two random control
/// cells (donor scaled down, receiver filled in proportion to its headroom), geometric cooling.
AnnealResult simulated_annealing(const ScalarField& u0_init, const ReactionModel& model,
                                 const TimeConfig& tc, double m, const AnnealConfig& cfg,
                                 const SolverOptions& solver = {});

struct Prop1Report {
    double max_fpp_on_arc = 0.0;
    std::size_t arc_cell_count = 0;
    std::size_t violating_cells = 0;
    double violating_fraction = 0.0;
    std::size_t fallback_cell_count = 0;
    bool empty_arc = true;
    bool passed = true;
};

/// Scans cells with delta < u0 < 1 - delta and reports the largest f''(u0) there.
Prop1Report prop1_certificate(const ScalarField& u0, const ReactionModel& model,
                              std::size_t fallback_cells = 0, double delta = 1e-3,
                              double tolerance = 1e-6);

std::string to_text(const Prop1Report& report);

/// Cells where delta < u0 < 1 - delta.
std::vector<std::size_t> singular_cells(const ScalarField& u0, double delta = 1e-3);

}  // namespace rdseed
