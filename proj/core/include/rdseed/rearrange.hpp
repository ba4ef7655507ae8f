#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "rdseed/pde.hpp"

namespace rdseed {

/// mu(t) = |{u >= t}| under the trapezoidal cell measure.
struct DistributionFunction {
    std::vector<double> levels;    // distinct values, ascending
    std::vector<double> measures;  // measures[i] = mu(levels[i]), non-increasing

    double operator()(double t) const;
};

DistributionFunction distribution_function(const ScalarField& field);
DistributionFunction distribution_function(std::span<const double> values,
                                           std::span<const double> weights);

/// Uniform periodic field on (-pi, pi]: node j sits at (j - center()) * dx.
struct TorusField {
    double dx = 0.0;
    std::vector<double> values;

    std::size_t size() const { return values.size(); }
    std::size_t center() const { return values.size() / 2 - 1; }
    double position(std::size_t j) const;
    double mass() const;
};

/// Even reflection of a field on (0, pi) followed by periodic wrap: 2(n-1) nodes.
TorusField symmetrize_extend(const ScalarField& field);

/// Symmetric decreasing placement of the values: largest at the center node, then
/// alternating left/right outward (left first, so ties lean to the negative side).
TorusField periodic_rearrangement(const TorusField& tf);

/// Crank-Nicolson on the torus with a cyclic tridiagonal solve. Returns every level.
std::vector<std::vector<double>> torus_solve(const TorusField& tf, const ReactionModel& model,
                                             const TimeConfig& tc,
                                             const SolverOptions& opts = {});

/// Bang-bang profile with the same mass: the largest values are raised to 1 in order
/// (one fractional node), the rest set to 0.
ScalarField extreme_point_projection(const ScalarField& field, double m);

/// Random admissible profile of mass m: bang-bang union of intervals when `bang_bang`,
/// otherwise a smooth random density clipped to [0, 1] and shifted to mass m.
ScalarField random_profile(const Grid& grid, double m, bool bang_bang, std::uint64_t seed);

struct BlockCheckRow {
    std::size_t trial = 0;
    std::string description;
    double j_block = 0.0;
    double j_candidate = 0.0;
    double margin = 0.0;  // j_block - j_candidate
};

struct BlockCheckReport {
    std::vector<BlockCheckRow> rows;
    double min_margin = 0.0;
    double max_margin = 0.0;
    bool convex = false;
    bool concave = false;
};

/// Compares J_T(1_(0,m)) against `trials` random admissible profiles on (0, pi).
BlockCheckReport convex_block_check(const ReactionModel& model, double m, const TimeConfig& tc,
                                    std::size_t trials, std::uint64_t seed, std::size_t n = 201,
                                    const SolverOptions& opts = {});

struct ComparisonRow {
    double t = 0.0;
    double r = 0.0;
    double lhs = 0.0;  // centered mass of v, the solution from the rearranged data
    double rhs = 0.0;  // centered mass of the rearrangement of u(t)
    double margin = 0.0;
};

struct ComparisonReport {
    std::vector<ComparisonRow> rows;
    double worst_margin = 0.0;
};

/// Checks int_{-r}^{r} v(t) >= int_{-r}^{r} u(t)^* on t_samples x r_samples points
/// (t evenly spaced in (0, T], r evenly spaced in (0, pi)).
ComparisonReport parabolic_comparison_check(const ReactionModel& model, const ScalarField& u0,
                                            const TimeConfig& tc, std::size_t t_samples = 5,
                                            std::size_t r_samples = 5,
                                            const SolverOptions& opts = {});

std::string to_csv(const BlockCheckReport& report);
std::string to_csv(const ComparisonReport& report);

}  // namespace rdseed
