#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "rdseed/optimizer.hpp"

namespace rdseed {

struct DomainSection {
    double xmin = 0.0;
    double xmax = 1.0;
    std::size_t nx = 0;
    std::optional<double> ymin, ymax;
    std::optional<std::size_t> ny;

    bool is_2d() const { return ny.has_value(); }
    Grid grid() const;
    friend bool operator==(const DomainSection&, const DomainSection&) = default;
};

struct TimeSection {
    double T = 1.0;
    std::size_t nt = 0;
    std::string mesh = "uniform";  // uniform | graded
    double dt_min = 0.0;
    double dt_max = 0.0;
    double ratio = 1.02;

    TimeConfig make() const;
    friend bool operator==(const TimeSection&, const TimeSection&) = default;
};

struct ReactionSection {
    std::string kind = "bistable";  // bistable | monostable | convex_power | cubic
    double theta = 0.25;
    double exponent = 2.0;
    double c3 = 0.0, c2 = 0.0, c1 = 0.0, c0 = 0.0;

    ReactionModel make() const;
    friend bool operator==(const ReactionSection&, const ReactionSection&) = default;
};

struct InitialSection {
    std::string shape = "block";  // block | ball | stripe | constant | random | file
    double cx = 0.0;
    double cy = 0.0;
    std::string path;

    friend bool operator==(const InitialSection&, const InitialSection&) = default;
};

struct OptimizerSection {
    std::string method = "fixed_point";  // fixed_point | anneal
    std::size_t max_iter = 100;
    double tol = 1e-6;
    std::size_t patience = 3;
    double eps_flat = 1e-4;
    std::string root_rule = "concave";  // concave | convex
    bool cleanup = true;
    std::uint64_t seed = 0;
    std::size_t seed_count = 1;
    double initial_temp = 0.0;
    double cooling = 0.95;
    std::size_t moves_per_temp = 50;
    double move_mass = 0.0;
    std::size_t cell_nodes = 8;
    std::size_t max_evaluations = 20000;

    OptimizeOptions options() const;
    AnnealConfig anneal(std::uint64_t run_seed) const;
    friend bool operator==(const OptimizerSection&, const OptimizerSection&) = default;
};

struct OutputSection {
    std::string dir = "out";
    std::size_t snapshot_stride = 0;  // 0: no trajectory snapshots
    bool timing = true;                // false: wall-clock columns are written as 0

    friend bool operator==(const OutputSection&, const OutputSection&) = default;
};

struct TwoscaleSection {
    double a = 0.1;
    double b = 3.0415926535897931;
    std::vector<int> k = {4, 8, 16, 32};

    friend bool operator==(const TwoscaleSection&, const TwoscaleSection&) = default;
};

struct CheckSection {
    std::size_t trials = 200;
    std::uint64_t seed = 0;
    std::size_t profiles = 20;
    std::size_t t_samples = 5;
    std::size_t r_samples = 5;
    bool mirror = true;  // also run the concave mirror u - u^2
    std::vector<double> epsilons = {1e-2, 1e-3, 1e-4, 1e-5};

    friend bool operator==(const CheckSection&, const CheckSection&) = default;
};

struct ExperimentConfig {
    DomainSection domain;
    TimeSection time;
    ReactionSection reaction;
    double mass = 0.0;
    InitialSection initial;
    OptimizerSection optimizer;
    OutputSection output;
    TwoscaleSection twoscale;
    CheckSection check;

    friend bool operator==(const ExperimentConfig&, const ExperimentConfig&) = default;
};

/// INI text: `[section]`, `key = value`, `#` or `;` comments. Errors carry line numbers.
ExperimentConfig parse_config(const std::string& text);
ExperimentConfig load_config(const std::string& path);

/// Canonical INI text; parse_config(to_ini(c)) == c.
std::string to_ini(const ExperimentConfig& cfg);

/// 64-bit FNV-1a of the canonical text, ignoring output.dir.
std::uint64_t config_hash(const ExperimentConfig& cfg);

/// Initial datum described by [initial] and the mass constraint. `random` is a smooth
/// datum in [0.1, 0.9] drawn from [check] seed and does not carry the constrained mass.
ScalarField make_initial(const ExperimentConfig& cfg);

}  // namespace rdseed
