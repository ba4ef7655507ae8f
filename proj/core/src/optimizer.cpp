#include "rdseed/optimizer.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <numeric>
#include <random>
#include <sstream>

#include "rdseed/errors.hpp"

namespace rdseed {

namespace {

// Node indices sorted by decreasing value; ties by index so runs are reproducible.
std::vector<std::size_t> descending_order(std::span<const double> v) {
    std::vector<std::size_t> order(v.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return v[a] > v[b]; });
    return order;
}

double weighted_sum(const std::vector<double>& values, const std::vector<double>& w) {
    double s = 0.0;
    for (std::size_t i = 0; i < values.size(); ++i) s += w[i] * values[i];
    return s;
}

}  // namespace

BathtubSplit bathtub_split(const ScalarField& p0, double m, double eps_flat) {
    const double measure = p0.grid.measure();
    if (!(m > 0.0) || !(m < measure)) {
        std::ostringstream os;
        os << "bathtub_split: mass " << m << " outside (0, |Omega| = " << measure << ")";
        throw ConfigError(os.str());
    }
    const auto w = p0.grid.weights();
    const auto order = descending_order(p0.values);

    // Threshold node: first node (in decreasing p) where the cumulative mass reaches m.
    double cum = 0.0;
    std::size_t k = 0;
    for (; k < order.size(); ++k) {
        cum += w[order[k]];
        if (cum >= m) break;
    }
    k = std::min(k, order.size() - 1);

    BathtubSplit split;
    split.c = p0[order[k]];
    split.eps_flat = eps_flat;
    std::vector<std::size_t> band;
    for (std::size_t i = 0; i < p0.size(); ++i) {
        const double d = p0[i] - split.c;
        if (d > eps_flat) split.upper.push_back(i);
        else if (d < -eps_flat) split.lower.push_back(i);
        else band.push_back(i);
    }
    if (band.size() > 1) {
        split.flat = std::move(band);
        return split;
    }
    const std::size_t node = band.front();
    double upper_mass = 0.0;
    for (std::size_t i : split.upper) upper_mass += w[i];
    split.fractional = node;
    split.fractional_fill = std::clamp((m - upper_mass) / w[node], 0.0, 1.0);
    return split;
}

ArcFill singular_arc_fill(const ReactionModel& model, const BathtubSplit& split,
                          const ScalarField& /*p0*/, const ScalarField& pt0,
                          const ScalarField* previous, RootRule rule) {
    ArcFill fill;
    fill.values.reserve(split.flat.size());
    if (split.flat.empty()) return fill;
    if (!(split.c > 0.0)) throw NumericalError("singular_arc_fill: threshold c must be positive");

    for (std::size_t idx : split.flat) {
        const double target = -pt0[idx] / split.c;
        const auto roots = solve_fprime(model, target, 0.0, 1.0);
        const double prev = previous != nullptr ? (*previous)[idx] : 0.5;

        auto on_branch = [&](const FprimeRoot& r) {
            return rule == RootRule::concave ? r.concavity <= 0 : r.concavity > 0;
        };
        auto closest = [&](bool branch_only) -> std::optional<double> {
            std::optional<double> best;
            for (const auto& r : roots) {
                if (branch_only && !on_branch(r)) continue;
                if (!best || std::abs(r.value - prev) < std::abs(*best - prev)) best = r.value;
            }
            return best;
        };

        if (auto v = closest(true)) {
            fill.values.push_back(*v);
        } else if (auto any = closest(false)) {
            fill.values.push_back(*any);
            ++fill.wrong_branch_cells;
        } else {
            const double d0 = std::abs(model.df(0.0) - target);
            const double d1 = std::abs(model.df(1.0) - target);
            fill.values.push_back(d0 <= d1 ? 0.0 : 1.0);
            ++fill.fallback_cells;
        }
    }
    return fill;
}

void restore_mass(std::vector<double>& values, const std::vector<double>& weights, double m,
                  const std::vector<std::size_t>& scalable,
                  const std::vector<std::size_t>& priority) {
    if (!scalable.empty()) {
        double scal_mass = 0.0;
        for (std::size_t i : scalable) scal_mass += weights[i] * values[i];
        const double rest = weighted_sum(values, weights) - scal_mass;
        if (scal_mass > 0.0) {
            const double s = std::max(0.0, (m - rest) / scal_mass);
            for (std::size_t i : scalable) values[i] = std::clamp(values[i] * s, 0.0, 1.0);
        }
    }
    double deficit = m - weighted_sum(values, weights);
    if (deficit > 0.0) {
        for (std::size_t i : priority) {
            if (deficit <= 0.0) break;
            const double take = std::min((1.0 - values[i]) * weights[i], deficit);
            if (take <= 0.0) continue;
            values[i] = std::min(1.0, values[i] + take / weights[i]);
            deficit -= take;
        }
    } else if (deficit < 0.0) {
        for (auto it = priority.rbegin(); it != priority.rend(); ++it) {
            if (deficit >= 0.0) break;
            const std::size_t i = *it;
            const double take = std::min(values[i] * weights[i], -deficit);
            if (take <= 0.0) continue;
            values[i] = std::max(0.0, values[i] - take / weights[i]);
            deficit += take;
        }
    }
}

OptimizerState make_state(const ScalarField& iterate, const ReactionModel& model,
                          const TimeConfig& tc, double m, const OptimizeOptions& opts) {
    const Trajectory traj = forward_solve(iterate, model, tc, opts.solver);
    const AdjointTrajectory adj = adjoint_solve(traj, model, opts.solver);
    OptimizerState s;
    s.iterate = iterate;
    s.objective = objective(traj);
    s.adjoint0 = gradient(adj);
    s.pt0 = estimate_pt0(adj);
    const auto [lo, hi] = std::minmax_element(s.adjoint0.values.begin(), s.adjoint0.values.end());
    s.split = bathtub_split(s.adjoint0, m, opts.eps_flat_rel * (*hi - *lo));
    s.solves = 2;
    return s;
}

OptimizerState fixed_point_step(const OptimizerState& state, const ReactionModel& model,
                                const TimeConfig& tc, double m, const OptimizeOptions& opts,
                                TraceRow* row) {
    const Grid& grid = state.iterate.grid;
    const auto w = grid.weights();
    const BathtubSplit& split = state.split;

    std::vector<double> cand(grid.size(), 0.0);
    for (std::size_t i : split.upper) cand[i] = 1.0;
    if (split.fractional) cand[*split.fractional] = split.fractional_fill;
    const ArcFill fill =
        singular_arc_fill(model, split, state.adjoint0, state.pt0, &state.iterate, opts.rule);
    for (std::size_t k = 0; k < split.flat.size(); ++k) cand[split.flat[k]] = fill.values[k];
    restore_mass(cand, w, m, split.flat, descending_order(state.adjoint0.values));

    OptimizerState next = state;
    next.iteration = state.iteration + 1;
    next.arc_fallbacks = fill.fallback_cells + fill.wrong_branch_cells;
    next.converged = false;
    next.stalled = false;

    double max_change = 0.0;
    for (std::size_t i = 0; i < cand.size(); ++i) {
        max_change = std::max(max_change, std::abs(cand[i] - state.iterate[i]));
    }
    if (row != nullptr) {
        row->iter = next.iteration;
        row->threshold_c = split.c;
        row->flat_cell_count = split.flat.size();
        row->tau = 0.0;
        row->objective = state.objective;
    }
    if (max_change <= 1e-12) {
        next.converged = true;
        next.damping = 0.0;
        return next;
    }

    double tau = 1.0;
    for (int h = 0; h <= opts.max_halvings; ++h, tau *= 0.5) {
        ScalarField trial(grid, 0.0);
        for (std::size_t i = 0; i < cand.size(); ++i) {
            trial[i] = std::clamp(state.iterate[i] + tau * (cand[i] - state.iterate[i]), 0.0, 1.0);
        }
        const double j = evaluate_objective(trial, model, tc, opts.solver);
        ++next.solves;
        if (j > state.objective) {
            OptimizerState fresh = make_state(trial, model, tc, m, opts);
            fresh.iteration = next.iteration;
            fresh.damping = tau;
            fresh.arc_fallbacks = next.arc_fallbacks;
            fresh.solves = next.solves + fresh.solves;
            if (row != nullptr) {
                row->objective = fresh.objective;
                row->tau = tau;
            }
            return fresh;
        }
    }
    next.stalled = true;
    next.converged = true;
    next.damping = 0.0;
    return next;
}

bool concave_cleanup(OptimizerState& state, const ReactionModel& model, const TimeConfig& tc,
                     double m, const OptimizeOptions& opts) {
    const double delta = opts.cleanup_delta;
    std::vector<double> values = state.iterate.values;
    std::vector<std::size_t> keep;
    bool touched = false;
    for (std::size_t i = 0; i < values.size(); ++i) {
        if (values[i] <= delta || values[i] >= 1.0 - delta) continue;
        if (model.d2f(values[i]) > 0.0) {
            values[i] = 0.0;
            touched = true;
        } else {
            keep.push_back(i);
        }
    }
    if (!touched) return false;
    const auto w = state.iterate.grid.weights();
    restore_mass(values, w, m, keep, descending_order(state.adjoint0.values));

    ScalarField trial(state.iterate.grid, std::move(values));
    OptimizerState fresh = make_state(trial, model, tc, m, opts);
    fresh.solves += state.solves;
    if (fresh.objective < state.objective) {
        state.solves = fresh.solves;
        return false;
    }
    fresh.iteration = state.iteration;
    fresh.arc_fallbacks = state.arc_fallbacks;
    fresh.converged = state.converged;
    fresh.stalled = state.stalled;
    state = std::move(fresh);
    return true;
}

OptimizeResult optimize(const ScalarField& u0_init, const ReactionModel& model,
                        const TimeConfig& tc, double m, const OptimizeOptions& opts) {
    using clock = std::chrono::steady_clock;
    const auto start = clock::now();
    if (std::abs(mass(u0_init) - m) > 1e-8 * std::max(1.0, m)) {
        throw ConfigError("optimize: initial iterate does not carry mass m");
    }

    OptimizerState state = make_state(u0_init, model, tc, m, opts);
    OptimizeResult result;
    result.trace.push_back({0, state.objective, state.split.c, state.split.flat.size(), 0.0,
                            std::chrono::duration<double, std::milli>(clock::now() - start).count()});

    std::size_t streak = 0;
    result.stop_reason = "max_iter";
    for (std::size_t it = 0; it < opts.max_iter; ++it) {
        const auto t0 = clock::now();
        TraceRow row;
        const double previous = state.objective;
        state = fixed_point_step(state, model, tc, m, opts, &row);
        row.wall_ms = std::chrono::duration<double, std::milli>(clock::now() - t0).count();
        result.trace.push_back(row);
        result.arc_fallbacks = state.arc_fallbacks;
        if (state.converged) {
            result.converged = true;
            result.stop_reason = state.stalled ? "stalled" : "fixed_point";
            break;
        }
        const double rel = std::abs(state.objective - previous) / std::max(std::abs(previous), 1e-300);
        streak = rel < opts.tol ? streak + 1 : 0;
        if (streak >= opts.patience) {
            result.converged = true;
            result.stop_reason = "tolerance";
            break;
        }
    }
    if (opts.cleanup) result.cleanup_applied = concave_cleanup(state, model, tc, m, opts);
    result.iterate = state.iterate;
    result.objective = state.objective;
    result.iterations = state.iteration;
    result.solves = state.solves;
    result.mass = mass(state.iterate);
    result.wall_seconds = std::chrono::duration<double>(clock::now() - start).count();
    return result;
}

void AnnealConfig::validate() const {
    if (!(cooling > 0.0 && cooling < 1.0)) throw ConfigError("anneal: cooling must lie in (0, 1)");
    if (moves_per_temp == 0) throw ConfigError("anneal: moves_per_temp must be positive");
    if (cell_nodes == 0) throw ConfigError("anneal: cell_nodes must be positive");
    if (!(move_mass >= 0.0)) throw ConfigError("anneal: move_mass must be positive");
    if (!(initial_temp >= 0.0)) throw ConfigError("anneal: initial_temp must be non-negative");
}

namespace {

std::vector<std::vector<std::size_t>> control_cells(const Grid& grid, std::size_t b) {
    const std::size_t cx = (grid.nx() + b - 1) / b;
    const std::size_t cy = grid.dim() == 2 ? (grid.ny() + b - 1) / b : 1;
    std::vector<std::vector<std::size_t>> cells(cx * cy);
    const std::size_t ny = grid.dim() == 2 ? grid.ny() : 1;
    for (std::size_t j = 0; j < ny; ++j) {
        for (std::size_t i = 0; i < grid.nx(); ++i) {
            cells[(j / b) * cx + i / b].push_back(j * grid.nx() + i);
        }
    }
    return cells;
}

}  // namespace

AnnealResult simulated_annealing(const ScalarField& u0_init, const ReactionModel& model,
                                 const TimeConfig& tc, double m, const AnnealConfig& cfg,
                                 const SolverOptions& solver) {
    using clock = std::chrono::steady_clock;
    const auto start = clock::now();
    cfg.validate();
    if (std::abs(mass(u0_init) - m) > 1e-8 * std::max(1.0, m)) {
        throw ConfigError("anneal: initial iterate does not carry mass m");
    }
    const Grid& grid = u0_init.grid;
    const auto w = grid.weights();
    const auto cells = control_cells(grid, cfg.cell_nodes);
    std::mt19937_64 rng(cfg.seed);
    std::uniform_int_distribution<std::size_t> pick(0, cells.size() - 1);
    std::uniform_real_distribution<double> unit(0.0, 1.0);

    AnnealResult out;
    std::vector<double> current = u0_init.values;
    double j_cur = evaluate_objective(u0_init, model, tc, solver);
    std::size_t evals = 1;
    const double j0 = j_cur;
    out.initial_temp = cfg.initial_temp > 0.0 ? cfg.initial_temp : 0.1 * std::abs(j0);
    out.move_mass = cfg.move_mass > 0.0 ? cfg.move_mass : m / 50.0;
    std::vector<double> best = current;
    double j_best = j_cur;
    double temp = out.initial_temp;
    const double temp_floor = cfg.min_temp_rel * std::abs(j0);

    auto cell_sum = [&](const std::vector<std::size_t>& c, bool headroom) {
        double s = 0.0;
        for (std::size_t i : c) s += w[i] * (headroom ? 1.0 - current[i] : current[i]);
        return s;
    };

    std::vector<double> trial;
    std::size_t level = 0;
    out.result.stop_reason = "max_evaluations";
    while (evals < cfg.max_evaluations) {
        if (temp < temp_floor) {
            out.result.stop_reason = "min_temperature";
            break;
        }
        std::size_t accepted = 0;
        for (std::size_t mv = 0; mv < cfg.moves_per_temp && evals < cfg.max_evaluations; ++mv) {
            const auto& donor = cells[pick(rng)];
            const auto& recv = cells[pick(rng)];
            const double u = unit(rng);
            if (&donor == &recv) continue;
            const double have = cell_sum(donor, false);
            const double room = cell_sum(recv, true);
            const double delta = std::min({out.move_mass * u, have, room});
            if (!(delta > 0.0)) continue;
            trial = current;
            const double keep = 1.0 - delta / have;
            for (std::size_t i : donor) trial[i] = current[i] * keep;
            const double fill = delta / room;
            for (std::size_t i : recv) trial[i] = std::min(1.0, current[i] + fill * (1.0 - current[i]));
            const double j = evaluate_objective(ScalarField(grid, trial), model, tc, solver);
            ++evals;
            const double gain = j - j_cur;
            if (gain >= 0.0 || (temp > 0.0 && unit(rng) < std::exp(gain / temp))) {
                current.swap(trial);
                j_cur = j;
                ++accepted;
                if (j_cur > j_best) {
                    j_best = j_cur;
                    best = current;
                }
            }
        }
        out.trace.push_back({level, temp, j_cur, j_best, accepted,
                             std::chrono::duration<double, std::milli>(clock::now() - start).count()});
        ++level;
        temp *= cfg.cooling;
    }

    OptimizeResult& r = out.result;
    r.iterate = ScalarField(grid, std::move(best));
    r.objective = j_best;
    r.iterations = level;
    r.solves = evals;
    r.converged = r.stop_reason == "min_temperature";
    r.mass = mass(r.iterate);
    r.wall_seconds = std::chrono::duration<double>(clock::now() - start).count();
    r.trace.push_back({0, j0, 0.0, 0, 0.0, 0.0});
    for (const auto& row : out.trace) r.trace.push_back({row.level + 1, row.best, row.temperature, row.accepted, 0.0, row.wall_ms});
    return out;
}

std::vector<std::size_t> singular_cells(const ScalarField& u0, double delta) {
    std::vector<std::size_t> cells;
    for (std::size_t i = 0; i < u0.size(); ++i) {
        if (u0[i] > delta && u0[i] < 1.0 - delta) cells.push_back(i);
    }
    return cells;
}

Prop1Report prop1_certificate(const ScalarField& u0, const ReactionModel& model,
                              std::size_t fallback_cells, double delta, double tolerance) {
    Prop1Report r;
    r.fallback_cell_count = fallback_cells;
    const auto cells = singular_cells(u0, delta);
    r.arc_cell_count = cells.size();
    r.empty_arc = cells.empty();
    if (cells.empty()) return r;
    r.max_fpp_on_arc = -std::numeric_limits<double>::infinity();
    for (std::size_t i : cells) {
        const double s = model.d2f(u0[i]);
        r.max_fpp_on_arc = std::max(r.max_fpp_on_arc, s);
        if (s > tolerance) ++r.violating_cells;
    }
    r.violating_fraction = static_cast<double>(r.violating_cells) / static_cast<double>(cells.size());
    r.passed = r.max_fpp_on_arc <= tolerance;
    return r;
}

std::string to_text(const Prop1Report& r) {
    std::ostringstream os;
    os.precision(17);
    os << "{\n";
    if (r.empty_arc) {
        os << "  \"status\": \"empty singular arc\",\n";
        os << "  \"max_fpp_on_arc\": null,\n";
    } else {
        os << "  \"status\": \"" << (r.passed ? "pass" : "fail") << "\",\n";
        os << "  \"max_fpp_on_arc\": " << r.max_fpp_on_arc << ",\n";
    }
    os << "  \"arc_cell_count\": " << r.arc_cell_count << ",\n";
    os << "  \"violating_fraction\": " << r.violating_fraction << ",\n";
    os << "  \"fallback_cell_count\": " << r.fallback_cell_count << "\n";
    os << "}\n";
    return os.str();
}

}  // namespace rdseed
