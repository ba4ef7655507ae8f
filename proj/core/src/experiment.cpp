#include "rdseed/experiment.hpp"

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <mutex>
#include <sstream>
#include <thread>

#include "rdseed/errors.hpp"
#include "rdseed/field_io.hpp"
#include "rdseed/rearrange.hpp"
#include "rdseed/twoscale.hpp"

#ifndef RDSEED_VERSION
#define RDSEED_VERSION "0.0.0"
#endif

namespace rdseed {

namespace fs = std::filesystem;

std::string version_string() { return RDSEED_VERSION; }

Mode parse_mode(const std::string& name) {
    if (name == "forward") return Mode::forward;
    if (name == "optimize") return Mode::optimize;
    if (name == "anneal") return Mode::anneal;
    if (name == "grad-check") return Mode::grad_check;
    if (name == "twoscale") return Mode::twoscale;
    if (name == "convex-check") return Mode::convex_check;
    if (name == "compare") return Mode::compare;
    throw ConfigError("unknown mode '" + name + "'");
}

std::string mode_name(Mode mode) {
    switch (mode) {
        case Mode::forward: return "forward";
        case Mode::optimize: return "optimize";
        case Mode::anneal: return "anneal";
        case Mode::grad_check: return "grad-check";
        case Mode::twoscale: return "twoscale";
        case Mode::convex_check: return "convex-check";
        case Mode::compare: return "compare";
    }
    return "unknown";
}

unsigned thread_budget() {
    if (const char* env = std::getenv("RDSEED_THREADS")) {
        char* end = nullptr;
        const long v = std::strtol(env, &end, 10);
        if (end != env && *end == '\0' && v > 0) return static_cast<unsigned>(v);
    }
    return std::max(1u, std::thread::hardware_concurrency());
}

std::string trace_csv(const OptimizeResult& result, bool timing) {
    std::ostringstream os;
    os << "iter,objective,threshold_c,flat_cell_count,tau,wall_ms\n";
    for (const auto& r : result.trace) {
        os << r.iter << ',' << format_real(r.objective) << ',' << format_real(r.threshold_c) << ','
           << r.flat_cell_count << ',' << format_real(r.tau) << ','
           << format_real(timing ? r.wall_ms : 0.0) << '\n';
    }
    return os.str();
}

std::string anneal_trace_csv(const AnnealResult& result, bool timing) {
    std::ostringstream os;
    os << "level,temperature,current,best,accepted,wall_ms\n";
    for (const auto& r : result.trace) {
        os << r.level << ',' << format_real(r.temperature) << ',' << format_real(r.current) << ','
           << format_real(r.best) << ',' << r.accepted << ','
           << format_real(timing ? r.wall_ms : 0.0) << '\n';
    }
    return os.str();
}

std::string gradcheck_csv(const std::vector<GradCheckRow>& rows) {
    std::ostringstream os;
    os << "epsilon,fd_value,adjoint_value,rel_error\n";
    for (const auto& r : rows) {
        os << format_real(r.epsilon) << ',' << format_real(r.fd_value) << ','
           << format_real(r.adjoint_value) << ',' << format_real(r.rel_error) << '\n';
    }
    return os.str();
}

namespace {

class Writer {
public:
    Writer(const fs::path& dir, RunSummary& summary, std::mutex& lock)
        : dir_(dir), summary_(summary), lock_(lock) {
        std::error_code ec;
        fs::create_directories(dir_, ec);
        if (ec) throw IoError("cannot create output directory '" + dir_.string() + "': " + ec.message());
    }

    Writer sub(const std::string& name) const { return Writer(dir_ / name, summary_, lock_); }

    void text(const std::string& name, const std::string& content) const {
        const fs::path p = dir_ / name;
        std::ofstream out(p, std::ios::binary);
        if (!out) throw IoError("cannot write '" + p.string() + "'");
        out << content;
        if (!out) throw IoError("write failed for '" + p.string() + "'");
        record(p);
    }

    void field(const std::string& name, const ScalarField& f) const {
        const fs::path p = dir_ / name;
        dump_field(p.string(), f);
        record(p);
    }

private:
    void record(const fs::path& p) const {
        std::lock_guard<std::mutex> g(lock_);
        summary_.artifacts.push_back(p.string());
    }

    fs::path dir_;
    RunSummary& summary_;
    std::mutex& lock_;
};

// Runs the jobs on up to thread_budget() threads; rethrows the first failure.
void run_parallel(std::vector<std::function<void()>>& jobs) {
    const unsigned workers = std::min<unsigned>(thread_budget(), static_cast<unsigned>(jobs.size()));
    if (workers <= 1) {
        for (auto& j : jobs) j();
        return;
    }
    std::mutex m;
    std::size_t next = 0;
    std::exception_ptr failure;
    std::vector<std::thread> pool;
    for (unsigned w = 0; w < workers; ++w) {
        pool.emplace_back([&] {
            for (;;) {
                std::size_t idx;
                {
                    std::lock_guard<std::mutex> g(m);
                    if (next >= jobs.size() || failure) return;
                    idx = next++;
                }
                try {
                    jobs[idx]();
                } catch (...) {
                    std::lock_guard<std::mutex> g(m);
                    if (!failure) failure = std::current_exception();
                }
            }
        });
    }
    for (auto& t : pool) t.join();
    if (failure) std::rethrow_exception(failure);
}

std::string hex(std::uint64_t v) {
    std::ostringstream os;
    os << "0x" << std::hex;
    os.width(16);
    os.fill('0');
    os << v;
    return os.str();
}

struct Setup {
    Grid grid;
    ReactionModel model;
    TimeConfig tc;
    ScalarField u0;
};

Setup make_setup(const ExperimentConfig& cfg) {
    return {cfg.domain.grid(), cfg.reaction.make(), cfg.time.make(), make_initial(cfg)};
}

double fixed_point_run(const ExperimentConfig& cfg, const Setup& s, const Writer& w,
                       OptimizeResult* out = nullptr) {
    const OptimizeResult r = optimize(s.u0, s.model, s.tc, cfg.mass, cfg.optimizer.options());
    w.text("trace.csv", trace_csv(r, cfg.output.timing));
    w.field("u0_final.dat", r.iterate);
    w.text("prop1_report.txt", to_text(prop1_certificate(r.iterate, s.model, r.arc_fallbacks)));
    if (out != nullptr) *out = r;
    return r.objective;
}

std::vector<AnnealResult> anneal_runs(const ExperimentConfig& cfg, const Setup& s, const Writer& w) {
    const std::size_t n = cfg.optimizer.seed_count;
    std::vector<AnnealResult> results(n);
    std::vector<std::function<void()>> jobs;
    for (std::size_t k = 0; k < n; ++k) {
        jobs.emplace_back([&, k] {
            const std::uint64_t seed = cfg.optimizer.seed + k;
            results[k] = simulated_annealing(s.u0, s.model, s.tc, cfg.mass, cfg.optimizer.anneal(seed));
            const Writer sw = n == 1 ? w : w.sub("seed_" + std::to_string(seed));
            sw.text("trace.csv", anneal_trace_csv(results[k], cfg.output.timing));
            sw.field("u0_final.dat", results[k].result.iterate);
            sw.text("prop1_report.txt", to_text(prop1_certificate(results[k].result.iterate, s.model)));
        });
    }
    run_parallel(jobs);
    std::ostringstream os;
    os << "seed,objective,evaluations,wall_seconds\n";
    for (std::size_t k = 0; k < n; ++k) {
        const auto& r = results[k].result;
        os << cfg.optimizer.seed + k << ',' << format_real(r.objective) << ',' << r.solves << ','
           << format_real(cfg.output.timing ? r.wall_seconds : 0.0) << '\n';
    }
    w.text("anneal_summary.csv", os.str());
    return results;
}

}  // namespace

RunSummary run_experiment(const ExperimentConfig& cfg, Mode mode) {
    RunSummary summary;
    std::mutex lock;
    const Writer out(cfg.output.dir, summary, lock);
    {
        std::ostringstream m;
        m << "version = " << version_string() << '\n';
        m << "config_hash = " << hex(config_hash(cfg)) << '\n';
        m << "mode = " << mode_name(mode) << '\n';
        out.text("manifest.txt", m.str());
        out.text("config.ini", to_ini(cfg));
    }
    std::ostringstream head;
    head.precision(10);

    switch (mode) {
        case Mode::forward: {
            const Setup s = make_setup(cfg);
            const Trajectory traj = forward_solve(s.u0, s.model, s.tc);
            const std::size_t levels = traj.levels();
            const std::size_t stride = cfg.output.snapshot_stride > 0
                ? cfg.output.snapshot_stride
                : std::max<std::size_t>(1, (levels - 1) / 100);
            std::ostringstream csv;
            csv << "t,mass,min,max\n";
            for (std::size_t n = 0; n < levels; ++n) {
                if (n % stride != 0 && n + 1 != levels) continue;
                const auto u = traj.at(n);
                const auto [lo, hi] = std::minmax_element(u.begin(), u.end());
                csv << format_real(traj.times()[n]) << ',' << format_real(integrate(s.grid, u)) << ','
                    << format_real(*lo) << ',' << format_real(*hi) << '\n';
                if (cfg.output.snapshot_stride > 0) {
                    char name[32];
                    std::snprintf(name, sizeof name, "u_%06zu.dat", n);
                    out.field(name, traj.field(n));
                }
            }
            out.text("forward.csv", csv.str());
            out.field("u_final.dat", traj.field(levels - 1));
            head << "J_T = " << objective(traj);
            break;
        }
        case Mode::optimize: {
            const Setup s = make_setup(cfg);
            if (cfg.optimizer.method == "anneal") {
                const auto rs = anneal_runs(cfg, s, out);
                double best = -1e300;
                for (const auto& r : rs) best = std::max(best, r.result.objective);
                head << "anneal best J_T = " << best;
            } else {
                OptimizeResult r;
                fixed_point_run(cfg, s, out, &r);
                head << "J_T = " << r.objective << " after " << r.iterations << " iterations ("
                     << r.stop_reason << ")";
            }
            break;
        }
        case Mode::anneal: {
            const Setup s = make_setup(cfg);
            const auto rs = anneal_runs(cfg, s, out);
            double best = -1e300;
            for (const auto& r : rs) best = std::max(best, r.result.objective);
            head << "anneal best J_T = " << best;
            break;
        }
        case Mode::grad_check: {
            const Setup s = make_setup(cfg);
            const ScalarField h0 = random_direction(s.grid, cfg.check.seed);
            const auto rows = gradient_check(s.u0, s.model, s.tc, h0, cfg.check.epsilons);
            out.text("gradcheck.csv", gradcheck_csv(rows));
            double worst = 0.0;
            for (const auto& r : rows) worst = std::max(worst, r.rel_error);
            head << "max rel_error = " << worst;
            break;
        }
        case Mode::twoscale: {
            if (cfg.domain.is_2d()) throw ConfigError("twoscale runs on a 1D domain");
            const Setup s = make_setup(cfg);
            const CutoffProfile theta = make_cutoff(cfg.twoscale.a, cfg.twoscale.b, s.grid);
            const RemainderSweep sweep = remainder_sweep(s.u0, s.model, theta, cfg.twoscale.k, s.tc);
            out.text("sweep.csv", to_csv(sweep));
            head << "slope = " << sweep.fit.slope << " (r2 = " << sweep.fit.r2 << ")";
            break;
        }
        case Mode::convex_check: {
            if (cfg.domain.is_2d() || std::abs(cfg.domain.xmin) > 1e-12 ||
                std::abs(cfg.domain.xmax - M_PI) > 1e-9) {
                throw ConfigError("convex-check runs on the interval (0, pi)");
            }
            const ReactionModel model = cfg.reaction.make();
            const TimeConfig tc = cfg.time.make();
            const auto rep = convex_block_check(model, cfg.mass, tc, cfg.check.trials, cfg.check.seed,
                                                cfg.domain.nx);
            out.text("convex_check.csv", to_csv(rep));
            head << "block margin min = " << rep.min_margin << " max = " << rep.max_margin;
            if (cfg.check.mirror) {
                const ReactionModel mirror = ReactionModel::cubic(0.0, -1.0, 1.0, 0.0);
                const auto crep = convex_block_check(mirror, cfg.mass, tc, cfg.check.trials,
                                                     cfg.check.seed, cfg.domain.nx);
                out.text("concave_check.csv", to_csv(crep));
                head << "; mirror max = " << crep.max_margin;
            }
            if (rep.convex && cfg.check.profiles > 0) {
                const Grid grid = cfg.domain.grid();
                ComparisonReport all;
                all.worst_margin = std::numeric_limits<double>::infinity();
                for (std::size_t k = 0; k < cfg.check.profiles; ++k) {
                    const ScalarField u0 = random_profile(grid, cfg.mass, k % 2 == 0, cfg.check.seed + 1000 + k);
                    const auto c = parabolic_comparison_check(model, u0, tc, cfg.check.t_samples, cfg.check.r_samples);
                    all.rows.insert(all.rows.end(), c.rows.begin(), c.rows.end());
                    all.worst_margin = std::min(all.worst_margin, c.worst_margin);
                }
                out.text("comparison.csv", to_csv(all));
                head << "; comparison worst = " << all.worst_margin;
            }
            break;
        }
        case Mode::compare: {
            const Setup s = make_setup(cfg);
            OptimizeResult fp;
            std::vector<AnnealResult> sa;
            const Writer fdir = out.sub("fixed_point");
            const Writer adir = out.sub("anneal");
            std::vector<std::function<void()>> jobs;
            jobs.emplace_back([&] { fixed_point_run(cfg, s, fdir, &fp); });
            jobs.emplace_back([&] { sa = anneal_runs(cfg, s, adir); });
            run_parallel(jobs);
            std::ostringstream csv;
            csv << "method,seed,objective,iterations,solves,wall_seconds\n";
            auto secs = [&](double v) { return format_real(cfg.output.timing ? v : 0.0); };
            csv << "fixed_point,," << format_real(fp.objective) << ',' << fp.iterations << ','
                << fp.solves << ',' << secs(fp.wall_seconds) << '\n';
            double best = -1e300;
            for (std::size_t k = 0; k < sa.size(); ++k) {
                const auto& r = sa[k].result;
                best = std::max(best, r.objective);
                csv << "anneal," << cfg.optimizer.seed + k << ',' << format_real(r.objective) << ','
                    << r.iterations << ',' << r.solves << ',' << secs(r.wall_seconds) << '\n';
            }
            out.text("compare.csv", csv.str());
            head << "fixed_point J_T = " << fp.objective << ", anneal best J_T = " << best;
            break;
        }
    }
    summary.headline = head.str();
    return summary;
}

}  // namespace rdseed
