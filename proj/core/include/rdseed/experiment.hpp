#pragma once

#include <string>
#include <vector>

#include "rdseed/config.hpp"

namespace rdseed {

enum class Mode { forward, optimize, anneal, grad_check, twoscale, convex_check, compare };

Mode parse_mode(const std::string& name);
std::string mode_name(Mode mode);

struct RunSummary {
    std::string headline;                // one line for the terminal
    std::vector<std::string> artifacts;  // paths written, in order
};

/// Runs `mode` on a validated config and writes its artifacts under cfg.output.dir,
/// together with manifest.txt (code version, config hash) and the canonical config.ini.
RunSummary run_experiment(const ExperimentConfig& cfg, Mode mode);

/// RDSEED_THREADS if set to a positive integer, else the hardware concurrency (at least 1).
unsigned thread_budget();

std::string version_string();

/// Writers shared by the CLI and tests.
std::string trace_csv(const OptimizeResult& result, bool timing);
std::string anneal_trace_csv(const AnnealResult& result, bool timing);
std::string gradcheck_csv(const std::vector<GradCheckRow>& rows);

}  // namespace rdseed
