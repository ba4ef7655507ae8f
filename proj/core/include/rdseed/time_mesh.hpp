#pragma once

#include <cstddef>
#include <vector>

namespace rdseed {

/// Time levels 0 = t_0 < t_1 < ... < t_nt = T.
///
/// Uniform meshes are the common case; graded meshes resolve fast initial transients
/// (used by the two-scale sweeps where the interesting dynamics live at t = O(1/k^2)).
class TimeConfig {
public:
    static TimeConfig uniform(double final_time, std::size_t steps);

    /// Geometric steps starting at dt_min, growing by `ratio` until dt_max, then uniform
    /// steps of dt_max (the last one shortened to land exactly on final_time).
    static TimeConfig graded(double final_time, double dt_min, double dt_max, double ratio);

    double final_time() const { return times_.back(); }
    std::size_t steps() const { return times_.size() - 1; }
    double dt(std::size_t n) const { return times_[n + 1] - times_[n]; }
    double max_dt() const;
    bool is_uniform() const { return uniform_; }
    const std::vector<double>& times() const { return times_; }

private:
    std::vector<double> times_;
    bool uniform_ = true;
};

}  // namespace rdseed
