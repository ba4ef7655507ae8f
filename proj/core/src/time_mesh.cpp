#include "rdseed/time_mesh.hpp"

#include <algorithm>
#include <cmath>

#include "rdseed/errors.hpp"

namespace rdseed {

TimeConfig TimeConfig::uniform(double final_time, std::size_t steps) {
    if (!(final_time > 0.0) || !std::isfinite(final_time)) {
        throw ConfigError("time: T must be positive");
    }
    if (steps == 0) throw ConfigError("time: nt must be positive");
    TimeConfig tc;
    tc.times_.resize(steps + 1);
    const double dt = final_time / static_cast<double>(steps);
    for (std::size_t n = 0; n <= steps; ++n) tc.times_[n] = dt * static_cast<double>(n);
    tc.times_.back() = final_time;
    tc.uniform_ = true;
    return tc;
}

TimeConfig TimeConfig::graded(double final_time, double dt_min, double dt_max, double ratio) {
    if (!(final_time > 0.0)) throw ConfigError("time: T must be positive");
    if (!(dt_min > 0.0) || !(dt_max >= dt_min) || !(ratio >= 1.0)) {
        throw ConfigError("time: graded mesh needs 0 < dt_min <= dt_max and ratio >= 1");
    }
    TimeConfig tc;
    tc.uniform_ = false;
    tc.times_.push_back(0.0);
    double t = 0.0;
    double dt = dt_min;
    while (t < final_time) {
        double next = t + dt;
        // Avoid a sliver step at the end.
        if (next > final_time || final_time - next < 0.25 * dt) next = final_time;
        tc.times_.push_back(next);
        t = next;
        dt = std::min(dt * ratio, dt_max);
    }
    return tc;
}

double TimeConfig::max_dt() const {
    double m = 0.0;
    for (std::size_t n = 0; n + 1 < times_.size(); ++n) m = std::max(m, dt(n));
    return m;
}

}  // namespace rdseed
