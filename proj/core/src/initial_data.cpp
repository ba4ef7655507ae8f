#include "rdseed/initial_data.hpp"

#include <algorithm>
#include <cmath>

#include "rdseed/errors.hpp"

namespace rdseed {

namespace {

double overlap(double a0, double a1, double b0, double b1) {
    return std::max(0.0, std::min(a1, b1) - std::max(a0, b0));
}

// Per-axis cell-overlap fractions of [lo, hi].
std::vector<double> axis_fractions(const Axis& ax, double lo, double hi) {
    std::vector<double> frac(ax.n);
    const double h = ax.step();
    for (std::size_t i = 0; i < ax.n; ++i) {
        const double c0 = std::max(ax.lo, ax.node(i) - 0.5 * h);
        const double c1 = std::min(ax.hi, ax.node(i) + 0.5 * h);
        frac[i] = overlap(c0, c1, lo, hi) / (c1 - c0);
    }
    return frac;
}

void check_mass(const Grid& grid, double m) {
    if (!(m > 0.0) || !(m < grid.measure())) {
        throw ConfigError("mass must lie in (0, |Omega|)");
    }
}

}  // namespace

ScalarField interval_indicator(const Grid& grid, double lo, double hi) {
    if (grid.dim() != 1) throw ConfigError("interval_indicator: grid is not 1D");
    return ScalarField(grid, axis_fractions(grid.x(), lo, hi));
}

ScalarField centered_block(const Grid& grid, double m, double center) {
    check_mass(grid, m);
    const double lo = center - 0.5 * m;
    const double hi = center + 0.5 * m;
    if (lo < grid.x().lo - 1e-12 || hi > grid.x().hi + 1e-12) {
        throw ConfigError("centered_block: block does not fit in the domain");
    }
    return interval_indicator(grid, lo, hi);
}

ScalarField disc_indicator(const Grid& grid, double m, double cx, double cy) {
    if (grid.dim() != 2) throw ConfigError("disc_indicator: grid is not 2D");
    check_mass(grid, m);
    const double r = std::sqrt(m / M_PI);
    const Axis& ax = grid.x();
    const Axis& ay = grid.y();
    constexpr int kSub = 32;
    ScalarField u(grid, 0.0);
    for (std::size_t j = 0; j < ay.n; ++j) {
        const double y0 = std::max(ay.lo, ay.node(j) - 0.5 * ay.step());
        const double y1 = std::min(ay.hi, ay.node(j) + 0.5 * ay.step());
        for (std::size_t i = 0; i < ax.n; ++i) {
            const double x0 = std::max(ax.lo, ax.node(i) - 0.5 * ax.step());
            const double x1 = std::min(ax.hi, ax.node(i) + 0.5 * ax.step());
            int inside = 0;
            for (int b = 0; b < kSub; ++b) {
                const double y = y0 + (b + 0.5) * (y1 - y0) / kSub - cy;
                for (int a = 0; a < kSub; ++a) {
                    const double x = x0 + (a + 0.5) * (x1 - x0) / kSub - cx;
                    if (x * x + y * y < r * r) ++inside;
                }
            }
            u[j * ax.n + i] = static_cast<double>(inside) / (kSub * kSub);
        }
    }
    // Scale the partially covered cells so the quadrature mass is exactly m.
    const auto w = grid.weights();
    double full = 0.0, partial = 0.0;
    for (std::size_t k = 0; k < u.size(); ++k) {
        if (u[k] >= 1.0) full += w[k];
        else partial += w[k] * u[k];
    }
    if (partial > 0.0) {
        const double s = (m - full) / partial;
        for (auto& v : u.values) {
            if (v < 1.0) v = std::min(1.0, v * s);
        }
    }
    return u;
}

ScalarField stripe_indicator(const Grid& grid, double m, double cx) {
    if (grid.dim() != 2) throw ConfigError("stripe_indicator: grid is not 2D");
    check_mass(grid, m);
    const double width = m / grid.y().length();
    const auto fx = axis_fractions(grid.x(), cx - 0.5 * width, cx + 0.5 * width);
    ScalarField u(grid, 0.0);
    for (std::size_t j = 0; j < grid.ny(); ++j) {
        for (std::size_t i = 0; i < grid.nx(); ++i) u[j * grid.nx() + i] = fx[i];
    }
    return u;
}

ScalarField constant_field(const Grid& grid, double c) { return ScalarField(grid, c); }

}  // namespace rdseed
