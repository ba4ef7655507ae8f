#include "rdseed/grid.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "rdseed/errors.hpp"

namespace rdseed {

namespace {

Axis make_axis(double lo, double hi, std::size_t n, const char* name) {
    if (!(std::isfinite(lo) && std::isfinite(hi)) || !(hi > lo)) {
        throw ConfigError(std::string("grid: ") + name + "max must exceed " + name + "min");
    }
    if (n < 3) {
        throw ConfigError(std::string("grid: at least 3 nodes required along ") + name);
    }
    return Axis{lo, hi, n};
}

}  // namespace

Grid Grid::line(double xmin, double xmax, std::size_t n) {
    Grid g;
    g.dim_ = 1;
    g.x_ = make_axis(xmin, xmax, n, "x");
    return g;
}

Grid Grid::rect(double xmin, double xmax, std::size_t nx, double ymin, double ymax,
                std::size_t ny) {
    Grid g;
    g.dim_ = 2;
    g.x_ = make_axis(xmin, xmax, nx, "x");
    g.y_ = make_axis(ymin, ymax, ny, "y");
    return g;
}

double Grid::measure() const {
    return dim_ == 1 ? x_.length() : x_.length() * y_.length();
}

std::vector<double> Grid::weights() const {
    std::vector<double> w(size());
    if (dim_ == 1) {
        for (std::size_t i = 0; i < x_.n; ++i) w[i] = x_.weight(i);
        return w;
    }
    for (std::size_t j = 0; j < y_.n; ++j) {
        for (std::size_t i = 0; i < x_.n; ++i) w[j * x_.n + i] = x_.weight(i) * y_.weight(j);
    }
    return w;
}

double Grid::cell_lo(std::size_t i) const {
    return std::max(x_.lo, x_.node(i) - 0.5 * x_.step());
}

double Grid::cell_hi(std::size_t i) const {
    return std::min(x_.hi, x_.node(i) + 0.5 * x_.step());
}

ScalarField::ScalarField(Grid g, double fill) : grid(g), values(g.size(), fill) {}

ScalarField::ScalarField(Grid g, std::vector<double> v) : grid(g), values(std::move(v)) {
    if (values.size() != grid.size()) {
        throw ConfigError("field: value count " + std::to_string(values.size()) +
                          " does not match grid size " + std::to_string(grid.size()));
    }
}

double integrate(const Grid& grid, std::span<const double> values) {
    const Axis& ax = grid.x();
    if (grid.dim() == 1) {
        double s = 0.0;
        for (std::size_t i = 0; i < ax.n; ++i) s += ax.weight(i) * values[i];
        return s;
    }
    const Axis& ay = grid.y();
    double total = 0.0;
    for (std::size_t j = 0; j < ay.n; ++j) {
        double row = 0.0;
        for (std::size_t i = 0; i < ax.n; ++i) row += ax.weight(i) * values[j * ax.n + i];
        total += ay.weight(j) * row;
    }
    return total;
}

double integrate(const ScalarField& field) { return integrate(field.grid, field.values); }

double mass(const ScalarField& field) { return integrate(field); }

double inner_product(const Grid& grid, std::span<const double> a, std::span<const double> b) {
    std::vector<double> prod(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) prod[i] = a[i] * b[i];
    return integrate(grid, prod);
}

double l2_norm(const Grid& grid, std::span<const double> values) {
    return std::sqrt(inner_product(grid, values, values));
}

}  // namespace rdseed
