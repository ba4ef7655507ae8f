#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace rdseed {

/// Uniform vertex-centered axis: nodes lo, lo + h, ..., hi (both endpoints included).
struct Axis {
    double lo = 0.0;
    double hi = 1.0;
    std::size_t n = 3;

    double step() const { return (hi - lo) / static_cast<double>(n - 1); }
    double node(std::size_t i) const { return lo + static_cast<double>(i) * step(); }
    double length() const { return hi - lo; }

    /// Trapezoidal weight of node i (half a cell at either end).
    double weight(std::size_t i) const {
        return (i == 0 || i + 1 == n) ? 0.5 * step() : step();
    }

    friend bool operator==(const Axis&, const Axis&) = default;
};

/// A 1D interval or a 2D rectangle discretized on a uniform vertex-centered grid.
///
/// 2D fields are stored row-major: index = j * nx + i with i along x.
class Grid {
public:
    static Grid line(double xmin, double xmax, std::size_t n);
    static Grid rect(double xmin, double xmax, std::size_t nx, double ymin, double ymax,
                     std::size_t ny);

    int dim() const { return dim_; }
    const Axis& x() const { return x_; }
    const Axis& y() const { return y_; }
    std::size_t nx() const { return x_.n; }
    std::size_t ny() const { return dim_ == 1 ? 1 : y_.n; }
    std::size_t size() const { return nx() * ny(); }

    /// |Omega|: length in 1D, area in 2D.
    double measure() const;

    /// Trapezoidal (tensor-trapezoidal in 2D) quadrature weights, one per node.
    std::vector<double> weights() const;

    /// Cell of node i: [x_i - dx/2, x_i + dx/2] intersected with the domain.
    double cell_lo(std::size_t i) const;
    double cell_hi(std::size_t i) const;

    friend bool operator==(const Grid&, const Grid&) = default;

private:
    int dim_ = 1;
    Axis x_;
    Axis y_{0.0, 0.0, 1};
};

/// Nodal values of a function on a grid.
struct ScalarField {
    Grid grid;
    std::vector<double> values;

    ScalarField() = default;
    explicit ScalarField(Grid g, double fill = 0.0);
    ScalarField(Grid g, std::vector<double> v);

    std::size_t size() const { return values.size(); }
    double& operator[](std::size_t i) { return values[i]; }
    double operator[](std::size_t i) const { return values[i]; }
    std::span<const double> span() const { return values; }
};

/// Quadrature integral of nodal values (shared rule for mass, objective, inner products).
double integrate(const Grid& grid, std::span<const double> values);
double integrate(const ScalarField& field);

/// Quadrature mass of a field (the constraint functional of the admissible set).
double mass(const ScalarField& field);

/// Weighted inner product <a, b> under the trapezoidal rule.
double inner_product(const Grid& grid, std::span<const double> a, std::span<const double> b);

/// Discrete L2 norm under the trapezoidal rule.
double l2_norm(const Grid& grid, std::span<const double> values);

}  // namespace rdseed
