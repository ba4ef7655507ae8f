#include "rdseed/tridiagonal.hpp"

#include "rdseed/errors.hpp"

namespace rdseed {

void solve_tridiagonal(std::span<const double> lower, std::span<const double> diag,
                       std::span<const double> upper, std::span<double> rhs,
                       std::span<double> scratch) {
    const std::size_t n = diag.size();
    double denom = diag[0];
    if (denom == 0.0) throw NumericalError("tridiagonal: zero pivot");
    scratch[0] = upper[0] / denom;
    rhs[0] /= denom;
    for (std::size_t i = 1; i < n; ++i) {
        denom = diag[i] - lower[i] * scratch[i - 1];
        if (denom == 0.0) throw NumericalError("tridiagonal: zero pivot");
        const double inv = 1.0 / denom;
        scratch[i] = upper[i] * inv;
        rhs[i] = (rhs[i] - lower[i] * rhs[i - 1]) * inv;
    }
    for (std::size_t i = n - 1; i-- > 0;) rhs[i] -= scratch[i] * rhs[i + 1];
}

void solve_cyclic_tridiagonal(std::span<const double> lower, std::span<const double> diag,
                              std::span<const double> upper, std::span<double> rhs) {
    const std::size_t n = diag.size();
    if (n < 3) throw NumericalError("cyclic tridiagonal: need at least 3 unknowns");
    const double alpha = upper[n - 1];  // row n-1, column 0
    const double beta = lower[0];       // row 0, column n-1
    const double gamma = -diag[0];

    std::vector<double> d(diag.begin(), diag.end());
    d[0] -= gamma;
    d[n - 1] -= alpha * beta / gamma;

    std::vector<double> scratch(n);
    solve_tridiagonal(lower, d, upper, rhs, scratch);

    std::vector<double> u(n, 0.0);
    u[0] = gamma;
    u[n - 1] = alpha;
    solve_tridiagonal(lower, d, upper, u, scratch);

    const double fact = (rhs[0] + beta * rhs[n - 1] / gamma) /
                        (1.0 + u[0] + beta * u[n - 1] / gamma);
    for (std::size_t i = 0; i < n; ++i) rhs[i] -= fact * u[i];
}

}  // namespace rdseed
