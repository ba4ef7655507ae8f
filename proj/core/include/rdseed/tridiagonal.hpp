#pragma once

#include <span>
#include <vector>

namespace rdseed {

/// Solves a tridiagonal system in place (Thomas algorithm, no pivoting).
///
/// Row i reads lower[i] x[i-1] + diag[i] x[i] + upper[i] x[i+1] = rhs[i];
/// lower[0] and upper[n-1] are ignored. `scratch` must hold n values.
/// Requires diagonal dominance, which every system assembled in this library has.
void solve_tridiagonal(std::span<const double> lower, std::span<const double> diag,
                       std::span<const double> upper, std::span<double> rhs,
                       std::span<double> scratch);

/// Cyclic variant: lower[0] couples row 0 to x[n-1] and upper[n-1] couples row n-1 to x[0].
/// Sherman-Morrison correction on top of two Thomas solves.
void solve_cyclic_tridiagonal(std::span<const double> lower, std::span<const double> diag,
                              std::span<const double> upper, std::span<double> rhs);

}  // namespace rdseed
