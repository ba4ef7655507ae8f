#pragma once

#include <vector>

#include "rdseed/pde.hpp"

namespace rdseed {

/// Exponential bump exp(1 - 1/(1 - s^2)) rescaled to (a, b), with its exact derivative.
struct CutoffProfile {
    double a = 0.0;
    double b = 0.0;
    ScalarField field;
    ScalarField dfield;
};

/// Bump and derivative at a point (zero outside (a, b)).
double cutoff_value(double a, double b, double x);
double cutoff_derivative(double a, double b, double x);

CutoffProfile make_cutoff(double a, double b, const Grid& grid);

/// theta(x) cos(kx) e^{-k^2 t} - 2 k t e^{-k^2 t} theta'(x) sin(kx).
ScalarField leading_terms(const CutoffProfile& theta, int k, double t);

/// alpha_k = -int theta cos(k x) / int theta (trapezoidal).
double compensator(const CutoffProfile& theta, int k);

struct LineFit {
    double slope = 0.0;
    double intercept = 0.0;
    double r2 = 0.0;
};

LineFit fit_line(const std::vector<double>& x, const std::vector<double>& y);

struct RemainderSweep {
    std::vector<int> k_list;
    std::vector<double> sup_norms;       // sup_t ||R_k(t)||_{L2}
    std::vector<double> sup_times;       // argmax t
    std::vector<double> time_integrals;  // int_0^T ||R_k(t)||^2 dt
    std::vector<double> alpha;
    double initial_remainder = 0.0;      // max_k ||R_k(0)||
    LineFit fit;                          // log sup_norm against log k
};

/// Requires dx <= pi / (16 k_max) and dt <= 1 / (10 k_max^2) for every step before
/// t = 1 / k_max^2; throws ConfigError otherwise.
RemainderSweep remainder_sweep(const ScalarField& u_background, const ReactionModel& model,
                               const CutoffProfile& theta, const std::vector<int>& k_list,
                               const TimeConfig& tc, const SolverOptions& opts = {});

/// Adaptive Gauss-Kronrod value of int_0^T t^{m-1} e^{-k^2 t} dt times k^{2m} / (m-1)!.
double laplace_check(int m, int k, double T);

std::string to_csv(const RemainderSweep& sweep);

}  // namespace rdseed
