#include "rdseed/twoscale.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "rdseed/adjoint.hpp"
#include "rdseed/errors.hpp"

namespace rdseed {

double cutoff_value(double a, double b, double x) {
    const double s = (2.0 * x - a - b) / (b - a);
    if (std::abs(s) >= 1.0) return 0.0;
    return std::exp(1.0 - 1.0 / (1.0 - s * s));
}

double cutoff_derivative(double a, double b, double x) {
    const double s = (2.0 * x - a - b) / (b - a);
    if (std::abs(s) >= 1.0) return 0.0;
    const double q = 1.0 - s * s;
    // d/ds exp(1 - 1/q) = exp(1 - 1/q) * (-2 s / q^2), ds/dx = 2 / (b - a).
    return std::exp(1.0 - 1.0 / q) * (-2.0 * s / (q * q)) * (2.0 / (b - a));
}

CutoffProfile make_cutoff(double a, double b, const Grid& grid) {
    if (grid.dim() != 1) throw ConfigError("make_cutoff: grid is not 1D");
    if (!(a > grid.x().lo && a < b && b < grid.x().hi)) {
        throw ConfigError("make_cutoff: need lo < a < b < hi");
    }
    const double dx = grid.x().step();
    if ((b - a) / dx < 32.0) {
        throw ConfigError("make_cutoff: support (a, b) holds fewer than 32 grid nodes");
    }
    CutoffProfile c{a, b, ScalarField(grid, 0.0), ScalarField(grid, 0.0)};
    for (std::size_t i = 0; i < grid.size(); ++i) {
        const double x = grid.x().node(i);
        c.field[i] = cutoff_value(a, b, x);
        c.dfield[i] = cutoff_derivative(a, b, x);
    }
    return c;
}

ScalarField leading_terms(const CutoffProfile& theta, int k, double t) {
    if (k < 1) throw ConfigError("leading_terms: k must be >= 1");
    if (t < 0.0) throw ConfigError("leading_terms: t must be >= 0");
    const Grid& grid = theta.field.grid;
    const double kk = static_cast<double>(k);
    const double decay = std::exp(-kk * kk * t);
    ScalarField out(grid, 0.0);
    for (std::size_t i = 0; i < grid.size(); ++i) {
        const double x = grid.x().node(i);
        out[i] = theta.field[i] * std::cos(kk * x) * decay -
                 2.0 * kk * t * decay * theta.dfield[i] * std::sin(kk * x);
    }
    return out;
}

double compensator(const CutoffProfile& theta, int k) {
    const Grid& grid = theta.field.grid;
    std::vector<double> osc(grid.size());
    for (std::size_t i = 0; i < grid.size(); ++i) {
        osc[i] = theta.field[i] * std::cos(static_cast<double>(k) * grid.x().node(i));
    }
    return -integrate(grid, osc) / integrate(theta.field);
}

LineFit fit_line(const std::vector<double>& x, const std::vector<double>& y) {
    const std::size_t n = x.size();
    if (n < 2 || y.size() != n) throw ConfigError("fit_line: need at least two points");
    double mx = 0.0, my = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        mx += x[i];
        my += y[i];
    }
    mx /= static_cast<double>(n);
    my /= static_cast<double>(n);
    double sxx = 0.0, sxy = 0.0, syy = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        sxx += (x[i] - mx) * (x[i] - mx);
        sxy += (x[i] - mx) * (y[i] - my);
        syy += (y[i] - my) * (y[i] - my);
    }
    LineFit f;
    f.slope = sxy / sxx;
    f.intercept = my - f.slope * mx;
    f.r2 = syy > 0.0 ? (sxy * sxy) / (sxx * syy) : 1.0;
    return f;
}

RemainderSweep remainder_sweep(const ScalarField& u_background, const ReactionModel& model,
                               const CutoffProfile& theta, const std::vector<int>& k_list,
                               const TimeConfig& tc, const SolverOptions& opts) {
    if (k_list.empty()) throw ConfigError("remainder_sweep: empty k list");
    for (std::size_t i = 0; i < k_list.size(); ++i) {
        if (k_list[i] < 1 || (i > 0 && k_list[i] <= k_list[i - 1])) {
            throw ConfigError("remainder_sweep: k list must be positive and strictly increasing");
        }
    }
    const Grid& grid = u_background.grid;
    if (!(grid == theta.field.grid)) throw ConfigError("remainder_sweep: cutoff grid differs from background grid");
    const double kmax = static_cast<double>(k_list.back());
    const double dx = grid.x().step();
    if (dx > M_PI / (16.0 * kmax)) {
        std::ostringstream os;
        os << "remainder_sweep: dx = " << dx << " does not resolve k = " << k_list.back()
           << " (need dx <= " << M_PI / (16.0 * kmax) << ")";
        throw ConfigError(os.str());
    }
    const double dt_cap = 1.0 / (10.0 * kmax * kmax);
    for (std::size_t n = 0; n < tc.steps() && tc.times()[n] < 1.0 / (kmax * kmax); ++n) {
        if (tc.dt(n) > dt_cap * (1.0 + 1e-12)) {
            std::ostringstream os;
            os << "remainder_sweep: dt = " << tc.dt(n) << " at t = " << tc.times()[n]
               << " does not resolve exp(-k^2 t) for k = " << k_list.back() << " (need dt <= "
               << dt_cap << ")";
            throw ConfigError(os.str());
        }
    }

    const Trajectory traj = forward_solve(u_background, model, tc, opts);
    const auto& times = tc.times();
    RemainderSweep sweep;
    sweep.k_list = k_list;
    std::vector<double> log_k, log_norm, diff(grid.size());
    for (int k : k_list) {
        ScalarField h0(grid, 0.0);
        for (std::size_t i = 0; i < grid.size(); ++i) {
            h0[i] = theta.field[i] * std::cos(static_cast<double>(k) * grid.x().node(i));
        }
        const Trajectory h = linearized_solve(traj, model, h0, opts);
        double sup = 0.0, arg = 0.0, integral = 0.0, prev_sq = 0.0;
        for (std::size_t n = 0; n < h.levels(); ++n) {
            const ScalarField lead = leading_terms(theta, k, times[n]);
            const auto hn = h.at(n);
            for (std::size_t i = 0; i < diff.size(); ++i) diff[i] = hn[i] - lead[i];
            const double sq = inner_product(grid, diff, diff);
            const double norm = std::sqrt(std::max(0.0, sq));
            if (n == 0) sweep.initial_remainder = std::max(sweep.initial_remainder, norm);
            if (norm > sup) {
                sup = norm;
                arg = times[n];
            }
            if (n > 0) integral += 0.5 * (times[n] - times[n - 1]) * (sq + prev_sq);
            prev_sq = sq;
        }
        sweep.sup_norms.push_back(sup);
        sweep.sup_times.push_back(arg);
        sweep.time_integrals.push_back(integral);
        sweep.alpha.push_back(compensator(theta, k));
        log_k.push_back(std::log(static_cast<double>(k)));
        log_norm.push_back(std::log(sup));
    }
    if (k_list.size() >= 2) sweep.fit = fit_line(log_k, log_norm);
    return sweep;
}

double laplace_check(int m, int k, double T) {
    if (m < 1 || k < 1) throw ConfigError("laplace_check: m and k must be >= 1");
    if (!(T > 0.0)) throw ConfigError("laplace_check: T must be positive");
    const double k2 = static_cast<double>(k) * static_cast<double>(k);
    auto integrand = [&](double t) { return std::pow(t, m - 1) * std::exp(-k2 * t); };
    // Split where the integrand has decayed so the adaptive rule sees the peak.
    const double knee = std::min(T, 40.0 * static_cast<double>(m) / k2);
    using boost::math::quadrature::gauss_kronrod;
    double value = gauss_kronrod<double, 61>::integrate(integrand, 0.0, knee, 15, 1e-14);
    if (knee < T) value += gauss_kronrod<double, 61>::integrate(integrand, knee, T, 15, 1e-14);
    return value * std::pow(k2, m) / std::tgamma(static_cast<double>(m));
}

std::string to_csv(const RemainderSweep& sweep) {
    std::ostringstream os;
    os.precision(17);
    os << "k,sup_norm,sup_norm_times_k2,alpha_k,alpha_k_times_k4\n";
    for (std::size_t i = 0; i < sweep.k_list.size(); ++i) {
        const double k = sweep.k_list[i];
        os << sweep.k_list[i] << ',' << sweep.sup_norms[i] << ',' << sweep.sup_norms[i] * k * k
           << ',' << sweep.alpha[i] << ',' << sweep.alpha[i] * k * k * k * k << '\n';
    }
    os << "# slope,intercept,r2\n";
    os << "# " << sweep.fit.slope << ',' << sweep.fit.intercept << ',' << sweep.fit.r2 << '\n';
    return os.str();
}

}  // namespace rdseed
