#include "rdseed/reaction.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "rdseed/errors.hpp"

namespace rdseed {

namespace {

constexpr double kConcavityBand = 1e-12;
constexpr double kRootTolerance = 1e-12;

}  // namespace

std::string to_string(ReactionKind kind) {
    switch (kind) {
        case ReactionKind::bistable: return "bistable";
        case ReactionKind::monostable: return "monostable";
        case ReactionKind::convex_power: return "convex";
        case ReactionKind::cubic: return "cubic";
    }
    return "unknown";
}

ReactionModel ReactionModel::bistable(double theta) {
    if (!(theta > 0.0 && theta < 1.0)) throw ConfigError("reaction: theta must lie in (0,1)");
    ReactionModel m;
    m.kind_ = ReactionKind::bistable;
    m.param_ = theta;
    m.coeffs_ = {-1.0, 1.0 + theta, -theta, 0.0};
    return m;
}

ReactionModel ReactionModel::monostable(double theta) {
    if (!(theta > 0.0 && theta < 1.0)) throw ConfigError("reaction: theta must lie in (0,1)");
    ReactionModel m;
    m.kind_ = ReactionKind::monostable;
    m.param_ = theta;
    m.coeffs_ = {-1.0, 1.0 - theta, theta, 0.0};
    return m;
}

ReactionModel ReactionModel::convex_power(double a) {
    if (!(a > 1.0) || !std::isfinite(a)) throw ConfigError("reaction: exponent a must exceed 1");
    ReactionModel m;
    m.kind_ = ReactionKind::convex_power;
    m.param_ = a;
    return m;
}

ReactionModel ReactionModel::cubic(double c3, double c2, double c1, double c0) {
    for (double c : {c3, c2, c1, c0}) {
        if (!std::isfinite(c)) throw ConfigError("reaction: coefficients must be finite");
    }
    ReactionModel m;
    m.kind_ = ReactionKind::cubic;
    m.param_ = 0.0;
    m.coeffs_ = {c3, c2, c1, c0};
    return m;
}

double ReactionModel::f(double v) const {
    if (kind_ == ReactionKind::convex_power) return std::pow(std::abs(v), param_) / param_;
    const auto& c = coeffs_;
    return ((c[0] * v + c[1]) * v + c[2]) * v + c[3];
}

double ReactionModel::df(double v) const {
    if (kind_ == ReactionKind::convex_power) {
        const double mag = std::pow(std::abs(v), param_ - 1.0);
        return v < 0.0 ? -mag : mag;
    }
    const auto& c = coeffs_;
    return (3.0 * c[0] * v + 2.0 * c[1]) * v + c[2];
}

double ReactionModel::d2f(double v) const {
    if (kind_ == ReactionKind::convex_power) {
        if (v == 0.0 && param_ < 2.0) return std::numeric_limits<double>::infinity();
        return (param_ - 1.0) * std::pow(std::abs(v), param_ - 2.0);
    }
    return 6.0 * coeffs_[0] * v + 2.0 * coeffs_[1];
}

double ReactionModel::eval(int order, double v) const {
    switch (order) {
        case 0: return f(v);
        case 1: return df(v);
        case 2: return d2f(v);
        default: throw ConfigError("reaction: derivative order must be 0, 1 or 2");
    }
}

std::vector<double> ReactionModel::inflection_points(double lo, double hi) const {
    std::vector<double> pts;
    if (kind_ == ReactionKind::convex_power) return pts;
    if (coeffs_[0] != 0.0) {
        const double v = -coeffs_[1] / (3.0 * coeffs_[0]);
        if (v > lo && v < hi) pts.push_back(v);
    }
    return pts;
}

double ReactionModel::max_abs_df(double lo, double hi) const {
    // f' is monotone between inflection points, so the extremes sit at breakpoints.
    double m = std::max(std::abs(df(lo)), std::abs(df(hi)));
    for (double v : inflection_points(lo, hi)) m = std::max(m, std::abs(df(v)));
    return m;
}

std::string ReactionModel::describe() const {
    std::ostringstream os;
    os.precision(17);
    switch (kind_) {
        case ReactionKind::bistable: os << "bistable(theta=" << param_ << ")"; break;
        case ReactionKind::monostable: os << "monostable(theta=" << param_ << ")"; break;
        case ReactionKind::convex_power: os << "convex(a=" << param_ << ")"; break;
        case ReactionKind::cubic:
            os << "cubic(" << coeffs_[0] << "," << coeffs_[1] << "," << coeffs_[2] << ","
               << coeffs_[3] << ")";
            break;
    }
    return os.str();
}

int concavity_sign(const ReactionModel& model, double v) {
    const double s = model.d2f(v);
    if (std::abs(s) <= kConcavityBand) return 0;
    return s > 0.0 ? 1 : -1;
}

std::vector<FprimeRoot> solve_fprime(const ReactionModel& model, double target, double lo,
                                     double hi) {
    if (!(lo < hi)) throw ConfigError("solve_fprime: lo must be below hi");
    std::vector<double> breaks{lo};
    for (double v : model.inflection_points(lo, hi)) breaks.push_back(v);
    breaks.push_back(hi);

    std::vector<double> roots;
    for (std::size_t s = 0; s + 1 < breaks.size(); ++s) {
        double a = breaks[s];
        double b = breaks[s + 1];
        double ga = model.df(a) - target;
        double gb = model.df(b) - target;
        if (std::abs(ga) <= kRootTolerance) {
            roots.push_back(a);
            continue;
        }
        if (std::abs(gb) <= kRootTolerance) {
            roots.push_back(b);
            continue;
        }
        if ((ga > 0.0) == (gb > 0.0)) continue;
        for (int it = 0; it < 200; ++it) {
            const double mid = 0.5 * (a + b);
            const double gm = model.df(mid) - target;
            if (std::abs(gm) <= kRootTolerance || mid == a || mid == b) {
                a = b = mid;
                break;
            }
            if ((gm > 0.0) == (ga > 0.0)) {
                a = mid;
                ga = gm;
            } else {
                b = mid;
            }
        }
        roots.push_back(0.5 * (a + b));
    }

    std::sort(roots.begin(), roots.end());
    // A root sitting on a breakpoint is found from both sides.
    std::vector<FprimeRoot> out;
    for (double r : roots) {
        if (!out.empty() && std::abs(out.back().value - r) <= 1e-9) continue;
        out.push_back({r, concavity_sign(model, r)});
    }
    return out;
}

}  // namespace rdseed
