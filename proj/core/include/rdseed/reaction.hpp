#pragma once

#include <array>
#include <string>
#include <vector>

namespace rdseed {

enum class ReactionKind { bistable, monostable, convex_power, cubic };

std::string to_string(ReactionKind kind);

/// A reaction term f with closed-form first and second derivatives.
///
/// Polynomial kinds are stored as cubic coefficients c3 u^3 + c2 u^2 + c1 u + c0:
///   bistable(theta)   f = u (1 - u)(u - theta)
///   monostable(theta) f = (u + theta) u (1 - u)
///   cubic(c3..c0)     arbitrary cubic
/// convex_power(a) is f = |u|^a / a, which coincides with u^a / a for u >= 0 and stays
/// convex on the extended range [-0.5, 1.5] used by intermediate iterates.
class ReactionModel {
public:
    static ReactionModel bistable(double theta);
    static ReactionModel monostable(double theta);
    static ReactionModel convex_power(double a);
    static ReactionModel cubic(double c3, double c2, double c1, double c0);

    ReactionKind kind() const { return kind_; }
    double parameter() const { return param_; }
    const std::array<double, 4>& coefficients() const { return coeffs_; }

    double f(double v) const;
    double df(double v) const;
    double d2f(double v) const;

    /// order 0, 1 or 2.
    double eval(int order, double v) const;

    /// Points in (lo, hi) where f'' changes sign; f' is monotone between consecutive ones.
    std::vector<double> inflection_points(double lo, double hi) const;

    /// max |f'| on [lo, hi], used for step-size envelopes.
    double max_abs_df(double lo, double hi) const;

    std::string describe() const;

private:
    ReactionKind kind_ = ReactionKind::bistable;
    double param_ = 0.25;
    std::array<double, 4> coeffs_{};  // c3, c2, c1, c0
};

/// Sign of f'' with a zero band |f''| <= 1e-12.
int concavity_sign(const ReactionModel& model, double v);

struct FprimeRoot {
    double value;
    int concavity;  // concavity_sign at the root
};

/// All solutions of f'(v) = target in [lo, hi], sorted ascending.
///
/// The interval is split at the inflection points of f, so f' is monotone on every
/// piece; each bracketed piece is refined by bisection. Empty when no solution exists.
std::vector<FprimeRoot> solve_fprime(const ReactionModel& model, double target, double lo,
                                     double hi);

}  // namespace rdseed
