#pragma once

#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "delreg/asymptotics.hpp"
#include "delreg/model.hpp"
#include "delreg/proportions.hpp"

namespace delreg {

enum class PatternKind { a, b, general };
enum class Verdict { ac, cc, tie };

const char* pattern_name(PatternKind k) noexcept;
const char* verdict_name(Verdict v) noexcept;

/// Missing-pattern description for the advisor. Patterns (a)/(b) are the
/// nested block patterns over the first predictor vs. the rest; `general`
/// carries a full proportion set (response-last column order).
struct PatternSpec {
    PatternKind kind = PatternKind::general;
    double q1 = 1.0;
    double q_rest = 1.0;
    std::optional<ProportionSet> props;

    static PatternSpec pattern_a(double q1, double q_rest);
    static PatternSpec pattern_b(double q1, double q_rest);
    static PatternSpec general(ProportionSet props);

    /// The implied exact proportion set over `columns` columns.
    ProportionSet proportions(int columns) const;
};

/// Semi-axes of the f(beta)=0 ellipse in any (beta_j, beta_k) projection,
/// exchangeable scenario. `a` lies along the equal-coefficients diagonal
/// (the 45-degree axis), `b` along the orthogonal one; `a` exceeds `b` only
/// when the cross term of the quadratic is negative.
struct EllipseAxes {
    double a;
    double b;
};

enum class SweepParameter { dimension, kappa, sigma1_sq, sigma12, sigma2_sq, sigma23, resid_var };

/// Feasible range and monotonicity breakpoints for one swept parameter with
/// all others held fixed. Members are NaN when not applicable to the sweep.
struct Breakpoints {
    double i_l;
    double i_r;
    double m0 = std::numeric_limits<double>::quiet_NaN();
    double m1 = std::numeric_limits<double>::quiet_NaN();
    double m2 = std::numeric_limits<double>::quiet_NaN();
    double m3 = std::numeric_limits<double>::quiet_NaN();
    double m4 = std::numeric_limits<double>::quiet_NaN();
    double con1 = std::numeric_limits<double>::quiet_NaN();
};

struct Recommendation {
    Verdict verdict;
    double decisive_value;  // f(beta), n*V_D (pattern b) or the V_D diagonal entry
    double var_cc;          // per-coefficient asymptotic variances at the given n
    double var_ac;
    std::optional<double> interval_c;      // pattern (a), p = 2
    std::optional<EllipseAxes> ellipse;    // pattern (a), exchangeable p >= 3
    std::optional<Breakpoints> breakpoints;
    std::vector<std::string> conditions;   // dominance/sufficiency conditions that applied
};

/// Variance difference n*(V_CC - V_AC) for the first coefficient under
/// pattern (a); positive means AC is asymptotically better.
double f_beta_pattern_a(const CovarianceModel& model, double q1, double q_rest);

/// Length of the beta_2 interval on which AC beats CC (pattern (a), p = 2).
double interval_length_c(const CovarianceModel& model);

/// Ellipse semi-axes for the exchangeable scenario (pattern (a), p >= 3).
EllipseAxes ellipse_axes(const CovarianceModel& model);

/// Exchangeable-structure parameters (sigma_1^2, sigma_2'^2, sigma_12',
/// sigma_2'3'); fails when the model is not exchangeable at tolerance.
struct ExchangeableParams {
    double sigma1_sq;
    double sigma2_sq;
    double sigma12;
    double sigma23;
};
ExchangeableParams exchangeable_params(const CovarianceModel& model, double rel_tol = 1e-9);

Breakpoints breakpoints(const CovarianceModel& model, SweepParameter parameter);

Recommendation advise_pattern_b(const CovarianceModel& model, double q1, double q_rest, long n);

/// Dispatches to the pattern-specific rule when the structure matches,
/// otherwise falls back to the full matrix computation.
Recommendation advise(const CovarianceModel& model, const PatternSpec& pattern, long n);

}  // namespace delreg
