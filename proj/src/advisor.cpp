#include "delreg/advisor.hpp"

#include <cmath>
#include <limits>

#include "delreg/errors.hpp"

namespace delreg {

namespace {

constexpr double nan_v = std::numeric_limits<double>::quiet_NaN();
constexpr double inf_v = std::numeric_limits<double>::infinity();

double sqrt_or_nan(double x) { return x >= 0.0 ? std::sqrt(x) : nan_v; }

}  // namespace

const char* pattern_name(PatternKind k) noexcept {
    switch (k) {
        case PatternKind::a: return "a";
        case PatternKind::b: return "b";
        case PatternKind::general: return "general";
    }
    return "?";
}

const char* verdict_name(Verdict v) noexcept {
    switch (v) {
        case Verdict::ac: return "AC";
        case Verdict::cc: return "CC";
        case Verdict::tie: return "TIE";
    }
    return "?";
}

PatternSpec PatternSpec::pattern_a(double q1, double q_rest) {
    if (!(q1 > 0.0 && q1 <= 1.0) || !(q_rest > 0.0 && q_rest <= 1.0) || q1 < q_rest)
        fail(Errc::invalid_pattern, "pattern (a) needs 0 < q_rest <= q1 <= 1");
    PatternSpec out;
    out.kind = PatternKind::a;
    out.q1 = q1;
    out.q_rest = q_rest;
    return out;
}

PatternSpec PatternSpec::pattern_b(double q1, double q_rest) {
    if (!(q1 > 0.0 && q1 <= 1.0) || !(q_rest > 0.0 && q_rest <= 1.0) || q1 > q_rest)
        fail(Errc::invalid_pattern, "pattern (b) needs 0 < q1 <= q_rest <= 1");
    PatternSpec out;
    out.kind = PatternKind::b;
    out.q1 = q1;
    out.q_rest = q_rest;
    return out;
}

PatternSpec PatternSpec::general(ProportionSet props) {
    PatternSpec out;
    out.kind = PatternKind::general;
    out.props = std::move(props);
    return out;
}

ProportionSet PatternSpec::proportions(int columns) const {
    switch (kind) {
        case PatternKind::a: return ProportionSet::pattern_a(q1, q_rest, columns);
        case PatternKind::b: return ProportionSet::pattern_b(q1, q_rest, columns);
        case PatternKind::general:
            if (!props) fail(Errc::invalid_pattern, "general pattern carries no proportions");
            if (props->columns() != columns)
                fail(Errc::invalid_pattern, "proportion set has wrong column count");
            return *props;
    }
    fail(Errc::invalid_pattern, "unknown pattern kind");
}

double f_beta_pattern_a(const CovarianceModel& model, double q1, double q_rest) {
    const int p = model.n_predictors();
    if (p < 2) fail(Errc::invalid_pattern, "pattern (a) needs at least two predictors");
    if (!(q1 >= q_rest) || !(q_rest > 0.0) || !(q1 <= 1.0))
        fail(Errc::invalid_pattern, "pattern (a) needs 0 < q_rest <= q1 <= 1");

    const Eigen::MatrixXd sx = model.sigma_x();
    const double r11 = model.precision_x()(0, 0);
    const double k = model.kappa();
    const Eigen::VectorXd& beta = model.beta();
    const double dq = 1.0 / q_rest - 1.0 / q1;

    double f = 0.0;
    for (int g = 1; g < p; ++g)
        f -= r11 * r11 *
             ((1.0 + 2.0 * k) * sx(0, g) * sx(0, g) + (1.0 + k) * sx(0, 0) * sx(g, g)) * dq *
             beta(g) * beta(g);
    for (int g = 1; g < p; ++g)
        for (int h = g + 1; h < p; ++h)
            f -= 2.0 * r11 * r11 *
                 ((1.0 + 2.0 * k) * sx(0, g) * sx(0, h) + (1.0 + k) * sx(0, 0) * sx(g, h)) * dq *
                 beta(g) * beta(h);
    f += (1.0 + k) * dq * (2.0 * r11 - r11 * r11 * sx(0, 0)) * model.resid_var();
    return f;
}

double interval_length_c(const CovarianceModel& model) {
    if (model.n_predictors() != 2)
        fail(Errc::invalid_argument, "interval length is defined for p = 2");
    const Eigen::MatrixXd sx = model.sigma_x();
    const double s1 = sx(0, 0), s2 = sx(1, 1), s12 = sx(0, 1);
    const double k = model.kappa();
    const double margin = s1 * s2 - 2.0 * s12 * s12;
    if (margin < -1e-12 * s1 * s2)
        fail(Errc::empty_interval, "sigma1^2 sigma2^2 < 2 sigma12^2: CC wins for every beta");
    const double num = 4.0 * std::max(margin, 0.0) * model.resid_var();
    const double den = ((1.0 + 2.0 * k) / (1.0 + k) * s12 * s12 + s1 * s2) * s2;
    return std::sqrt(num / den);
}

ExchangeableParams exchangeable_params(const CovarianceModel& model, double rel_tol) {
    const int p = model.n_predictors();
    if (p < 3) fail(Errc::invalid_argument, "exchangeable scenario needs p >= 3");
    const Eigen::MatrixXd sx = model.sigma_x();
    ExchangeableParams out{sx(0, 0), sx(1, 1), sx(0, 1), sx(1, 2)};
    const double scale = sx.cwiseAbs().maxCoeff();
    auto close = [&](double a, double b) { return std::abs(a - b) <= rel_tol * scale; };
    for (int j = 1; j < p; ++j) {
        if (!close(sx(j, j), out.sigma2_sq) || !close(sx(0, j), out.sigma12))
            fail(Errc::invalid_covariance, "predictor covariance is not exchangeable");
        for (int k = j + 1; k < p; ++k)
            if (!close(sx(j, k), out.sigma23))
                fail(Errc::invalid_covariance, "predictor covariance is not exchangeable");
    }
    return out;
}

namespace {

struct Exch {
    double p;  // predictor count as a real
    double k;
    double s1, s2p, s12, s23;  // sigma1^2, sigma2'^2, sigma12', sigma2'3'
    double resid;
};

Exch exch_of(const CovarianceModel& model) {
    ExchangeableParams e = exchangeable_params(model);
    return {static_cast<double>(model.n_predictors()), model.kappa(),
            e.sigma1_sq, e.sigma2_sq, e.sigma12, e.sigma23, model.resid_var()};
}

// C1.1: (s2p - s23)^{p-2} (-(p-1)s12^2 + (p-2)s1 s23 + s1 s2p) > 0
bool c11_holds(const Exch& e) {
    const double second = -(e.p - 1.0) * e.s12 * e.s12 + (e.p - 2.0) * e.s1 * e.s23 + e.s1 * e.s2p;
    if (e.s2p <= e.s23) return false;
    return second > 0.0;
}

// C2.1: (p-2) s23 s1 + s1 s2p > 2 (p-1) s12^2, equivalently 2/r11 - s1 > 0
double c21_margin(const Exch& e) {
    return (e.p - 2.0) * e.s23 * e.s1 + e.s1 * e.s2p - 2.0 * (e.p - 1.0) * e.s12 * e.s12;
}

}  // namespace

EllipseAxes ellipse_axes(const CovarianceModel& model) {
    const Exch e = exch_of(model);
    if (!c11_holds(e)) fail(Errc::invalid_covariance, "exchangeable constraint C1.1 fails");
    const double num = c21_margin(e) * e.resid;
    if (!(num > 0.0)) fail(Errc::degenerate_ellipse, "C2.1 fails: the ellipsoid is degenerate");
    const double shared = (e.p - 2.0) * e.s23 + e.s2p;
    const double den_a =
        shared * ((2.0 + 4.0 * e.k) / (1.0 + e.k) * e.s12 * e.s12 + e.s1 * e.s2p + e.s1 * e.s23);
    const double den_b = shared * (e.s1 * e.s2p - e.s1 * e.s23);
    return {std::sqrt(num / den_a), std::sqrt(num / den_b)};
}

Breakpoints breakpoints(const CovarianceModel& model, SweepParameter parameter) {
    const int p = model.n_predictors();
    const double k = model.kappa();

    if (p == 2) {
        const Eigen::MatrixXd sx = model.sigma_x();
        const double s1 = sx(0, 0), s2 = sx(1, 1), s12 = sx(0, 1);
        Breakpoints out{nan_v, nan_v};
        switch (parameter) {
            case SweepParameter::kappa:
                out.i_l = -0.5;
                out.i_r = inf_v;
                break;
            case SweepParameter::sigma12: {
                const double bound = std::sqrt(s1 * s2 / 2.0);
                out.i_l = -bound;
                out.i_r = bound;
                break;
            }
            case SweepParameter::sigma2_sq:
                out.i_l = 2.0 * s12 * s12 / s1;
                out.i_r = inf_v;
                out.m0 = (2.0 + std::sqrt(8.0 - 2.0 / (1.0 + k))) * s12 * s12 / s1;
                break;
            case SweepParameter::sigma1_sq:
                out.i_l = 2.0 * s12 * s12 / s2;
                out.i_r = inf_v;
                break;
            case SweepParameter::resid_var:
                out.i_l = 0.0;
                out.i_r = inf_v;
                break;
            case SweepParameter::dimension:
            case SweepParameter::sigma23:
                fail(Errc::invalid_argument, "parameter undefined for p = 2");
        }
        if (out.i_l >= out.i_r) fail(Errc::infeasible_configuration, "empty feasible range");
        return out;
    }

    const Exch e = exch_of(model);
    const double pm1 = e.p - 1.0, pm2 = e.p - 2.0;
    Breakpoints out{nan_v, nan_v};
    out.con1 = (2.0 + 2.0 * e.p - 2.0 / (1.0 + e.k)) * e.s12 * e.s12 + (3.0 - e.p) * e.s1 * e.s23;

    switch (parameter) {
        case SweepParameter::dimension: {
            out.i_l = 3.0;
            out.i_r = inf_v;
            // C2.1 linear in p: p (s1 s23 - 2 s12^2) + (s1 s2p - 2 s1 s23 + 2 s12^2) > 0
            const double slope_c21 = e.s1 * e.s23 - 2.0 * e.s12 * e.s12;
            const double icept_c21 = e.s1 * e.s2p - 2.0 * e.s1 * e.s23 + 2.0 * e.s12 * e.s12;
            if (slope_c21 < 0.0) out.i_r = std::min(out.i_r, -icept_c21 / slope_c21);
            // C1.1 second factor: p (s1 s23 - s12^2) + (s1 s2p - 2 s1 s23 + s12^2) > 0
            const double slope_c11 = e.s1 * e.s23 - e.s12 * e.s12;
            const double icept_c11 = e.s1 * e.s2p - 2.0 * e.s1 * e.s23 + e.s12 * e.s12;
            if (slope_c11 < 0.0) out.i_r = std::min(out.i_r, -icept_c11 / slope_c11);
            break;
        }
        case SweepParameter::kappa:
            out.i_l = -0.5;
            out.i_r = inf_v;
            break;
        case SweepParameter::sigma12: {
            const double bound = std::sqrt((pm2 * e.s1 * e.s23 + e.s1 * e.s2p) / (2.0 * pm1));
            out.i_l = -bound;
            out.i_r = bound;
            break;
        }
        case SweepParameter::sigma23: {
            out.i_l = (2.0 * pm1 * e.s12 * e.s12 - e.s1 * e.s2p) / (pm2 * e.s1);
            out.i_r = e.s2p;
            out.m1 = sqrt_or_nan(2.0 * e.s12 * e.s12 * pm1 *
                                 ((e.p - 3.0) * e.s1 * e.s2p +
                                  (2.0 * e.p - 2.0 + pm2 * (2.0 + 4.0 * e.k) / (1.0 + e.k)) *
                                      e.s12 * e.s12)) /
                         (e.s1 * pm2) -
                     (e.s1 * e.s2p - 2.0 * pm1 * e.s12 * e.s12) / (e.s1 * pm2);
            if (2.0 * e.s12 * e.s12 > e.s1 * e.s2p)
                out.m3 = -pm1 * std::sqrt(2.0 * e.s12 * e.s12 *
                                          (2.0 * e.s12 * e.s12 - e.s1 * e.s2p)) /
                             (e.s1 * pm2) -
                         (e.s1 * e.s2p - 2.0 * pm1 * e.s12 * e.s12) / (e.s1 * pm2);
            break;
        }
        case SweepParameter::sigma2_sq: {
            out.i_l = std::max(e.s23, 2.0 * pm1 * e.s12 * e.s12 / e.s1 - pm2 * e.s23);
            out.i_r = inf_v;
            out.m2 = (std::sqrt(std::max(
                          0.0, 2.0 * e.s12 * e.s12 * pm1 *
                                   ((2.0 + 2.0 * e.p - 2.0 / (1.0 + e.k)) * e.s12 * e.s12 +
                                    (3.0 - e.p) * e.s1 * e.s23))) +
                      (2.0 * e.p - 2.0) * e.s12 * e.s12) /
                         e.s1 +
                     (2.0 - e.p) * e.s23;
            if (2.0 * e.s12 * e.s12 > e.s1 * e.s23)
                out.m4 = pm1 / e.s1 *
                             (std::sqrt(2.0 * e.s12 * e.s12 *
                                        (2.0 * e.s12 * e.s12 - e.s1 * e.s23)) +
                              2.0 * e.s12 * e.s12) +
                         (2.0 - e.p) * e.s23;
            break;
        }
        case SweepParameter::sigma1_sq: {
            const double d0 = pm2 * e.s23 + e.s2p;
            if (!(d0 > 0.0))
                fail(Errc::infeasible_configuration,
                     "(p-2) sigma23 + sigma2'^2 <= 0: no feasible sigma1^2");
            out.i_l = 2.0 * pm1 * e.s12 * e.s12 / d0;
            out.i_r = inf_v;
            break;
        }
        case SweepParameter::resid_var:
            out.i_l = 0.0;
            out.i_r = inf_v;
            break;
    }
    if (!(out.i_l < out.i_r)) fail(Errc::infeasible_configuration, "empty feasible range");
    return out;
}

namespace {

Verdict verdict_of(double decisive, double var_cc, double var_ac) {
    const double tol = 1e-12 * std::max(std::abs(var_cc), std::abs(var_ac));
    if (std::abs(decisive) <= tol) return Verdict::tie;
    return decisive > 0.0 ? Verdict::ac : Verdict::cc;
}

}  // namespace

Recommendation advise_pattern_b(const CovarianceModel& model, double q1, double q_rest, long n) {
    const int p = model.n_predictors();
    if (p < 2) fail(Errc::invalid_pattern, "pattern (b) needs at least two predictors");
    if (!(q1 <= q_rest) || !(q1 > 0.0) || !(q_rest <= 1.0))
        fail(Errc::invalid_pattern, "pattern (b) needs 0 < q1 <= q_rest <= 1");

    const double k = model.kappa();
    const double s1 = model.sigma_x()(0, 0);
    const double r11 = model.precision_x()(0, 0);
    const double b1 = model.beta()(0);
    // c1 in the Cauchy-Schwarz form; always >= 0
    const double c1 = (1.0 + k) * s1 * (r11 * r11 * s1 - r11) +
                      (1.0 + 2.0 * k) * (1.0 - r11 * s1) * (1.0 - r11 * s1);
    const double decisive = (1.0 / q1 - 1.0 / q_rest) *
                            ((1.0 + k) * (r11 - r11 * r11 * s1) * model.resid_var() - c1 * b1 * b1);

    ProportionSet props = ProportionSet::pattern_b(q1, q_rest, p + 1);
    Recommendation rec;
    rec.var_cc = v_single(model, props, n, Method::cc);
    rec.var_ac = v_single(model, props, n, Method::ac);
    rec.decisive_value = decisive;
    rec.verdict = verdict_of(decisive, static_cast<double>(n) * rec.var_cc,
                             static_cast<double>(n) * rec.var_ac);
    rec.conditions.push_back("pattern_b_cc_never_worse");
    if (rec.verdict == Verdict::tie)
        rec.conditions.push_back("pattern_b_tie_x1_independent");
    return rec;
}

Recommendation advise(const CovarianceModel& model, const PatternSpec& pattern, long n) {
    const int p = model.n_predictors();
    const Eigen::MatrixXd sx = model.sigma_x();

    if (pattern.kind == PatternKind::b)
        return advise_pattern_b(model, pattern.q1, pattern.q_rest, n);

    if (pattern.kind == PatternKind::a) {
        Recommendation rec;
        const double f = f_beta_pattern_a(model, pattern.q1, pattern.q_rest);
        ProportionSet props = ProportionSet::pattern_a(pattern.q1, pattern.q_rest, p + 1);
        rec.var_cc = v_single(model, props, n, Method::cc);
        rec.var_ac = v_single(model, props, n, Method::ac);
        rec.decisive_value = f;
        rec.verdict = verdict_of(f, static_cast<double>(n) * rec.var_cc,
                                 static_cast<double>(n) * rec.var_ac);
        rec.conditions.push_back("pattern_a");

        bool independent = true;
        for (int a = 0; a < p && independent; ++a)
            for (int b = a + 1; b < p; ++b)
                if (std::abs(sx(a, b)) > 1e-12 * sx.diagonal().maxCoeff()) {
                    independent = false;
                    break;
                }
        if (independent) rec.conditions.push_back("independent_predictors_threshold");

        if (p == 2) {
            const double s1 = sx(0, 0), s2 = sx(1, 1), s12 = sx(0, 1);
            if (s1 * s2 < 2.0 * s12 * s12) {
                rec.conditions.push_back("cc_sufficient_strong_correlation");
            } else {
                rec.interval_c = interval_length_c(model);
                rec.breakpoints = breakpoints(model, SweepParameter::sigma2_sq);
            }
        } else {
            bool exch = true;
            try {
                exchangeable_params(model);
            } catch (const Error&) {
                exch = false;
            }
            if (exch) {
                const Exch e = exch_of(model);
                if (!(c21_margin(e) > 0.0)) {
                    rec.conditions.push_back("cc_sufficient_exchangeable");
                } else if (c11_holds(e)) {
                    rec.ellipse = ellipse_axes(model);
                }
            }
        }
        return rec;
    }

    // general pattern: full matrix computation, first predictor is the target
    ProportionSet props = pattern.proportions(p + 1);
    AsymptoticReport rep = v_matrices(model, props, n);
    Recommendation rec;
    rec.var_cc = rep.v_cc(0, 0);
    rec.var_ac = rep.v_ac(0, 0);
    rec.decisive_value = rep.v_d(0, 0);
    rec.verdict = verdict_of(rec.decisive_value, rec.var_cc, rec.var_ac);
    rec.conditions.push_back("matrix_path");
    return rec;
}

}  // namespace delreg
