#include "delreg/asymptotics.hpp"

#include <cmath>
#include <vector>

#include "delreg/errors.hpp"

namespace delreg {

HalfVecIndex::HalfVecIndex(int n_predictors) : p_(n_predictors) {
    if (p_ < 1) fail(Errc::invalid_argument, "need at least one predictor");
    dim_ = p_ * (p_ + 3) / 2;
}

int HalfVecIndex::index(int j, int k) const {
    if (j > k || j < 0 || k > p_ || (j == p_ && k == p_))
        fail(Errc::invalid_argument, "pair outside the S* arrangement");
    // row j holds pairs (j,j)..(j,p): p+1-j entries
    int offset = 0;
    for (int r = 0; r < j; ++r) offset += p_ + 1 - r;
    return offset + (k - j);
}

std::pair<int, int> HalfVecIndex::pair(int idx) const {
    if (idx < 0 || idx >= dim_) fail(Errc::invalid_argument, "flat index out of range");
    int j = 0;
    while (idx >= p_ + 1 - j) {
        idx -= p_ + 1 - j;
        ++j;
    }
    return {j, j + idx};
}

Eigen::MatrixXd phi_elliptical(const CovarianceModel& model) {
    const double kappa = model.kappa();
    if (!(kappa > -0.5)) fail(Errc::invalid_kappa, "kappa must exceed -1/2");
    const Eigen::MatrixXd& s = model.sigma();
    HalfVecIndex hv(model.n_predictors());
    const int d = hv.dim();
    Eigen::MatrixXd phi(d, d);
    for (int a = 0; a < d; ++a) {
        auto [j, k] = hv.pair(a);
        for (int b = a; b < d; ++b) {
            auto [m, n] = hv.pair(b);
            double v = (1.0 + kappa) * (s(j, k) * s(m, n) + s(j, m) * s(k, n) + s(j, n) * s(k, m)) -
                       s(j, k) * s(m, n);
            phi(a, b) = phi(b, a) = v;
        }
    }
    return phi;
}

Eigen::MatrixXd phi_empirical(const Dataset& data) {
    if (data.rows() == 0) fail(Errc::empty_dataset, "no rows");
    if (!data.fully_observed())
        fail(Errc::invalid_argument, "phi_empirical needs fully observed data");
    Dataset d = data.response_last();
    const long n = d.rows();
    const int p = d.n_predictors();
    Eigen::RowVectorXd mean = d.values().colwise().mean();
    Eigen::MatrixXd centered = d.values().rowwise() - mean;
    Eigen::MatrixXd s = centered.transpose() * centered / static_cast<double>(n);

    HalfVecIndex hv(p);
    const int dim = hv.dim();
    Eigen::MatrixXd phi(dim, dim);
    // fourth central moments: mean over rows of the per-pair products
    Eigen::MatrixXd prod(n, dim);
    for (int a = 0; a < dim; ++a) {
        auto [j, k] = hv.pair(a);
        prod.col(a) = centered.col(j).cwiseProduct(centered.col(k));
    }
    Eigen::MatrixXd fourth = prod.transpose() * prod / static_cast<double>(n);
    for (int a = 0; a < dim; ++a) {
        auto [j, k] = hv.pair(a);
        for (int b = a; b < dim; ++b) {
            auto [m, mn] = hv.pair(b);
            double v = fourth(a, b) - s(j, k) * s(m, mn);
            phi(a, b) = phi(b, a) = v;
        }
    }
    return phi;
}

Eigen::MatrixXd delta_matrix(const CovarianceModel& model) {
    const int p = model.n_predictors();
    if (!is_positive_definite(model.sigma_x()))
        fail(Errc::singular_sigma_x, "predictor covariance not invertible at tolerance");
    const Eigen::MatrixXd& rx = model.precision_x();
    const Eigen::VectorXd& beta = model.beta();
    HalfVecIndex hv(p);
    Eigen::MatrixXd delta(p, hv.dim());
    for (int a = 0; a < hv.dim(); ++a) {
        auto [j, k] = hv.pair(a);
        if (k < p) {
            if (j == k)
                delta.col(a) = -rx.col(j) * beta(j);
            else
                delta.col(a) = -(rx.col(j) * beta(k) + rx.col(k) * beta(j));
        } else {
            delta.col(a) = rx.col(j);
        }
    }
    return delta;
}

Eigen::MatrixXd q_matrix(const ProportionSet& props) {
    const int p = props.columns() - 1;
    HalfVecIndex hv(p);
    const int d = hv.dim();
    Eigen::MatrixXd q(d, d);
    for (int a = 0; a < d; ++a) {
        auto [j, k] = hv.pair(a);
        const double qjk = props.q({j, k});
        if (qjk <= 0.0) fail(Errc::zero_proportion, "pair proportion is zero");
        for (int b = a; b < d; ++b) {
            auto [m, n] = hv.pair(b);
            const double qmn = props.q({m, n});
            if (qmn <= 0.0) fail(Errc::zero_proportion, "pair proportion is zero");
            const double qjkmn = props.q({j, k, m, n});
            q(a, b) = q(b, a) = qjkmn / (qjk * qmn);
        }
    }
    return q;
}

AsymptoticReport v_matrices(const Eigen::MatrixXd& phi, const CovarianceModel& model,
                            const ProportionSet& props, long n) {
    if (n <= 0) fail(Errc::invalid_argument, "n must be positive");
    if (props.columns() != model.n_predictors() + 1)
        fail(Errc::invalid_argument, "proportions and model disagree on column count");
    const double qt = props.q_complete();
    if (!(qt > 0.0)) fail(Errc::zero_proportion, "complete-row proportion is zero");

    AsymptoticReport rep;
    rep.phi = phi;
    rep.delta = delta_matrix(model);
    rep.q_ratio = q_matrix(props);
    rep.n = n;
    const double dn = static_cast<double>(n);
    rep.v_cc = rep.delta * rep.phi * rep.delta.transpose() / (dn * qt);
    rep.v_ac = rep.delta * rep.phi.cwiseProduct(rep.q_ratio) * rep.delta.transpose() / dn;
    rep.v_d = rep.v_cc - rep.v_ac;
    return rep;
}

AsymptoticReport v_matrices(const CovarianceModel& model, const ProportionSet& props, long n) {
    return v_matrices(phi_elliptical(model), model, props, n);
}

namespace {

// The closed form treats the response as if complete: adding the response
// column to any predictor subset must not change its proportion. Holds when
// the response is fully observed, and also when rows go missing as a whole.
void require_response_nested(const ProportionSet& props) {
    const int resp = props.columns() - 1;
    const int p = resp;
    auto same = [&](double a, double b) { return std::abs(a - b) <= 1e-12 * std::max(a, b); };
    for (int j = 0; j < p; ++j) {
        if (!same(props.q({j, resp}), props.q({j})))
            fail(Errc::invalid_pattern,
                 "closed-form AC variance needs the response observed wherever predictors are");
        for (int k = j; k < p; ++k) {
            if (!same(props.q({j, k, resp}), props.q({j, k})))
                fail(Errc::invalid_pattern,
                     "closed-form AC variance needs the response observed wherever predictors are");
            for (int m = k; m < p; ++m)
                if (!same(props.q({j, k, m, resp}), props.q({j, k, m})))
                    fail(Errc::invalid_pattern,
                         "closed-form AC variance needs the response observed wherever "
                         "predictors are");
        }
    }
}

}  // namespace

SingleCoefTerms single_coef_terms(const CovarianceModel& model, const ProportionSet& props) {
    const int p = model.n_predictors();
    const double kappa = model.kappa();
    if (!(kappa > -0.5)) fail(Errc::invalid_kappa, "kappa must exceed -1/2");
    require_response_nested(props);
    if (props.has_zero_pair()) fail(Errc::zero_proportion, "a column pair is never jointly observed");

    const Eigen::MatrixXd sx = model.sigma_x();
    const Eigen::VectorXd a = model.precision_x().row(0);
    const double lam = kappa / (1.0 + kappa);

    std::vector<double> q1(static_cast<std::size_t>(p));
    for (int j = 0; j < p; ++j) {
        q1[static_cast<std::size_t>(j)] = props.q({j});
        if (q1[static_cast<std::size_t>(j)] <= 0.0)
            fail(Errc::zero_proportion, "column proportion is zero");
    }
    auto q2 = [&](int j, int k) { return props.q({j, k}); };
    auto q3 = [&](int j, int k, int m) { return props.q({j, k, m}); };
    auto q4 = [&](int j, int k, int m, int n) { return props.q({j, k, m, n}); };

    // Const = sigma^2 [ sum_j a_j^2 s_jj / q_j + sum_{j!=m} a_j a_m s_jm q_jm/(q_j q_m) ]
    double u0 = 0.0;
    for (int j = 0; j < p; ++j)
        for (int m = 0; m < p; ++m)
            u0 += a(j) * a(m) * sx(j, m) * q2(j, m) / (q1[j] * q1[m]);

    // m(g,h) = sum_{j,m} a_j a_m (s_jm s_gh + s_jh s_gm + lam s_jg s_mh) L_gh(j,m)
    // with L_gh(j,m) = q_{jgmh}/(q_jg q_mh) - q_{jgm}/(q_jg q_m)
    //                - q_{jmh}/(q_mh q_j) + q_jm/(q_j q_m).
    // Diagonal m(g,g) is the paper's c_g; off-diagonal d_gh = 2 m(g,h).
    Eigen::MatrixXd mcoef = Eigen::MatrixXd::Zero(p, p);
    for (int g = 0; g < p; ++g) {
        for (int h = g; h < p; ++h) {
            double acc = 0.0;
            for (int j = 0; j < p; ++j) {
                for (int m = 0; m < p; ++m) {
                    const double qjg = q2(j, g);
                    const double qmh = q2(m, h);
                    const double ell = q4(j, g, m, h) / (qjg * qmh) - q3(j, g, m) / (qjg * q1[m]) -
                                       q3(j, m, h) / (qmh * q1[j]) + q2(j, m) / (q1[j] * q1[m]);
                    if (ell == 0.0) continue;
                    acc += a(j) * a(m) *
                           (sx(j, m) * sx(g, h) + sx(j, h) * sx(g, m) + lam * sx(j, g) * sx(m, h)) *
                           ell;
                }
            }
            mcoef(g, h) = mcoef(h, g) = acc;
        }
    }

    SingleCoefTerms out;
    out.m = std::move(mcoef);
    out.constant = u0 * model.resid_var();
    return out;
}

double v_single(const CovarianceModel& model, const ProportionSet& props, long n, Method method,
                int target) {
    if (n <= 0) fail(Errc::invalid_argument, "n must be positive");
    const int p = model.n_predictors();
    if (target < 0 || target >= p) fail(Errc::invalid_argument, "target out of range");
    if (props.columns() != p + 1)
        fail(Errc::invalid_argument, "proportions and model disagree on column count");
    const double kappa = model.kappa();
    if (!(kappa > -0.5)) fail(Errc::invalid_kappa, "kappa must exceed -1/2");

    if (method == Method::cc) {
        const double qt = props.q_complete();
        if (!(qt > 0.0)) fail(Errc::zero_proportion, "complete-row proportion is zero");
        CovarianceModel m = model.with_target_first(target);
        return (1.0 + kappa) * m.precision_x()(0, 0) * m.resid_var() /
               (qt * static_cast<double>(n));
    }

    CovarianceModel m = model.with_target_first(target);
    ProportionSet pr = props;
    if (target != 0) {
        std::vector<int> new_to_old(static_cast<std::size_t>(p + 1));
        for (int j = 0; j <= p; ++j) new_to_old[static_cast<std::size_t>(j)] = j;
        std::swap(new_to_old[0], new_to_old[static_cast<std::size_t>(target)]);
        pr = props.permuted(new_to_old);
    }
    SingleCoefTerms terms = single_coef_terms(m, pr);
    const Eigen::VectorXd& beta = m.beta();
    double quad = beta.dot(terms.m * beta);
    return (1.0 + kappa) * (terms.constant + quad) / static_cast<double>(n);
}

}  // namespace delreg
