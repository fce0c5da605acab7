#include "delreg/model.hpp"

#include <Eigen/Dense>
#include <cmath>

#include "delreg/errors.hpp"

namespace delreg {

Eigen::VectorXd ldlt_pivots(const Eigen::MatrixXd& m) {
    const long n = m.rows();
    Eigen::MatrixXd l = Eigen::MatrixXd::Identity(n, n);
    Eigen::VectorXd d(n);
    for (long j = 0; j < n; ++j) {
        double dj = m(j, j);
        for (long k = 0; k < j; ++k) dj -= l(j, k) * l(j, k) * d(k);
        d(j) = dj;
        for (long i = j + 1; i < n; ++i) {
            double v = m(i, j);
            for (long k = 0; k < j; ++k) v -= l(i, k) * l(j, k) * d(k);
            l(i, j) = (dj != 0.0) ? v / dj : 0.0;
        }
    }
    return d;
}

bool is_positive_definite(const Eigen::MatrixXd& m) {
    if (m.rows() == 0 || m.rows() != m.cols()) return false;
    const double tol = 1e-10 * m.diagonal().maxCoeff();
    Eigen::VectorXd d = ldlt_pivots(m);
    return (d.array() > tol).all();
}

namespace {

void require_spd(const Eigen::MatrixXd& sigma, const char* what) {
    if (sigma.rows() != sigma.cols()) fail(Errc::invalid_argument, "covariance not square");
    if (!sigma.isApprox(sigma.transpose(), 1e-12))
        fail(Errc::invalid_argument, std::string(what) + " not symmetric");
    if (!is_positive_definite(sigma))
        fail(Errc::not_positive_definite, std::string(what) + " has a nonpositive pivot");
}

void require_kappa(double kappa) {
    if (!(kappa > -0.5)) fail(Errc::invalid_kappa, "kappa must exceed -1/2");
}

}  // namespace

CovarianceModel CovarianceModel::from_sigma(const Eigen::MatrixXd& sigma,
                                            const Eigen::VectorXd& mean, int response_index,
                                            double kappa) {
    const int m = static_cast<int>(sigma.rows());
    if (m < 2) fail(Errc::invalid_argument, "need at least one predictor and a response");
    if (response_index < 0 || response_index >= m)
        fail(Errc::invalid_argument, "response index out of range");
    if (mean.size() != m) fail(Errc::invalid_argument, "mean length mismatch");
    require_kappa(kappa);

    // reorder so the response is last
    std::vector<int> order;
    for (int j = 0; j < m; ++j)
        if (j != response_index) order.push_back(j);
    order.push_back(response_index);

    Eigen::MatrixXd s(m, m);
    Eigen::VectorXd mu(m);
    for (int a = 0; a < m; ++a) {
        mu(a) = mean(order[a]);
        for (int b = 0; b < m; ++b) s(a, b) = sigma(order[a], order[b]);
    }
    require_spd(s, "sigma");

    const int p = m - 1;
    CovarianceModel out;
    out.mean_ = std::move(mu);
    out.sigma_ = s;
    out.precision_ = s.inverse();
    Eigen::MatrixXd sx = s.topLeftCorner(p, p);
    out.precision_x_ = sx.inverse();
    Eigen::VectorXd sxy = s.topRightCorner(p, 1);
    out.beta_ = out.precision_x_ * sxy;
    out.resid_var_ = s(p, p) - sxy.dot(out.beta_);
    out.kappa_ = kappa;
    return out;
}

CovarianceModel CovarianceModel::from_sigma(const Eigen::MatrixXd& sigma, int response_index,
                                            double kappa) {
    return from_sigma(sigma, Eigen::VectorXd::Zero(sigma.rows()), response_index, kappa);
}

CovarianceModel CovarianceModel::from_regression(const Eigen::MatrixXd& sigma_x,
                                                 const Eigen::VectorXd& beta, double resid_var,
                                                 double kappa) {
    const int p = static_cast<int>(sigma_x.rows());
    if (beta.size() != p) fail(Errc::invalid_argument, "beta length mismatch");
    if (!(resid_var >= 0.0)) fail(Errc::invalid_argument, "residual variance must be >= 0");
    require_spd(sigma_x, "sigma_x");
    require_kappa(kappa);

    Eigen::MatrixXd s(p + 1, p + 1);
    s.topLeftCorner(p, p) = sigma_x;
    Eigen::VectorXd sxy = sigma_x * beta;
    s.topRightCorner(p, 1) = sxy;
    s.bottomLeftCorner(1, p) = sxy.transpose();
    s(p, p) = beta.dot(sxy) + resid_var;
    CovarianceModel out = from_sigma(s, p, kappa);
    // keep the handed-in parameters bit for bit; re-deriving them through the
    // partition would contaminate them with solver rounding
    out.beta_ = beta;
    out.resid_var_ = resid_var;
    return out;
}

CovarianceModel CovarianceModel::with_kappa(double kappa) const {
    CovarianceModel out = *this;
    if (!(kappa > -0.5)) fail(Errc::invalid_kappa, "kappa must exceed -1/2");
    out.kappa_ = kappa;
    return out;
}

CovarianceModel CovarianceModel::with_target_first(int target) const {
    const int p = n_predictors();
    if (target < 0 || target >= p) fail(Errc::invalid_argument, "target out of range");
    if (target == 0) return *this;
    std::vector<int> order(static_cast<std::size_t>(p + 1));
    for (int j = 0; j <= p; ++j) order[static_cast<std::size_t>(j)] = j;
    std::swap(order[0], order[static_cast<std::size_t>(target)]);
    Eigen::MatrixXd s(p + 1, p + 1);
    Eigen::VectorXd mu(p + 1);
    for (int a = 0; a <= p; ++a) {
        mu(a) = mean_(order[static_cast<std::size_t>(a)]);
        for (int b = 0; b <= p; ++b)
            s(a, b) = sigma_(order[static_cast<std::size_t>(a)], order[static_cast<std::size_t>(b)]);
    }
    return from_sigma(s, mu, p, kappa_);
}

CovarianceModel partition_model(const Eigen::MatrixXd& sigma, int response_index, double kappa) {
    return CovarianceModel::from_sigma(sigma, response_index, kappa);
}

}  // namespace delreg
