#include "delreg/estimators.hpp"

#include <Eigen/Dense>
#include <string>
#include <vector>

#include "delreg/errors.hpp"
#include "delreg/model.hpp"

namespace delreg {

const char* method_name(Method m) noexcept {
    return m == Method::cc ? "CC" : "AC";
}

CovEstimate cc_covariance(const Dataset& data) {
    const long n = data.rows();
    const int m = data.cols();
    std::vector<long> keep;
    keep.reserve(static_cast<std::size_t>(n));
    for (long i = 0; i < n; ++i)
        if (data.row_complete(i)) keep.push_back(i);
    const long nc = static_cast<long>(keep.size());
    if (nc < 2) fail(Errc::insufficient_complete_rows, "complete rows < 2");

    Eigen::VectorXd mean = Eigen::VectorXd::Zero(m);
    for (long i : keep) mean += data.values().row(i).transpose();
    mean /= static_cast<double>(nc);

    Eigen::MatrixXd cov = Eigen::MatrixXd::Zero(m, m);
    for (long i : keep) {
        Eigen::VectorXd d = data.values().row(i).transpose() - mean;
        cov.noalias() += d * d.transpose();
    }
    cov /= static_cast<double>(nc);

    CovEstimate out;
    out.matrix = std::move(cov);
    out.method = Method::cc;
    out.pd = is_positive_definite(out.matrix);
    out.counts = Eigen::MatrixXi::Constant(m, m, static_cast<int>(nc));
    return out;
}

CovEstimate ac_covariance(const Dataset& data) {
    const long n = data.rows();
    if (n == 0) fail(Errc::empty_dataset, "no rows");
    const int m = data.cols();

    Eigen::MatrixXd cov(m, m);
    Eigen::MatrixXi counts(m, m);
    for (int j = 0; j < m; ++j) {
        for (int k = j; k < m; ++k) {
            long njk = 0;
            double mj = 0.0, mk = 0.0;
            for (long i = 0; i < n; ++i) {
                if (data.observed(i, j) && data.observed(i, k)) {
                    ++njk;
                    mj += data.value(i, j);
                    mk += data.value(i, k);
                }
            }
            if (njk < 2)
                fail(Errc::empty_pair, "pair (" + std::to_string(j) + "," + std::to_string(k) +
                                           ") has fewer than 2 joint observations");
            mj /= static_cast<double>(njk);
            mk /= static_cast<double>(njk);
            double s = 0.0;
            for (long i = 0; i < n; ++i)
                if (data.observed(i, j) && data.observed(i, k))
                    s += (data.value(i, j) - mj) * (data.value(i, k) - mk);
            s /= static_cast<double>(njk);
            cov(j, k) = cov(k, j) = s;
            counts(j, k) = counts(k, j) = static_cast<int>(njk);
        }
    }

    CovEstimate out;
    out.matrix = std::move(cov);
    out.method = Method::ac;
    out.pd = is_positive_definite(out.matrix);
    out.counts = std::move(counts);
    return out;
}

FitResult fit(const Dataset& data, Method method) {
    CovEstimate est = (method == Method::cc) ? cc_covariance(data) : ac_covariance(data);

    const std::vector<int> pred = data.predictor_columns();
    const int p = static_cast<int>(pred.size());
    const int resp = data.response_index();
    Eigen::MatrixXd sx(p, p);
    Eigen::VectorXd sxy(p);
    for (int a = 0; a < p; ++a) {
        sxy(a) = est.matrix(pred[static_cast<std::size_t>(a)], resp);
        for (int b = 0; b < p; ++b)
            sx(a, b) = est.matrix(pred[static_cast<std::size_t>(a)], pred[static_cast<std::size_t>(b)]);
    }

    Eigen::FullPivLU<Eigen::MatrixXd> lu(sx);
    lu.setThreshold(1e-10);
    if (!lu.isInvertible()) fail(Errc::singular_design, "estimated predictor covariance is singular");

    FitResult out;
    out.beta_hat = lu.solve(sxy);
    out.method = method;
    if (method == Method::cc) {
        out.n_effective = est.counts(0, 0);
    } else {
        out.n_effective = est.counts.minCoeff();
    }
    out.cov_estimate = std::move(est);
    return out;
}

}  // namespace delreg
