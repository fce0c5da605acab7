#include "delreg/kurtosis.hpp"

#include <Eigen/Dense>
#include <cmath>
#include <string>

#include "delreg/errors.hpp"
#include "delreg/model.hpp"

namespace delreg {

KappaEstimate kappa_mardia(const Dataset& data) {
    const int m = data.cols();
    std::vector<long> keep;
    for (long i = 0; i < data.rows(); ++i)
        if (data.row_complete(i)) keep.push_back(i);
    const long n = static_cast<long>(keep.size());
    if (n <= m) fail(Errc::insufficient_rows, "need more complete rows than columns");

    Eigen::MatrixXd z(n, m);
    for (long r = 0; r < n; ++r) z.row(r) = data.values().row(keep[static_cast<std::size_t>(r)]);
    Eigen::RowVectorXd mean = z.colwise().mean();
    Eigen::MatrixXd centered = z.rowwise() - mean;
    Eigen::MatrixXd s = centered.transpose() * centered / static_cast<double>(n);
    if (!is_positive_definite(s))
        fail(Errc::singular_covariance, "sample covariance is singular");
    Eigen::MatrixXd si = s.inverse();

    double acc = 0.0;
    for (long i = 0; i < n; ++i) {
        const double d = centered.row(i) * si * centered.row(i).transpose();
        acc += d * d;
    }
    const double dim = static_cast<double>(m);
    KappaEstimate out;
    out.value = acc / (static_cast<double>(n) * (dim + 2.0) * dim) - 1.0;
    out.method = KappaMethod::mardia;
    out.below_population_bound = out.value <= -0.5;
    return out;
}

KappaEstimate kappa_marginal(const Dataset& data) {
    const int m = data.cols();
    KappaEstimate out;
    out.method = KappaMethod::marginal;
    out.per_column.resize(static_cast<std::size_t>(m));

    double total = 0.0;
    for (int j = 0; j < m; ++j) {
        std::vector<double> col;
        col.reserve(static_cast<std::size_t>(data.rows()));
        for (long i = 0; i < data.rows(); ++i)
            if (data.observed(i, j)) col.push_back(data.value(i, j));
        const long n = static_cast<long>(col.size());
        if (n < 4)
            fail(Errc::insufficient_rows,
                 "column " + std::to_string(j) + " has fewer than 4 observed values");
        double mean = 0.0;
        for (double v : col) mean += v;
        mean /= static_cast<double>(n);
        double m2 = 0.0, m4 = 0.0;
        for (double v : col) {
            const double d = v - mean;
            m2 += d * d;
            m4 += d * d * d * d;
        }
        m2 /= static_cast<double>(n);
        m4 /= static_cast<double>(n);
        const double k0 = m4 / (m2 * m2);
        const double dn = static_cast<double>(n);
        const double kj =
            (dn - 1.0) / ((dn - 2.0) * (dn - 3.0)) * ((dn + 1.0) * k0 - 3.0 * (dn - 1.0));
        out.per_column[static_cast<std::size_t>(j)] = kj;
        total += kj;
    }
    out.value = total / (3.0 * static_cast<double>(m));
    out.below_population_bound = out.value <= -0.5;
    return out;
}

}  // namespace delreg
