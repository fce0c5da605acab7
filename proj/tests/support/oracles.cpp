#include "support/oracles.hpp"

#include <Eigen/Dense>
#include <cmath>

#include "delreg/asymptotics.hpp"

namespace oracles {

using delreg::Dataset;

Eigen::MatrixXd pairwise_cov(const Dataset& data) {
    const int m = data.cols();
    Eigen::MatrixXd out(m, m);
    for (int j = 0; j < m; ++j) {
        for (int k = 0; k < m; ++k) {
            std::vector<double> xs, ys;
            for (long i = 0; i < data.rows(); ++i) {
                if (data.observed(i, j) && data.observed(i, k)) {
                    xs.push_back(data.value(i, j));
                    ys.push_back(data.value(i, k));
                }
            }
            double mx = 0.0, my = 0.0;
            for (std::size_t i = 0; i < xs.size(); ++i) {
                mx += xs[i];
                my += ys[i];
            }
            mx /= static_cast<double>(xs.size());
            my /= static_cast<double>(ys.size());
            double acc = 0.0;
            for (std::size_t i = 0; i < xs.size(); ++i) acc += (xs[i] - mx) * (ys[i] - my);
            out(j, k) = acc / static_cast<double>(xs.size());
        }
    }
    return out;
}

Eigen::MatrixXd complete_rows_cov(const Dataset& data) {
    const int m = data.cols();
    std::vector<long> rows;
    for (long i = 0; i < data.rows(); ++i)
        if (data.row_complete(i)) rows.push_back(i);
    Eigen::VectorXd mean = Eigen::VectorXd::Zero(m);
    for (long i : rows) mean += data.values().row(i).transpose();
    mean /= static_cast<double>(rows.size());
    Eigen::MatrixXd out = Eigen::MatrixXd::Zero(m, m);
    for (long i : rows) {
        Eigen::VectorXd d = data.values().row(i).transpose() - mean;
        out += d * d.transpose();
    }
    return out / static_cast<double>(rows.size());
}

Eigen::VectorXd qr_least_squares(const Dataset& data) {
    std::vector<long> rows;
    for (long i = 0; i < data.rows(); ++i)
        if (data.row_complete(i)) rows.push_back(i);
    const std::vector<int> pred = data.predictor_columns();
    const long n = static_cast<long>(rows.size());
    Eigen::MatrixXd x(n, static_cast<long>(pred.size()));
    Eigen::VectorXd y(n);
    for (long r = 0; r < n; ++r) {
        for (std::size_t j = 0; j < pred.size(); ++j)
            x(r, static_cast<long>(j)) = data.value(rows[static_cast<std::size_t>(r)], pred[j]);
        y(r) = data.value(rows[static_cast<std::size_t>(r)], data.response_index());
    }
    Eigen::RowVectorXd xm = x.colwise().mean();
    x.rowwise() -= xm;
    y.array() -= y.mean();
    return x.householderQr().solve(y);
}

Eigen::MatrixXd finite_difference_delta(const delreg::CovarianceModel& model, double h) {
    const int p = model.n_predictors();
    delreg::HalfVecIndex hv(p);
    const Eigen::MatrixXd sigma = model.sigma();

    auto beta_of = [&](const Eigen::MatrixXd& s) -> Eigen::VectorXd {
        const Eigen::MatrixXd sx = s.topLeftCorner(p, p);
        const Eigen::VectorXd sxy = s.topRightCorner(p, 1);
        return sx.llt().solve(sxy);
    };

    Eigen::MatrixXd delta(p, hv.dim());
    for (int a = 0; a < hv.dim(); ++a) {
        auto [j, k] = hv.pair(a);
        Eigen::MatrixXd up = sigma, dn = sigma;
        up(j, k) += h;
        dn(j, k) -= h;
        if (j != k) {
            up(k, j) += h;
            dn(k, j) -= h;
        }
        delta.col(a) = (beta_of(up) - beta_of(dn)) / (2.0 * h);
    }
    return delta;
}

Eigen::MatrixXd mc_fourth_moments(const Eigen::MatrixXd& z) {
    const long n = z.rows();
    const int m = static_cast<int>(z.cols());
    const int p = m - 1;
    Eigen::RowVectorXd mean = z.colwise().mean();
    Eigen::MatrixXd c = z.rowwise() - mean;
    Eigen::MatrixXd s = Eigen::MatrixXd::Zero(m, m);
    for (long i = 0; i < n; ++i)
        for (int a = 0; a < m; ++a)
            for (int b = 0; b < m; ++b) s(a, b) += c(i, a) * c(i, b);
    s /= static_cast<double>(n);

    delreg::HalfVecIndex hv(p);
    Eigen::MatrixXd phi(hv.dim(), hv.dim());
    for (int a = 0; a < hv.dim(); ++a) {
        auto [j, k] = hv.pair(a);
        for (int b = 0; b < hv.dim(); ++b) {
            auto [mm, nn] = hv.pair(b);
            double acc = 0.0;
            for (long i = 0; i < n; ++i) acc += c(i, j) * c(i, k) * c(i, mm) * c(i, nn);
            phi(a, b) = acc / static_cast<double>(n) - s(j, k) * s(mm, nn);
        }
    }
    return phi;
}

Eigen::MatrixXd random_spd(int dim, std::mt19937_64& rng) {
    std::normal_distribution<double> normal(0.0, 1.0);
    std::uniform_real_distribution<double> unif(0.3, 1.5);
    Eigen::MatrixXd a(dim, dim);
    for (int i = 0; i < dim; ++i)
        for (int j = 0; j < dim; ++j) a(i, j) = normal(rng);
    Eigen::MatrixXd s = a * a.transpose() / static_cast<double>(dim);
    for (int i = 0; i < dim; ++i) s(i, i) += unif(rng);
    return s;
}

delreg::CovarianceModel random_model(int p, std::mt19937_64& rng, bool random_kappa) {
    std::normal_distribution<double> normal(0.0, 1.0);
    std::uniform_real_distribution<double> upos(0.2, 2.0);
    // a (p+1)-dimensional elliptical law requires kappa >= -2/(p+3); staying
    // inside that keeps Phi a genuine covariance
    std::uniform_real_distribution<double> ukap(-1.9 / (p + 3.0), 3.0);
    Eigen::MatrixXd sx = random_spd(p, rng);
    Eigen::VectorXd beta(p);
    for (int j = 0; j < p; ++j) beta(j) = normal(rng);
    const double kappa = random_kappa ? ukap(rng) : 0.0;
    return delreg::CovarianceModel::from_regression(sx, beta, upos(rng), kappa);
}

delreg::ProportionSet random_proportions(int columns, std::mt19937_64& rng, int denominator) {
    // distribute `denominator` rows over random observation patterns; the
    // all-observed pattern keeps at least a quarter of the mass so q~ > 0
    std::uniform_int_distribution<int> pattern_bits(0, (1 << (columns - 1)) - 1);
    std::vector<int> pattern(static_cast<std::size_t>(denominator));
    const int full = (1 << (columns - 1)) - 1;
    for (int i = 0; i < denominator; ++i)
        pattern[static_cast<std::size_t>(i)] = (i < denominator / 4) ? full : pattern_bits(rng);

    Eigen::MatrixXd values = Eigen::MatrixXd::Zero(denominator, columns);
    delreg::Mask mask(denominator, columns);
    for (int i = 0; i < denominator; ++i) {
        for (int j = 0; j + 1 < columns; ++j)
            mask(i, j) = static_cast<std::uint8_t>((pattern[static_cast<std::size_t>(i)] >> j) & 1);
        mask(i, columns - 1) = 1;  // response observed
    }
    Dataset d(std::move(values), std::move(mask), columns - 1);
    return delreg::observation_proportions(d);
}

Eigen::MatrixXd normal_sample(const Eigen::MatrixXd& sigma, long n, std::mt19937_64& rng) {
    std::normal_distribution<double> normal(0.0, 1.0);
    const int d = static_cast<int>(sigma.rows());
    Eigen::MatrixXd l = Eigen::LLT<Eigen::MatrixXd>(sigma).matrixL();
    Eigen::MatrixXd z(n, d);
    Eigen::VectorXd w(d);
    for (long i = 0; i < n; ++i) {
        for (int j = 0; j < d; ++j) w(j) = normal(rng);
        z.row(i) = (l * w).transpose();
    }
    return z;
}

}  // namespace oracles
