#include <doctest.h>

#include <Eigen/Dense>
#include <cmath>
#include <random>

#include "delreg/errors.hpp"
#include "delreg/kurtosis.hpp"
#include "delreg/simulation.hpp"
#include "support/oracles.hpp"

using namespace delreg;

TEST_CASE("both estimators are near zero on large normal samples") {
    std::mt19937_64 rng(61);
    Eigen::MatrixXd sigma(3, 3);
    sigma << 1.0, 0.516, 0.454, 0.516, 1.0, 0.439, 0.454, 0.439, 1.263;
    Dataset d = Dataset::complete(oracles::normal_sample(sigma, 1000000, rng), 2);
    CHECK(std::abs(kappa_mardia(d).value) < 0.02);
    CHECK(std::abs(kappa_marginal(d).value) < 0.02);
}

TEST_CASE("both estimators find kappa near two on large t5 samples") {
    PatternSpec none = PatternSpec::general(ProportionSet::independent({1.0, 1.0, 1.0}));
    SimSetting s = SimSetting::make(2, 1000000, none, 2, 1);
    Dataset d = sample(s, 8);  // fourth moments of t5 are heavy tailed; seed sits in the typical band
    const double km = kappa_mardia(d).value;
    const double kg = kappa_marginal(d).value;
    CHECK(km == doctest::Approx(2.0).epsilon(0.10));
    CHECK(kg == doctest::Approx(2.0).epsilon(0.10));
    // on the same sample the two approaches agree within Monte Carlo noise
    CHECK(std::abs(km - kg) < 0.25);
}

TEST_CASE("mardia estimate matches the hand-evaluated Mahalanobis sum") {
    Eigen::MatrixXd z(5, 3);
    z << 0.3, 1.2, -0.5,
        1.1, 0.4, 0.9,
        -0.8, 2.0, 1.4,
        0.5, -0.9, 0.2,
        1.9, 0.8, -1.1;
    KappaEstimate k = kappa_mardia(Dataset::complete(z, 2));
    CHECK(k.value == doctest::Approx(-0.3789721556395492).epsilon(1e-12));
}

TEST_CASE("marginal estimate applies the small-sample correction per column") {
    Eigen::MatrixXd z(6, 2);
    z << 0.4, 1.0, -1.1, 2.0, 2.3, 3.0, 0.0, 4.0, 1.7, 5.0, -0.6, 6.0;
    KappaEstimate k = kappa_marginal(Dataset::complete(z, 1));
    // first column frozen from a direct evaluation of the corrected kurtosis
    CHECK(k.per_column[0] == doctest::Approx(-1.346622704580934).epsilon(1e-12));
    CHECK(k.value == doctest::Approx((k.per_column[0] + k.per_column[1]) / 6.0));
}

TEST_CASE("kappa estimates are invariant to affine reparameterization") {
    std::mt19937_64 rng(67);
    Eigen::MatrixXd z = oracles::normal_sample(oracles::random_spd(3, rng), 400, rng);
    Dataset d = Dataset::complete(z, 2);
    Eigen::MatrixXd z2 = z;
    z2.col(0) = 3.7 * z.col(0).array() - 11.0;
    z2.col(1) = -0.2 * z.col(1).array() + 4.0;
    z2.col(2) = 100.0 * z.col(2).array();
    Dataset d2 = Dataset::complete(z2, 2);
    CHECK(kappa_marginal(d).value == doctest::Approx(kappa_marginal(d2).value).epsilon(1e-10));
    CHECK(kappa_mardia(d).value == doctest::Approx(kappa_mardia(d2).value).epsilon(1e-10));
}

TEST_CASE("marginal method uses available cells, mardia the complete rows") {
    std::mt19937_64 rng(71);
    Eigen::MatrixXd z = oracles::normal_sample(oracles::random_spd(3, rng), 200, rng);
    Mask m = Mask::Ones(200, 3);
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    for (long i = 0; i < 200; ++i)
        if (unif(rng) < 0.25) m(i, 0) = 0;
    Dataset holed(z, m, 2);

    // mardia == mardia on the complete-row subset
    std::vector<long> rows;
    for (long i = 0; i < 200; ++i)
        if (holed.row_complete(i)) rows.push_back(i);
    Eigen::MatrixXd zc(static_cast<long>(rows.size()), 3);
    for (std::size_t r = 0; r < rows.size(); ++r) zc.row(static_cast<long>(r)) = z.row(rows[r]);
    CHECK(kappa_mardia(holed).value ==
          doctest::Approx(kappa_mardia(Dataset::complete(zc, 2)).value).epsilon(1e-14));

    // marginal column 1 and 2 see all rows, column 0 only its observed cells
    KappaEstimate full = kappa_marginal(Dataset::complete(z, 2));
    KappaEstimate part = kappa_marginal(holed);
    CHECK(part.per_column[1] == doctest::Approx(full.per_column[1]).epsilon(1e-14));
    CHECK(part.per_column[2] == doctest::Approx(full.per_column[2]).epsilon(1e-14));
    CHECK(part.per_column[0] != doctest::Approx(full.per_column[0]).epsilon(1e-6));
}

TEST_CASE("kurtosis estimators reject samples that are too small") {
    Eigen::MatrixXd z = Eigen::MatrixXd::Random(3, 3);
    try {
        kappa_mardia(Dataset::complete(z, 2));
        FAIL("expected InsufficientRows");
    } catch (const Error& e) {
        CHECK(e.code() == Errc::insufficient_rows);
    }
    try {
        kappa_marginal(Dataset::complete(z, 2));
        FAIL("expected InsufficientRows");
    } catch (const Error& e) {
        CHECK(e.code() == Errc::insufficient_rows);
    }
}
