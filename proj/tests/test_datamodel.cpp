#include <doctest.h>

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "delreg/dataset.hpp"
#include "delreg/errors.hpp"
#include "delreg/model.hpp"
#include "delreg/proportions.hpp"
#include "support/oracles.hpp"

using namespace delreg;

namespace {

Eigen::MatrixXd sigma_vxu() {
    Eigen::MatrixXd s(3, 3);
    s << 1.0, 0.516, 0.454, 0.516, 1.0, 0.439, 0.454, 0.439, 1.263;
    return s;
}

}  // namespace

TEST_CASE("proportions: fully observed data has all q equal to one") {
    Dataset d = Dataset::complete(Eigen::MatrixXd::Random(10, 3), 2);
    ProportionSet p = observation_proportions(d);
    CHECK(p.q({0}) == 1.0);
    CHECK(p.q({0, 1}) == 1.0);
    CHECK(p.q({0, 1, 2}) == 1.0);
    CHECK(p.q_complete() == 1.0);
    CHECK_FALSE(p.has_zero_pair());
}

TEST_CASE("proportions: four-row mask with one hole in the first predictor") {
    Eigen::MatrixXd v = Eigen::MatrixXd::Random(4, 3);
    Mask m = Mask::Ones(4, 3);
    m(2, 0) = 0;  // row 3 misses X1 only
    Dataset d(v, m, 2);
    ProportionSet p = observation_proportions(d);
    CHECK(p.q({0}) == doctest::Approx(0.75));
    CHECK(p.q({1}) == doctest::Approx(1.0));
    CHECK(p.q({0, 1}) == doctest::Approx(0.75));
    CHECK(p.q({1, 0}) == p.q({0, 1}));
    CHECK(p.q_complete() == doctest::Approx(0.75));
}

TEST_CASE("proportions: independent ten percent deletion approaches the product law") {
    const long n = 100000;
    std::mt19937_64 rng(42);
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    Eigen::MatrixXd v = Eigen::MatrixXd::Zero(n, 3);
    Mask m = Mask::Ones(n, 3);
    for (long i = 0; i < n; ++i) {
        if (unif(rng) >= 0.9) m(i, 0) = 0;
        if (unif(rng) >= 0.9) m(i, 1) = 0;
    }
    ProportionSet p = observation_proportions(Dataset(v, m, 2));
    CHECK(p.q({0}) == doctest::Approx(0.9).epsilon(0.01));
    CHECK(p.q({1}) == doctest::Approx(0.9).epsilon(0.01));
    CHECK(p.q({0, 1}) == doctest::Approx(0.81).epsilon(0.015));
    CHECK(p.q_complete() == p.q({0, 1}));  // response complete
}

TEST_CASE("proportions: monotone under set inclusion and row-permutation invariant") {
    std::mt19937_64 rng(7);
    ProportionSet p = oracles::random_proportions(4, rng);
    CHECK(p.q({0, 1, 2, 3}) <= p.q({0, 1, 2}) + 1e-15);
    CHECK(p.q({0, 1, 2}) <= p.q({0, 1}) + 1e-15);
    CHECK(p.q({0, 1}) <= p.q({0}) + 1e-15);
    CHECK(p.q_complete() <= p.q({0, 1, 2, 3}) + 1e-15);

    // permuting dataset rows leaves every proportion unchanged
    Eigen::MatrixXd v = Eigen::MatrixXd::Random(40, 3);
    Mask m = Mask::Ones(40, 3);
    std::mt19937_64 rng2(8);
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    for (long i = 0; i < 40; ++i)
        for (int j = 0; j < 2; ++j)
            if (unif(rng2) < 0.3) m(i, j) = 0;
    Dataset d(v, m, 2);
    std::vector<long> perm(40);
    std::iota(perm.begin(), perm.end(), 0L);
    std::shuffle(perm.begin(), perm.end(), rng2);
    Eigen::MatrixXd v2(40, 3);
    Mask m2(40, 3);
    for (long i = 0; i < 40; ++i) {
        v2.row(i) = v.row(perm[static_cast<std::size_t>(i)]);
        m2.row(i) = m.row(perm[static_cast<std::size_t>(i)]);
    }
    ProportionSet a = observation_proportions(d);
    ProportionSet b = observation_proportions(Dataset(v2, m2, 2));
    CHECK(a.q({0}) == b.q({0}));
    CHECK(a.q({0, 1}) == b.q({0, 1}));
    CHECK(a.q({0, 1, 2}) == b.q({0, 1, 2}));
    CHECK(a.q_complete() == b.q_complete());
}

TEST_CASE("proportions: masked-out values never matter") {
    Eigen::MatrixXd v = Eigen::MatrixXd::Random(12, 3);
    Mask m = Mask::Ones(12, 3);
    m(1, 0) = m(5, 1) = m(9, 0) = 0;
    Dataset d1(v, m, 2);
    Eigen::MatrixXd v2 = v;
    v2(1, 0) = 1e30;
    v2(5, 1) = -777.0;
    v2(9, 0) = std::nan("");
    Dataset d2(v2, m, 2);
    ProportionSet a = observation_proportions(d1);
    ProportionSet b = observation_proportions(d2);
    CHECK(a.q({0, 1, 2}) == b.q({0, 1, 2}));
    CHECK(a.q_complete() == b.q_complete());
}

TEST_CASE("partition: the study covariance gives the book coefficients") {
    CovarianceModel m = partition_model(sigma_vxu(), 2);
    CHECK(m.beta()(0) == doctest::Approx(0.310).epsilon(5e-4));
    CHECK(m.beta()(1) == doctest::Approx(0.279).epsilon(5e-4));
    CHECK(m.resid_var() == doctest::Approx(1.0).epsilon(5e-4));
}

TEST_CASE("partition: diagonal sigma gives zero beta and resid var = sigma_y") {
    Eigen::MatrixXd s = Eigen::MatrixXd::Identity(3, 3);
    s(2, 2) = 2.5;
    CovarianceModel m = partition_model(s, 2);
    CHECK(m.beta().cwiseAbs().maxCoeff() == 0.0);
    CHECK(m.resid_var() == doctest::Approx(2.5));
}

TEST_CASE("partition: beta matches an independent linear solve") {
    std::mt19937_64 rng(101);
    for (int t = 0; t < 20; ++t) {
        Eigen::MatrixXd s = oracles::random_spd(4, rng);
        CovarianceModel m = partition_model(s, 3);
        Eigen::MatrixXd sx = s.topLeftCorner(3, 3);
        Eigen::VectorXd sxy = s.topRightCorner(3, 1);
        Eigen::VectorXd direct = sx.colPivHouseholderQr().solve(sxy);
        CHECK((m.beta() - direct).cwiseAbs().maxCoeff() < 1e-10);
    }
}

TEST_CASE("partition: response column may sit anywhere") {
    Eigen::MatrixXd s = sigma_vxu();
    const int map[3] = {2, 0, 1};  // new position -> old column; response first
    Eigen::MatrixXd s2(3, 3);
    for (int a2 = 0; a2 < 3; ++a2)
        for (int b2 = 0; b2 < 3; ++b2) s2(a2, b2) = s(map[a2], map[b2]);
    CovarianceModel a = partition_model(s, 2);
    CovarianceModel b = partition_model(s2, 0);
    CHECK((a.sigma() - b.sigma()).cwiseAbs().maxCoeff() < 1e-14);
    CHECK((a.beta() - b.beta()).cwiseAbs().maxCoeff() < 1e-14);
}

TEST_CASE("round trip: regression structure to sigma and back") {
    std::mt19937_64 rng(11);
    for (int t = 0; t < 50; ++t) {
        CovarianceModel m = oracles::random_model(3, rng);
        CovarianceModel back = partition_model(m.sigma(), 3, m.kappa());
        CHECK((back.beta() - m.beta()).cwiseAbs().maxCoeff() <
              1e-12 * std::max(1.0, m.beta().cwiseAbs().maxCoeff()));
        CHECK(back.resid_var() == doctest::Approx(m.resid_var()).epsilon(1e-12));
        CHECK((back.sigma() - m.sigma()).cwiseAbs().maxCoeff() < 1e-12);
    }
}

TEST_CASE("precision: r11 sigma1^2 >= 1 over random SPD matrices") {
    std::mt19937_64 rng(13);
    for (int t = 0; t < 1000; ++t) {
        Eigen::MatrixXd s = oracles::random_spd(4, rng);
        CovarianceModel m = partition_model(s, 3);
        CHECK(m.precision()(0, 0) * s(0, 0) >= 1.0 - 1e-12);
        CHECK(m.precision_x()(0, 0) * s(0, 0) >= 1.0 - 1e-12);
    }
}

TEST_CASE("partition rejects matrices that are not positive definite") {
    Eigen::MatrixXd s(2, 2);
    s << 1.0, 2.0, 2.0, 1.0;  // indefinite
    CHECK_THROWS_AS(partition_model(s, 1), Error);
    try {
        partition_model(s, 1);
    } catch (const Error& e) {
        CHECK(e.code() == Errc::not_positive_definite);
    }
}

TEST_CASE("model construction validates kappa") {
    CHECK_THROWS_AS(partition_model(sigma_vxu(), 2, -0.5), Error);
    CHECK_NOTHROW(partition_model(sigma_vxu(), 2, -0.49));
}

TEST_CASE("proportions of an empty dataset are rejected") {
    Dataset d = Dataset::complete(Eigen::MatrixXd(0, 3), 2);
    try {
        observation_proportions(d);
        FAIL("expected EmptyDataset");
    } catch (const Error& e) {
        CHECK(e.code() == Errc::empty_dataset);
    }
}

TEST_CASE("dataset shape and response validation") {
    Eigen::MatrixXd v = Eigen::MatrixXd::Zero(3, 2);
    CHECK_THROWS_AS(Dataset(v, Mask::Ones(3, 3), 0), Error);
    CHECK_THROWS_AS(Dataset(v, Mask::Ones(3, 2), 5), Error);
    CHECK_NOTHROW(Dataset(v, Mask::Ones(3, 2), 1));
}

TEST_CASE("response_last reorders columns and mask together") {
    Eigen::MatrixXd v(2, 3);
    v << 1, 2, 3, 4, 5, 6;
    Mask m = Mask::Ones(2, 3);
    m(0, 1) = 0;
    Dataset d(v, m, 1);  // middle column is the response
    Dataset r = d.response_last();
    CHECK(r.response_index() == 2);
    CHECK(r.value(0, 0) == 1);
    CHECK(r.value(0, 1) == 3);
    CHECK(r.value(0, 2) == 2);
    CHECK_FALSE(r.observed(0, 2));
    CHECK(r.observed(0, 1));
}
