#pragma once

#include <Eigen/Core>

#include "delreg/dataset.hpp"

namespace delreg {

enum class Method { cc, ac };

const char* method_name(Method m) noexcept;

/// Covariance estimate in dataset column order. All divisors are 1/n_pair
/// (not 1/(n_pair-1)); mixed conventions would silently shift the variance
/// comparisons downstream.
struct CovEstimate {
    Eigen::MatrixXd matrix;
    Method method;
    bool pd;                 // positive definite at the shared pivot tolerance
    Eigen::MatrixXi counts;  // per-pair sample sizes n_jk
};

struct FitResult {
    Eigen::VectorXd beta_hat;  // aligned with Dataset::predictor_columns()
    Method method;
    long n_effective;          // complete rows (CC) or min pairwise count (AC)
    CovEstimate cov_estimate;
};

/// Sample covariance over fully observed rows only.
CovEstimate cc_covariance(const Dataset& data);

/// Pairwise-deletion covariance: entry (j,k) uses exactly the rows where both
/// columns are observed, with means recomputed per pair.
CovEstimate ac_covariance(const Dataset& data);

/// beta_hat = S_x^{-1} S_xy for the chosen method's covariance estimate.
/// A non-positive-definite AC estimate is flagged, not fatal; the solve is
/// still attempted.
FitResult fit(const Dataset& data, Method method);

}  // namespace delreg
