#pragma once

#include <vector>

#include "delreg/dataset.hpp"

namespace delreg {

enum class KappaMethod { mardia, marginal };

struct KappaEstimate {
    double value;
    KappaMethod method;
    std::vector<double> per_column;  // corrected marginal excess kurtoses (marginal method)
    bool below_population_bound;     // value <= -1/2, outside the elliptical range
};

/// Maruyama form of Mardia's multivariate kurtosis:
/// kappa_hat = sum_i {(z_i - zbar)' S^{-1} (z_i - zbar)}^2 / (n (d+2) d) - 1,
/// d = p+1, S with divisor 1/n. Uses complete rows only.
KappaEstimate kappa_mardia(const Dataset& data);

/// Average of per-column corrected sample excess kurtoses divided by 3(p+1).
/// Each column uses its own observed cells (available-case spirit).
KappaEstimate kappa_marginal(const Dataset& data);

}  // namespace delreg
