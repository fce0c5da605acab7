#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <vector>

namespace delreg {

using Mask = Eigen::Array<std::uint8_t, Eigen::Dynamic, Eigen::Dynamic>;

/// Rectangular numeric table with a per-cell observed/missing mask and one
/// designated response column. Missingness is carried by the mask alone, so
/// any real value (including NaN) may sit in a masked-out cell; no estimator
/// ever reads such a cell.
class Dataset {
public:
    Dataset(Eigen::MatrixXd values, Mask mask, int response_index);

    /// Fully observed table.
    static Dataset complete(Eigen::MatrixXd values, int response_index);

    long rows() const { return values_.rows(); }
    int cols() const { return static_cast<int>(values_.cols()); }
    int n_predictors() const { return cols() - 1; }
    int response_index() const { return response_index_; }

    double value(long i, int j) const { return values_(i, j); }
    bool observed(long i, int j) const { return mask_(i, j) != 0; }

    const Eigen::MatrixXd& values() const { return values_; }
    const Mask& mask() const { return mask_; }

    bool row_complete(long i) const;
    long complete_rows() const;
    bool fully_observed() const;

    /// Predictor column indices in their original order.
    std::vector<int> predictor_columns() const;

    /// Copy with columns reordered so the response sits last. The asymptotic
    /// machinery indexes predictors 0..p-1 with the response at p.
    Dataset response_last() const;

private:
    Eigen::MatrixXd values_;
    Mask mask_;
    int response_index_;
};

}  // namespace delreg
