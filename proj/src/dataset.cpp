#include "delreg/dataset.hpp"

#include "delreg/errors.hpp"

namespace delreg {

const char* errc_name(Errc code) noexcept {
    switch (code) {
        case Errc::empty_dataset: return "EmptyDataset";
        case Errc::insufficient_rows: return "InsufficientRows";
        case Errc::insufficient_complete_rows: return "InsufficientCompleteRows";
        case Errc::empty_pair: return "EmptyPair";
        case Errc::zero_proportion: return "ZeroProportion";
        case Errc::not_positive_definite: return "NotPositiveDefinite";
        case Errc::singular_design: return "SingularDesign";
        case Errc::singular_sigma_x: return "SingularSigmaX";
        case Errc::singular_covariance: return "SingularCovariance";
        case Errc::invalid_kappa: return "InvalidKappa";
        case Errc::invalid_pattern: return "InvalidPattern";
        case Errc::empty_interval: return "EmptyInterval";
        case Errc::degenerate_ellipse: return "DegenerateEllipse";
        case Errc::invalid_covariance: return "InvalidCovariance";
        case Errc::infeasible_configuration: return "InfeasibleConfiguration";
        case Errc::infeasible_covariance: return "InfeasibleCovariance";
        case Errc::parse_error: return "ParseError";
        case Errc::missing_response_column: return "MissingResponseColumn";
        case Errc::invalid_argument: return "InvalidArgument";
    }
    return "Error";
}

Dataset::Dataset(Eigen::MatrixXd values, Mask mask, int response_index)
    : values_(std::move(values)), mask_(std::move(mask)), response_index_(response_index) {
    if (values_.rows() != mask_.rows() || values_.cols() != mask_.cols())
        fail(Errc::invalid_argument, "values and mask shapes differ");
    if (values_.cols() < 2)
        fail(Errc::invalid_argument, "need at least one predictor and a response");
    if (response_index_ < 0 || response_index_ >= values_.cols())
        fail(Errc::invalid_argument, "response index out of range");
}

Dataset Dataset::complete(Eigen::MatrixXd values, int response_index) {
    Mask mask = Mask::Ones(values.rows(), values.cols());
    return Dataset(std::move(values), std::move(mask), response_index);
}

bool Dataset::row_complete(long i) const {
    for (int j = 0; j < cols(); ++j)
        if (!mask_(i, j)) return false;
    return true;
}

long Dataset::complete_rows() const {
    long count = 0;
    for (long i = 0; i < rows(); ++i)
        if (row_complete(i)) ++count;
    return count;
}

bool Dataset::fully_observed() const {
    return complete_rows() == rows();
}

std::vector<int> Dataset::predictor_columns() const {
    std::vector<int> out;
    out.reserve(n_predictors());
    for (int j = 0; j < cols(); ++j)
        if (j != response_index_) out.push_back(j);
    return out;
}

Dataset Dataset::response_last() const {
    if (response_index_ == cols() - 1) return *this;
    std::vector<int> order = predictor_columns();
    order.push_back(response_index_);
    Eigen::MatrixXd v(rows(), cols());
    Mask m(rows(), cols());
    for (int j = 0; j < cols(); ++j) {
        v.col(j) = values_.col(order[j]);
        m.col(j) = mask_.col(order[j]);
    }
    return Dataset(std::move(v), std::move(m), cols() - 1);
}

}  // namespace delreg
