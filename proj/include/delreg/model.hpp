#pragma once

#include <Eigen/Core>

namespace delreg {

/// Population (or plug-in) covariance model of (X_1..X_p, Y), stored with the
/// response last. Carries the conformal partition of Sigma, its inverse, the
/// implied regression coefficients beta = Sigma_x^{-1} Sigma_xy, the residual
/// variance, and the elliptical kurtosis parameter kappa (0 for the normal).
class CovarianceModel {
public:
    /// Partition a full (p+1)x(p+1) covariance. `response_index` names the
    /// response column of `sigma`; columns are reordered so it sits last.
    static CovarianceModel from_sigma(const Eigen::MatrixXd& sigma, int response_index,
                                      double kappa = 0.0);
    static CovarianceModel from_sigma(const Eigen::MatrixXd& sigma, const Eigen::VectorXd& mean,
                                      int response_index, double kappa = 0.0);

    /// Assemble Sigma from regression structure: Sigma_xy = Sigma_x beta,
    /// Sigma_y = beta' Sigma_x beta + resid_var.
    static CovarianceModel from_regression(const Eigen::MatrixXd& sigma_x,
                                           const Eigen::VectorXd& beta, double resid_var,
                                           double kappa = 0.0);

    int n_predictors() const { return static_cast<int>(beta_.size()); }

    const Eigen::MatrixXd& sigma() const { return sigma_; }
    Eigen::MatrixXd sigma_x() const { return sigma_.topLeftCorner(n_predictors(), n_predictors()); }
    Eigen::VectorXd sigma_xy() const { return sigma_.topRightCorner(n_predictors(), 1); }
    double sigma_y() const { return sigma_(n_predictors(), n_predictors()); }

    /// Full precision matrix Sigma^{-1}.
    const Eigen::MatrixXd& precision() const { return precision_; }
    /// Predictor-block inverse Sigma_x^{-1}; the r_jk of the closed-form
    /// variance expressions.
    const Eigen::MatrixXd& precision_x() const { return precision_x_; }

    const Eigen::VectorXd& beta() const { return beta_; }
    double resid_var() const { return resid_var_; }
    double kappa() const { return kappa_; }
    const Eigen::VectorXd& mean() const { return mean_; }

    CovarianceModel with_kappa(double kappa) const;

    /// Model with predictor `target` swapped into position 0 (symmetric
    /// permutation of Sigma_x, beta and mean). Response stays last.
    CovarianceModel with_target_first(int target) const;

private:
    CovarianceModel() = default;

    Eigen::VectorXd mean_;
    Eigen::MatrixXd sigma_;
    Eigen::MatrixXd precision_;
    Eigen::MatrixXd precision_x_;
    Eigen::VectorXd beta_;
    double resid_var_ = 0.0;
    double kappa_ = 0.0;
};

/// Named alias for CovarianceModel::from_sigma.
CovarianceModel partition_model(const Eigen::MatrixXd& sigma, int response_index,
                                double kappa = 0.0);

/// Pivots of the unpivoted LDL^T factorization, in elimination order.
/// Used for the tolerance-based positive-definiteness tests.
Eigen::VectorXd ldlt_pivots(const Eigen::MatrixXd& m);

/// All pivots > 1e-10 * max diagonal entry.
bool is_positive_definite(const Eigen::MatrixXd& m);

}  // namespace delreg
