#pragma once

#include <Eigen/Core>
#include <utility>

#include "delreg/estimators.hpp"
#include "delreg/model.hpp"
#include "delreg/proportions.hpp"

namespace delreg {

/// Row-major ordering of the covariance half-vectorization S*: pairs (j,k)
/// with j <= k over columns 0..p (response = p), excluding (p,p). Dimension
/// p(p+3)/2. Phi, Delta and Q all share this one ordering.
class HalfVecIndex {
public:
    explicit HalfVecIndex(int n_predictors);

    int p() const { return p_; }
    int dim() const { return dim_; }
    int index(int j, int k) const;
    std::pair<int, int> pair(int idx) const;

private:
    int p_;
    int dim_;
};

/// Asymptotic covariance matrices of the two deletion estimators at sample
/// size n, together with the building blocks.
struct AsymptoticReport {
    Eigen::MatrixXd phi;       // covariance of sqrt(n) * halfvec(S)
    Eigen::MatrixXd delta;     // Jacobian of beta_hat(S) at Sigma, p x dim
    Eigen::MatrixXd q_ratio;   // q_jkmn / (q_jk q_mn), aligned with phi
    Eigen::MatrixXd v_cc;      // Delta Phi Delta' / (n q~)
    Eigen::MatrixXd v_ac;      // Delta (Phi o Q) Delta' / n
    Eigen::MatrixXd v_d;       // v_cc - v_ac
    long n = 0;
};

/// Fourth-moment matrix under the elliptical identity
/// phi = (1+kappa)(s_jk s_mn + s_jm s_kn + s_jn s_km) - s_jk s_mn.
Eigen::MatrixXd phi_elliptical(const CovarianceModel& model);

/// Plug-in estimate from sample central moments. Requires fully observed
/// data; columns are taken response-last. Validation harness, not an
/// estimator for incomplete data.
Eigen::MatrixXd phi_empirical(const Dataset& data);

/// Jacobian of beta_hat = S_x^{-1} S_xy at Sigma, columns per HalfVecIndex.
Eigen::MatrixXd delta_matrix(const CovarianceModel& model);

/// Proportion-ratio matrix with entries q_(jk)(mn) = q_jkmn / (q_jk q_mn);
/// repeated indices deduplicate before lookup.
Eigen::MatrixXd q_matrix(const ProportionSet& props);

AsymptoticReport v_matrices(const CovarianceModel& model, const ProportionSet& props, long n);

/// Same, with a caller-supplied Phi (e.g. phi_empirical for non-elliptical
/// checks).
AsymptoticReport v_matrices(const Eigen::MatrixXd& phi, const CovarianceModel& model,
                            const ProportionSet& props, long n);

/// Closed-form asymptotic variance of a single coefficient under the
/// elliptical assumption. CC: (1+kappa) r_11 sigma^2 / (n q~). AC: the
/// c_g / d_gh / Const expansion. The AC form requires a fully observed
/// response; targets other than the first predictor are handled by symmetric
/// permutation. Proportions must be indexed response-last like the model.
double v_single(const CovarianceModel& model, const ProportionSet& props, long n, Method method,
                int target = 0);

/// The quadratic-form coefficients behind v_single(AC):
/// n * V_AC = (1+kappa) [ Const + sum_g c_g beta_g^2 + sum_{g<h} d_gh beta_g beta_h ].
struct SingleCoefTerms {
    Eigen::MatrixXd m;   // c_g = m(g,g), d_gh = 2 m(g,h)
    double constant;     // Const (already scaled by sigma^2)
};
SingleCoefTerms single_coef_terms(const CovarianceModel& model, const ProportionSet& props);

}  // namespace delreg
