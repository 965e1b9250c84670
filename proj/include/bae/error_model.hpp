#pragma once

#include "bae/covariance.hpp"
#include "bae/forward.hpp"
#include "bae/prior.hpp"

#include <optional>

namespace bae {

/// Gaussian approximation N(mean, cov) of the embedded error
///   e = (n - 1) ⊙ A x + eta,
/// so that y = A x + e is an exact additive rewrite of y = n ⊙ A x + eta.
///
/// For the conditional model the error mean depends on x through
///   E[e | x] = mean + gain (x - x_*),   gain = Gamma_ex Gamma_xx^{-1},
/// and cov holds Gamma_{e|x}. For the marginal model gain is empty.
struct ErrorStatistics {
  Vector mean;
  CovarianceModel cov;
  std::optional<Matrix> cross_cov; ///< Gamma_ex, m x n.
  std::optional<Matrix> gain;      ///< Gamma_ex Gamma_xx^{-1}, m x n.
  Vector x_mean;                   ///< x_*, needed with gain.

  bool conditional() const { return gain.has_value(); }
  Vector conditional_mean(const Vector &x) const;
};

/// e_* = eta_* + (n_* - 1) ⊙ A x_*.
Vector error_mean(const Vector &n_mean, const Vector &eta_mean, const ForwardOperator &op,
                  const GridField &x_mean);

/// Gamma_ee = Gamma_etaeta + Gamma_nn ⊙ (A Gamma_xx A^T + q q^T), q = A x_*.
///
/// With an empty mean prediction (x_* = 0) this is the usual
/// Gamma_etaeta + Gamma_nn ⊙ A Gamma_xx A^T. When both noise covariances are
/// diagonal only diag(A Gamma_xx A^T) is used and the result stays diagonal.
CovarianceModel error_covariance(const CovarianceModel &eta_cov, const CovarianceModel &n_cov,
                                 const Matrix &propagated, const Vector &mean_prediction = {});

/// Marginal statistics, Gamma_{e|x} ≈ Gamma_ee.
ErrorStatistics marginal_error_stats(const CovarianceModel &eta_cov, const CovarianceModel &n_cov,
                                     const ForwardOperator &op, const PriorModel &prior,
                                     const Vector &eta_mean = {});

/// Conditional statistics given x for a joint Gaussian (x, eta) with cross
/// covariance eta_x_cov = Gamma_etax (m x n):
///   Gamma_{e|x} = Gamma_ee - Gamma_etax Gamma_xx^{-1} Gamma_xeta.
/// Throws NumericalError when the joint covariance of (x, eta) is not PSD.
ErrorStatistics conditional_error_stats(const CovarianceModel &eta_cov,
                                        const CovarianceModel &n_cov, const ForwardOperator &op,
                                        const PriorModel &prior, const Matrix &eta_x_cov,
                                        const Vector &eta_mean = {});

/// L_e (residual - mean); its squared norm is the negative log-likelihood up
/// to a constant factor 1/2 and an additive constant.
Vector whiten(const ErrorStatistics &stats, const Vector &residual);

} // namespace bae
