#pragma once

#include "bae/covariance.hpp"
#include "bae/forward.hpp"
#include "bae/prior.hpp"

namespace bae {

/// Log-domain model log y = log(A x) + xi with xi ~ N(xi_mean, xi_cov) and a
/// Gaussian prior on x.
struct LogDomainModel {
  Vector xi_mean;
  CovarianceModel xi_cov;
  PriorModel prior;
};

/// Moment-matched Gaussian for xi = log n when n is iid lognormal with unit
/// mean and variance `n_variance`: var(xi) = log(1 + v), mean = -var/2.
LogDomainModel lognormal_log_model(double n_variance, const PriorModel &prior);

struct LogMapOptions {
  int max_iterations = 200;
  double gradient_tol = 1e-6; ///< relative to the initial gradient norm
  int max_halvings = 30;      ///< positivity-preserving step halvings
};

struct LogMapResult {
  GridField map;
  int iterations = 0;
  double initial_gradient_norm = 0.0;
  double gradient_norm = 0.0;
};

/// Negative log-posterior of the log-domain model; +inf where A x has a
/// nonpositive entry.
double log_domain_objective(const ForwardOperator &op, const GridField &y,
                            const LogDomainModel &model, const Vector &x);
Vector log_domain_gradient(const ForwardOperator &op, const GridField &y,
                           const LogDomainModel &model, const Vector &x);

/// MAP of pi_xi(log y - log(A x)) pi_x(x) by damped Gauss-Newton.
///
/// Throws NonPositiveData if any y_i <= 0, NonPositiveModelOutput if no
/// positivity-preserving step is found within max_halvings, NonConvergence
/// when the iteration budget runs out.
LogMapResult log_transform_map(const ForwardOperator &op, const GridField &y,
                               const LogDomainModel &model, const LogMapOptions &options = {});

} // namespace bae
