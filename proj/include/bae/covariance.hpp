#pragma once

#include "bae/types.hpp"

#include <memory>

namespace bae {

/// Jitter added to the diagonal, once, when a dense Cholesky factorization
/// fails. A second failure is reported as NumericalError.
inline constexpr double kFactorJitter = 1e-10;

/// Symmetric positive (semi-)definite covariance with an on-demand Cholesky
/// factor C (C C^T = cov). The whitening operator is C^{-1}, so that
/// whiten(r)^T whiten(r) = r^T cov^{-1} r.
///
/// Diagonal covariances are stored as a vector and never densified unless
/// matrix() is called. Copies share the factor.
class CovarianceModel {
public:
  /// Dense covariance; the input is symmetrized as (B + B^T)/2.
  static CovarianceModel dense(Matrix cov);
  /// Diagonal covariance; entries must be nonnegative.
  static CovarianceModel diagonal(Vector variances);
  static CovarianceModel scaled_identity(Eigen::Index n, double variance);

  Eigen::Index size() const;
  bool is_diagonal() const;

  Matrix matrix() const;
  Vector diagonal() const;
  double trace() const;

  /// Jitter that had to be added for the factorization (0 when none).
  /// Forces the factorization.
  double jitter() const;

  /// C^{-1} v.
  Vector whiten(const Vector &v) const;
  Matrix whiten(const Matrix &v) const;
  /// C w; maps standard normal w to a zero-mean draw with this covariance.
  Vector colour(const Vector &w) const;
  /// cov^{-1} b.
  Vector solve(const Vector &b) const;
  Matrix solve(const Matrix &b) const;
  Matrix inverse() const;

  /// Lower-triangular Cholesky factor C (dense).
  Matrix factor() const;

private:
  struct State;
  explicit CovarianceModel(std::shared_ptr<State> state);
  const State &factorized() const;

  std::shared_ptr<State> state_;
};

} // namespace bae
