#include "bae/error_model.hpp"

#include <algorithm>
#include <string>

namespace bae {

namespace {

void require_size(Eigen::Index actual, Eigen::Index expected, const char *what) {
  if (actual != expected)
    throw InvalidArgument(std::string(what) + ": dimension mismatch (" + std::to_string(actual) +
                          " vs " + std::to_string(expected) + ")");
}

Vector mean_or_zero(const Vector &v, Eigen::Index n, const char *what) {
  if (v.size() == 0)
    return Vector::Zero(n);
  require_size(v.size(), n, what);
  return v;
}

} // namespace

Vector ErrorStatistics::conditional_mean(const Vector &x) const {
  if (!gain)
    return mean;
  return mean + *gain * (x - x_mean);
}

Vector error_mean(const Vector &n_mean, const Vector &eta_mean, const ForwardOperator &op,
                  const GridField &x_mean) {
  const auto m = static_cast<Eigen::Index>(op.grid().size());
  require_size(n_mean.size(), m, "error_mean n_*");
  require_size(eta_mean.size(), m, "error_mean eta_*");
  const Vector ax = op.apply(x_mean).values();
  return eta_mean + (n_mean.array() - 1.0).matrix().cwiseProduct(ax);
}

CovarianceModel error_covariance(const CovarianceModel &eta_cov, const CovarianceModel &n_cov,
                                 const Matrix &propagated, const Vector &mean_prediction) {
  const Eigen::Index m = eta_cov.size();
  require_size(n_cov.size(), m, "error_covariance Gamma_nn");
  require_size(propagated.rows(), m, "error_covariance A Gamma A^T");
  require_size(propagated.cols(), m, "error_covariance A Gamma A^T");
  const bool shifted = mean_prediction.size() != 0;
  if (shifted)
    require_size(mean_prediction.size(), m, "error_covariance mean prediction");

  if (eta_cov.is_diagonal() && n_cov.is_diagonal()) {
    Vector second = propagated.diagonal();
    if (shifted)
      second += mean_prediction.cwiseAbs2();
    return CovarianceModel::diagonal(eta_cov.diagonal() + n_cov.diagonal().cwiseProduct(second));
  }
  Matrix second = propagated;
  if (shifted)
    second += mean_prediction * mean_prediction.transpose();
  Matrix cov = n_cov.matrix().cwiseProduct(second);
  if (eta_cov.is_diagonal())
    cov.diagonal() += eta_cov.diagonal();
  else
    cov += eta_cov.matrix();
  return CovarianceModel::dense(std::move(cov));
}

ErrorStatistics marginal_error_stats(const CovarianceModel &eta_cov, const CovarianceModel &n_cov,
                                     const ForwardOperator &op, const PriorModel &prior,
                                     const Vector &eta_mean) {
  const auto m = static_cast<Eigen::Index>(op.grid().size());
  const Vector q = op.apply(prior.mean()).values();
  const bool centred = prior.mean().values().isZero(0.0);
  const Matrix propagated = propagate_covariance(op, prior.covariance());
  ErrorStatistics stats{
      error_mean(Vector::Ones(m), mean_or_zero(eta_mean, m, "eta_*"), op, prior.mean()),
      error_covariance(eta_cov, n_cov, propagated, centred ? Vector() : q),
      std::nullopt,
      std::nullopt,
      prior.mean().values(),
  };
  return stats;
}

ErrorStatistics conditional_error_stats(const CovarianceModel &eta_cov,
                                        const CovarianceModel &n_cov, const ForwardOperator &op,
                                        const PriorModel &prior, const Matrix &eta_x_cov,
                                        const Vector &eta_mean) {
  const auto m = static_cast<Eigen::Index>(op.grid().size());
  const auto n = static_cast<Eigen::Index>(prior.grid().size());
  require_size(eta_x_cov.rows(), m, "conditional_error_stats Gamma_etax rows");
  require_size(eta_x_cov.cols(), n, "conditional_error_stats Gamma_etax cols");

  // gain = Gamma_etax L_x^2, using the symmetric precision factor.
  const SparseMatrix &lx = prior.precision_factor();
  const Matrix gain = ((lx * (lx * eta_x_cov.transpose())).transpose());
  Matrix explained = gain * eta_x_cov.transpose();
  explained = 0.5 * (explained + explained.transpose()).eval();

  // The joint covariance of (x, eta) is PSD iff this Schur complement is.
  const Matrix schur = eta_cov.matrix() - explained;
  const Eigen::LDLT<Matrix> ldlt(schur);
  const double scale = std::max(1.0, schur.diagonal().cwiseAbs().maxCoeff());
  if (ldlt.info() != Eigen::Success || ldlt.vectorD().minCoeff() < -1e-10 * scale)
    throw NumericalError("conditional_error_stats: joint covariance of (x, eta) is not PSD");

  const Vector q = op.apply(prior.mean()).values();
  const bool centred = prior.mean().values().isZero(0.0);
  const Matrix propagated = propagate_covariance(op, prior.covariance());
  const CovarianceModel marginal =
      error_covariance(eta_cov, n_cov, propagated, centred ? Vector() : q);

  ErrorStatistics stats{
      error_mean(Vector::Ones(m), mean_or_zero(eta_mean, m, "eta_*"), op, prior.mean()),
      CovarianceModel::dense(marginal.matrix() - explained),
      eta_x_cov,
      gain,
      prior.mean().values(),
  };
  return stats;
}

Vector whiten(const ErrorStatistics &stats, const Vector &residual) {
  require_size(residual.size(), stats.mean.size(), "whiten");
  return stats.cov.whiten(Vector(residual - stats.mean));
}

} // namespace bae
