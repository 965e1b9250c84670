#include "bae/inference.hpp"

#include <cmath>
#include <string>

namespace bae {

LinearGaussianPosterior::LinearGaussianPosterior(const ForwardOperator &op,
                                                 const ErrorStatistics &stats,
                                                 const PriorModel &prior)
    : op_(op), stats_(stats), prior_(prior) {
  const auto n = static_cast<Eigen::Index>(prior.grid().size());
  require_same_grid(op.grid(), prior.grid(), "posterior");
  if (stats.mean.size() != n || stats.cov.size() != n)
    throw InvalidArgument("posterior: error statistics do not match the grid");

  Matrix b = op.dense();
  if (stats.gain)
    b += *stats.gain;
  const Matrix wb = stats.cov.whiten(b);
  precision_ = prior.precision();
  precision_.selfadjointView<Eigen::Lower>().rankUpdate(wb.transpose());
  precision_.triangularView<Eigen::StrictlyUpper>() = precision_.transpose();
  llt_.compute(precision_);
  if (llt_.info() != Eigen::Success)
    throw NumericalError("posterior: factorization of the posterior precision failed");
}

Vector LinearGaussianPosterior::data_term(const GridField &y) const {
  require_same_grid(op_.grid(), y.grid(), "posterior data");
  Vector d = y.values() - stats_.mean;
  if (stats_.gain)
    d += *stats_.gain * stats_.x_mean;
  return d;
}

Vector LinearGaussianPosterior::apply_b(const Vector &x) const {
  Vector out = op_.apply(x);
  if (stats_.gain)
    out += *stats_.gain * x;
  return out;
}

Vector LinearGaussianPosterior::apply_bt(const Vector &r) const {
  // The Gaussian kernel is even, so A^T = A.
  Vector out = op_.apply(r);
  if (stats_.gain)
    out += stats_.gain->transpose() * r;
  return out;
}

Vector LinearGaussianPosterior::apply_h(const Vector &x) const {
  return apply_bt(stats_.cov.solve(apply_b(x))) + prior_.whiten(prior_.whiten(x));
}

Vector LinearGaussianPosterior::rhs(const GridField &y) const {
  const Vector &x0 = prior_.mean().values();
  return apply_bt(stats_.cov.solve(Vector(data_term(y) - apply_b(x0))));
}

GridField LinearGaussianPosterior::map(const GridField &y) const {
  return GridField(y.grid(), prior_.mean().values() + llt_.solve(rhs(y)));
}

GridField LinearGaussianPosterior::map_iterative(const GridField &y, double rel_tol,
                                                 int max_iter) const {
  const Vector b = rhs(y);
  const auto n = b.size();
  if (max_iter <= 0)
    max_iter = static_cast<int>(10 * n);
  Vector dx = Vector::Zero(n);
  Vector r = b;
  Vector p = r;
  double rr = r.squaredNorm();
  const double stop = rel_tol * rel_tol * b.squaredNorm();
  for (int it = 0; it < max_iter && rr > stop; ++it) {
    const Vector hp = apply_h(p);
    const double alpha = rr / p.dot(hp);
    dx += alpha * p;
    r -= alpha * hp;
    const double rr_next = r.squaredNorm();
    p = r + (rr_next / rr) * p;
    rr = rr_next;
  }
  if (rr > stop)
    throw NumericalError("posterior: conjugate gradients did not converge");
  return GridField(y.grid(), prior_.mean().values() + dx);
}

CovarianceModel LinearGaussianPosterior::covariance() const {
  const auto n = precision_.rows();
  return CovarianceModel::dense(llt_.solve(Matrix(Matrix::Identity(n, n))));
}

double LinearGaussianPosterior::objective(const Vector &x, const GridField &y) const {
  const Vector misfit = stats_.cov.whiten(Vector(data_term(y) - apply_b(x)));
  const Vector reg = prior_.whiten(x - prior_.mean().values());
  return 0.5 * misfit.squaredNorm() + 0.5 * reg.squaredNorm();
}

Vector LinearGaussianPosterior::gradient(const Vector &x, const GridField &y) const {
  const Vector weighted = stats_.cov.solve(Vector(data_term(y) - apply_b(x)));
  return -apply_bt(weighted) + prior_.whiten(prior_.whiten(x - prior_.mean().values()));
}

GridField map_estimate(const ForwardOperator &op, const ErrorStatistics &stats,
                       const PriorModel &prior, const GridField &y) {
  return LinearGaussianPosterior(op, stats, prior).map(y);
}

CovarianceModel posterior_covariance(const ForwardOperator &op, const ErrorStatistics &stats,
                                     const PriorModel &prior) {
  return LinearGaussianPosterior(op, stats, prior).covariance();
}

CredibleBand credible_band(const GridField &map, const GridField &pointwise_std, double k) {
  if (!(k >= 0.0) || !std::isfinite(k))
    throw InvalidArgument("credible_band: k must be nonnegative");
  require_same_grid(map.grid(), pointwise_std.grid(), "credible_band");
  const Vector half = k * pointwise_std.values();
  return {GridField(map.grid(), map.values() - half), GridField(map.grid(), map.values() + half)};
}

CredibleBand credible_band(const GridField &map, const CovarianceModel &posterior, double k) {
  if (static_cast<std::size_t>(posterior.size()) != map.grid().size())
    throw InvalidArgument("credible_band: covariance size does not match the grid");
  return credible_band(map, GridField(map.grid(), posterior.diagonal().cwiseSqrt()), k);
}

double coverage_fraction(const GridField &truth, const GridField &lower, const GridField &upper) {
  require_same_grid(truth.grid(), lower.grid(), "coverage_fraction");
  require_same_grid(truth.grid(), upper.grid(), "coverage_fraction");
  const auto &t = truth.values();
  const auto inside =
      ((t.array() >= lower.values().array()) && (t.array() <= upper.values().array())).count();
  return static_cast<double>(inside) / static_cast<double>(t.size());
}

PosteriorSummary summarize(const GridField &map, const CovarianceModel &posterior, double k,
                           const GridField *truth) {
  GridField std_field(map.grid(), posterior.diagonal().cwiseSqrt());
  if ((std_field.values().array() <= 0.0).any())
    throw NumericalError("posterior: nonpositive pointwise variance");
  CredibleBand band = credible_band(map, std_field, k);
  std::optional<double> coverage;
  if (truth)
    coverage = coverage_fraction(*truth, band.lower, band.upper);
  return PosteriorSummary{map, std::move(std_field), k, std::move(band), coverage};
}

} // namespace bae
