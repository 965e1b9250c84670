#include "bae/log_baseline.hpp"

#include <cmath>
#include <limits>
#include <string>

namespace bae {

LogDomainModel lognormal_log_model(double n_variance, const PriorModel &prior) {
  if (!(n_variance > 0.0))
    throw InvalidArgument("lognormal_log_model: variance must be positive");
  const auto n = static_cast<Eigen::Index>(prior.grid().size());
  const double s2 = std::log1p(n_variance);
  return LogDomainModel{Vector::Constant(n, -0.5 * s2), CovarianceModel::scaled_identity(n, s2),
                        prior};
}

namespace {

Vector log_residual(const GridField &y, const LogDomainModel &model, const Vector &ax) {
  return (y.values().array().log() - ax.array().log()).matrix() - model.xi_mean;
}

} // namespace

double log_domain_objective(const ForwardOperator &op, const GridField &y,
                            const LogDomainModel &model, const Vector &x) {
  const Vector ax = op.apply(x);
  if ((ax.array() <= 0.0).any())
    return std::numeric_limits<double>::infinity();
  const Vector misfit = model.xi_cov.whiten(log_residual(y, model, ax));
  const Vector reg = model.prior.whiten(x - model.prior.mean().values());
  return 0.5 * misfit.squaredNorm() + 0.5 * reg.squaredNorm();
}

Vector log_domain_gradient(const ForwardOperator &op, const GridField &y,
                           const LogDomainModel &model, const Vector &x) {
  const Vector ax = op.apply(x);
  const Vector w = model.xi_cov.solve(log_residual(y, model, ax));
  // A^T = A for the even kernel.
  return -op.apply(Vector(w.cwiseQuotient(ax))) +
         model.prior.whiten(model.prior.whiten(x - model.prior.mean().values()));
}

LogMapResult log_transform_map(const ForwardOperator &op, const GridField &y,
                               const LogDomainModel &model, const LogMapOptions &options) {
  require_same_grid(op.grid(), y.grid(), "log_transform_map");
  const auto n = static_cast<Eigen::Index>(y.grid().size());
  for (Eigen::Index k = 0; k < n; ++k)
    if (!(y.values()[k] > 0.0))
      throw NonPositiveData("log_transform_map: observation " + std::to_string(k) + " is " +
                            std::to_string(y.values()[k]) +
                            "; the log transform needs strictly positive data");
  if (model.xi_mean.size() != n || model.xi_cov.size() != n)
    throw InvalidArgument("log_transform_map: model size does not match the data");

  const Matrix a = op.dense();
  const Matrix prior_precision = model.prior.precision();

  // Constant start with A x0 = mean(y) > 0.
  Vector x = Vector::Constant(n, y.values().mean() / op.kernel_mass());
  double f = log_domain_objective(op, y, model, x);
  Vector g = log_domain_gradient(op, y, model, x);
  LogMapResult result{GridField(y.grid(), x), 0, g.norm(), g.norm()};
  const double stop = options.gradient_tol * result.initial_gradient_norm;

  for (int it = 0; it < options.max_iterations; ++it) {
    if (g.norm() <= stop) {
      result.map = GridField(y.grid(), x);
      result.iterations = it;
      result.gradient_norm = g.norm();
      return result;
    }
    // Gauss-Newton: H = A^T D W D A + L_x^2 with D = diag(1 / A x).
    const Vector ax = a * x;
    const Matrix jac = ax.cwiseInverse().asDiagonal() * a;
    const Matrix wj = model.xi_cov.whiten(jac);
    Matrix h = prior_precision;
    h.selfadjointView<Eigen::Lower>().rankUpdate(wj.transpose());
    const Eigen::LLT<Matrix> llt(h.selfadjointView<Eigen::Lower>());
    if (llt.info() != Eigen::Success)
      throw NonConvergence("log_transform_map: Gauss-Newton matrix is not positive definite");
    const Vector step = -llt.solve(g);
    const double slope = g.dot(step);

    double t = 1.0;
    int halvings = 0;
    while ((op.apply(Vector(x + t * step)).array() <= 0.0).any()) {
      if (++halvings > options.max_halvings)
        throw NonPositiveModelOutput(
            "log_transform_map: no step keeps A x positive after " +
            std::to_string(options.max_halvings) + " halvings");
      t *= 0.5;
    }
    double f_next = log_domain_objective(op, y, model, x + t * step);
    int backtracks = 0;
    while (!(f_next <= f + 1e-4 * t * slope)) {
      if (++backtracks > 60)
        throw NonConvergence("log_transform_map: line search failed");
      t *= 0.5;
      f_next = log_domain_objective(op, y, model, x + t * step);
    }
    x += t * step;
    f = f_next;
    g = log_domain_gradient(op, y, model, x);
    result.iterations = it + 1;
  }
  result.map = GridField(y.grid(), x);
  result.gradient_norm = g.norm();
  if (result.gradient_norm > stop)
    throw NonConvergence("log_transform_map: gradient norm " +
                         std::to_string(result.gradient_norm) + " above tolerance after " +
                         std::to_string(result.iterations) + " iterations");
  return result;
}

} // namespace bae
