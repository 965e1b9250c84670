#include "bae/covariance.hpp"

#include <exception>
#include <mutex>
#include <optional>

namespace bae {

struct CovarianceModel::State {
  bool is_diagonal = false;
  Vector diag;
  Matrix dense;

  std::once_flag once;
  std::optional<Eigen::LLT<Matrix>> llt;
  double jitter = 0.0;
  std::exception_ptr failure;
};

CovarianceModel::CovarianceModel(std::shared_ptr<State> state)
    : state_(std::move(state)) {}

CovarianceModel CovarianceModel::dense(Matrix cov) {
  if (cov.rows() != cov.cols() || cov.rows() == 0)
    throw InvalidArgument("covariance: matrix must be square and nonempty");
  if (!cov.allFinite())
    throw InvalidArgument("covariance: entries must be finite");
  auto s = std::make_shared<State>();
  s->dense = 0.5 * (cov + cov.transpose());
  return CovarianceModel(std::move(s));
}

CovarianceModel CovarianceModel::diagonal(Vector variances) {
  if (variances.size() == 0)
    throw InvalidArgument("covariance: empty diagonal");
  if (!variances.allFinite() || (variances.array() < 0.0).any())
    throw InvalidArgument("covariance: variances must be finite and nonnegative");
  auto s = std::make_shared<State>();
  s->is_diagonal = true;
  s->diag = std::move(variances);
  return CovarianceModel(std::move(s));
}

CovarianceModel CovarianceModel::scaled_identity(Eigen::Index n, double variance) {
  return diagonal(Vector::Constant(n, variance));
}

Eigen::Index CovarianceModel::size() const {
  return state_->is_diagonal ? state_->diag.size() : state_->dense.rows();
}

bool CovarianceModel::is_diagonal() const { return state_->is_diagonal; }

Matrix CovarianceModel::matrix() const {
  if (state_->is_diagonal)
    return state_->diag.asDiagonal();
  return state_->dense;
}

Vector CovarianceModel::diagonal() const {
  return state_->is_diagonal ? state_->diag : Vector(state_->dense.diagonal());
}

double CovarianceModel::trace() const { return diagonal().sum(); }

const CovarianceModel::State &CovarianceModel::factorized() const {
  State &s = *state_;
  std::call_once(s.once, [&s] {
    if (s.is_diagonal) {
      if ((s.diag.array() <= 0.0).any())
        s.failure = std::make_exception_ptr(
            NumericalError("covariance: singular diagonal covariance"));
      return;
    }
    s.llt.emplace(s.dense);
    if (s.llt->info() == Eigen::Success)
      return;
    const Eigen::Index n = s.dense.rows();
    s.llt.emplace(s.dense + kFactorJitter * Matrix::Identity(n, n));
    if (s.llt->info() == Eigen::Success) {
      s.jitter = kFactorJitter;
      return;
    }
    s.llt.reset();
    s.failure = std::make_exception_ptr(NumericalError(
        "covariance: Cholesky factorization failed after jitter"));
  });
  if (s.failure)
    std::rethrow_exception(s.failure);
  return s;
}

double CovarianceModel::jitter() const { return factorized().jitter; }

Vector CovarianceModel::whiten(const Vector &v) const {
  const State &s = factorized();
  if (v.size() != size())
    throw InvalidArgument("covariance: whiten size mismatch");
  if (s.is_diagonal)
    return v.cwiseQuotient(s.diag.cwiseSqrt());
  return s.llt->matrixL().solve(v);
}

Matrix CovarianceModel::whiten(const Matrix &v) const {
  const State &s = factorized();
  if (v.rows() != size())
    throw InvalidArgument("covariance: whiten size mismatch");
  if (s.is_diagonal)
    return s.diag.cwiseSqrt().cwiseInverse().asDiagonal() * v;
  return s.llt->matrixL().solve(v);
}

Vector CovarianceModel::colour(const Vector &w) const {
  if (w.size() != size())
    throw InvalidArgument("covariance: colour size mismatch");
  // Diagonal colouring only needs square roots, so PSD diagonals are fine.
  if (state_->is_diagonal)
    return w.cwiseProduct(state_->diag.cwiseSqrt());
  const State &s = factorized();
  return s.llt->matrixL() * w;
}

Vector CovarianceModel::solve(const Vector &b) const {
  const State &s = factorized();
  if (b.size() != size())
    throw InvalidArgument("covariance: solve size mismatch");
  if (s.is_diagonal)
    return b.cwiseQuotient(s.diag);
  return s.llt->solve(b);
}

Matrix CovarianceModel::solve(const Matrix &b) const {
  const State &s = factorized();
  if (b.rows() != size())
    throw InvalidArgument("covariance: solve size mismatch");
  if (s.is_diagonal)
    return s.diag.cwiseInverse().asDiagonal() * b;
  return s.llt->solve(b);
}

Matrix CovarianceModel::inverse() const {
  return solve(Matrix(Matrix::Identity(size(), size())));
}

Matrix CovarianceModel::factor() const {
  if (state_->is_diagonal)
    return state_->diag.cwiseSqrt().asDiagonal();
  return factorized().llt->matrixL();
}

} // namespace bae
