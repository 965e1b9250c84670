#include "bae/covariance.hpp"

#include <doctest.h>

#include <random>

using namespace bae;

namespace {
Matrix random_spd(int n, unsigned seed) {
  std::mt19937_64 eng(seed);
  std::normal_distribution<double> d;
  Matrix b(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      b(i, j) = d(eng);
  return b * b.transpose() + n * Matrix::Identity(n, n);
}
} // namespace

TEST_CASE("dense covariance: factor, whiten, solve, colour") {
  const Matrix c = random_spd(6, 3);
  const auto cov = CovarianceModel::dense(c);
  CHECK_FALSE(cov.is_diagonal());
  CHECK(cov.size() == 6);
  const Matrix f = cov.factor();
  CHECK((f * f.transpose() - c).cwiseAbs().maxCoeff() < 1e-10);
  CHECK(f.isLowerTriangular());

  const Vector r = Vector::LinSpaced(6, -1.0, 2.0);
  const Vector w = cov.whiten(r);
  CHECK(w.squaredNorm() == doctest::Approx(r.dot(c.ldlt().solve(r))).epsilon(1e-12));
  CHECK((cov.colour(w) - r).norm() < 1e-12);
  CHECK((c * cov.solve(r) - r).norm() < 1e-10);
  CHECK((cov.inverse() * c - Matrix::Identity(6, 6)).cwiseAbs().maxCoeff() < 1e-10);
  CHECK(cov.trace() == doctest::Approx(c.trace()));
  CHECK(cov.jitter() == 0.0);
}

TEST_CASE("dense input is symmetrized") {
  Matrix c = random_spd(4, 5);
  Matrix skew = Matrix::Zero(4, 4);
  skew(0, 1) = 0.25;
  skew(1, 0) = -0.25;
  const auto cov = CovarianceModel::dense(c + skew);
  CHECK((cov.matrix() - c).cwiseAbs().maxCoeff() < 1e-15);
}

TEST_CASE("diagonal covariance stays diagonal") {
  Vector v(3);
  v << 4.0, 1.0, 0.25;
  const auto cov = CovarianceModel::diagonal(v);
  CHECK(cov.is_diagonal());
  Vector r(3);
  r << 2.0, -1.0, 1.0;
  Vector expect(3);
  expect << 1.0, -1.0, 2.0;
  CHECK((cov.whiten(r) - expect).norm() < 1e-15);
  CHECK(cov.trace() == 5.25);
  CHECK(cov.matrix().isApprox(Matrix(v.asDiagonal())));

  const auto iso = CovarianceModel::scaled_identity(5, 4.0);
  CHECK(iso.whiten(Vector(Vector::Ones(5))).isApprox(Vector::Constant(5, 0.5)));
  CHECK_THROWS_AS(CovarianceModel::diagonal(-v), InvalidArgument);
}

TEST_CASE("singular covariance gets jitter once, then fails") {
  // rank-one PSD matrix: jitter 1e-10 makes it factorable
  Vector u = Vector::Ones(3);
  const auto cov = CovarianceModel::dense(u * u.transpose());
  CHECK(cov.jitter() == kFactorJitter);

  Matrix bad = Matrix::Identity(3, 3);
  bad(2, 2) = -1.0;
  CHECK_THROWS_AS(CovarianceModel::dense(bad).factor(), NumericalError);
}

TEST_CASE("zero-variance diagonal colours to zero but cannot whiten") {
  const auto cov = CovarianceModel::scaled_identity(4, 0.0);
  CHECK(cov.colour(Vector::Ones(4)).isZero());
  CHECK_THROWS_AS(cov.whiten(Vector(Vector::Ones(4))), NumericalError);
}
