#include "bae/error_model.hpp"
#include "bae/noise.hpp"
#include "bae/oracle.hpp"
#include "bae/rng.hpp"

#include <doctest.h>

#include <cmath>
#include <random>

using namespace bae;

namespace {

Matrix random_matrix(int r, int c, unsigned seed) {
  std::mt19937_64 eng(seed);
  std::normal_distribution<double> d;
  Matrix m(r, c);
  for (int i = 0; i < r; ++i)
    for (int j = 0; j < c; ++j)
      m(i, j) = d(eng);
  return m;
}

// The validation setting: 8x8 nodes over the 50x50 reference domain.
struct Small {
  Grid grid{8, 8, 50.0 / 8, 50.0 / 8};
  ForwardOperator op{grid, 5.0};
  PriorModel prior{grid, 0.1, 20.0, GridField(grid)};
};

} // namespace

TEST_CASE("error mean") {
  const Grid g(4, 4);
  const ForwardOperator op(g, 1.0);
  Vector xv = Vector::LinSpaced(16, -1.0, 2.0);
  const GridField x(g, xv);
  const Vector e0 = error_mean(Vector::Ones(16), Vector::Zero(16), op, x);
  CHECK((e0.array() == 0.0).all());

  const Vector e1 = error_mean(Vector::Constant(16, 1.25), Vector::Zero(16), op, x);
  CHECK((e1 - 0.25 * op.apply(xv)).cwiseAbs().maxCoeff() < 1e-15);

  const Vector eta = Vector::Constant(16, 0.5);
  CHECK((error_mean(Vector::Ones(16), eta, op, x) - eta).isZero(0.0));
  CHECK_THROWS_AS(error_mean(Vector::Ones(15), Vector::Zero(16), op, x), InvalidArgument);
}

TEST_CASE("error mean against simulation with n_* = 1.2 (Monte Carlo)") {
  const Grid g(4, 4);
  const ForwardOperator op(g, 1.0);
  const GridField xm(g, Vector::LinSpaced(16, 0.5, 2.0));
  const PriorModel prior(g, 1.0, 1.0, xm);
  const Vector expect = error_mean(Vector::Constant(16, 1.2), Vector::Zero(16), op, xm);

  RandomStream rng(17, 1);
  std::gamma_distribution<double> gam(1.0, 1.0);
  const int N = 1000000;
  Vector sum = Vector::Zero(16), sum2 = Vector::Zero(16);
  for (int s = 0; s < N; ++s) {
    const Vector x = xm.values() + prior.unwhiten(rng.normal_vector(16));
    Vector n(16);
    for (auto &v : n)
      v = 1.2 * gam(rng.engine()); // mean 1.2
    const Vector e = (n.array() - 1.0).matrix().cwiseProduct(op.apply(x)) + 0.1 * rng.normal_vector(16);
    sum += e;
    sum2 += e.cwiseAbs2();
  }
  const Vector mean = sum / N;
  const Vector sd = (sum2 / N - mean.cwiseAbs2()).cwiseSqrt();
  for (int i = 0; i < 16; ++i)
    CHECK(std::abs(mean[i] - expect[i]) < 5.0 * sd[i] / std::sqrt(N));
}

TEST_CASE("error covariance hand example and iid simplification") {
  Matrix nn(2, 2), aga(2, 2), expect(2, 2);
  nn << 1, 0.5, 0.5, 1;
  aga << 2, 1, 1, 2;
  expect << 2, 0.5, 0.5, 2;
  const auto ee = error_covariance(CovarianceModel::scaled_identity(2, 0.0),
                                   CovarianceModel::dense(nn), aga);
  CHECK(ee.matrix() == expect);

  const Matrix P = random_matrix(5, 5, 9) * random_matrix(5, 5, 9).transpose();
  const auto iid = error_covariance(CovarianceModel::scaled_identity(5, 0.04),
                                    CovarianceModel::scaled_identity(5, 2.0), P);
  CHECK(iid.is_diagonal());
  CHECK((iid.diagonal() - (Vector::Constant(5, 0.04) + 2.0 * P.diagonal())).cwiseAbs().maxCoeff() <
        1e-14);
}

TEST_CASE("trace identity and zero multiplicative noise") {
  const Small s;
  const Matrix P = propagate_covariance(s.op, s.prior.covariance());
  const auto eta = CovarianceModel::scaled_identity(64, 0.01);
  const auto nn = mult_covariance(MultiplicativeNoiseSpec::correlated_normal(0.8, 2.0), s.grid);
  const auto ee = error_covariance(eta, nn, P);
  const double expect = eta.trace() + nn.diagonal().dot(P.diagonal());
  CHECK(ee.trace() == doctest::Approx(expect).epsilon(1e-14));

  const auto zero = error_covariance(eta, CovarianceModel::scaled_identity(64, 0.0), P);
  CHECK(zero.matrix() == eta.matrix());
}

TEST_CASE("simulated errors match Gamma_ee for every noise law (Monte Carlo)") {
  const Small s;
  const Matrix P = propagate_covariance(s.op, s.prior.covariance());
  const AdditiveNoiseSpec add{0.05};
  const std::vector<MultiplicativeNoiseSpec> specs{
      MultiplicativeNoiseSpec::gamma(1.0),
      MultiplicativeNoiseSpec::normal(1.0),
      MultiplicativeNoiseSpec::uniform(std::sqrt(3.0)),
      MultiplicativeNoiseSpec::correlated_normal(1.0, 2.0),
      MultiplicativeNoiseSpec::correlated_normal(1.0, 5.0),
      MultiplicativeNoiseSpec::correlated_normal(1.0, 10.0),
  };
  for (const auto &spec : specs) {
    CAPTURE(spec.name());
    const auto ee = error_covariance(additive_covariance(add, s.grid), mult_covariance(spec, s.grid), P);
    const Matrix samples = simulate_errors(s.op, s.prior, spec, add, 4242, 100000);
    const auto cmp = compare_covariance(samples, ee.matrix());
    CHECK(cmp.rel_frobenius < 0.05);

    const Matrix z = ee.whiten(Matrix(samples.transpose()));
    const Vector var = z.cwiseAbs2().rowwise().mean();
    CHECK(var.minCoeff() > 0.9);
    CHECK(var.maxCoeff() < 1.1);
  }
}

TEST_CASE("conditional statistics reduce to the marginal ones") {
  const Small s;
  const auto eta = CovarianceModel::scaled_identity(64, 0.01);
  const auto nn = mult_covariance(MultiplicativeNoiseSpec::gamma(1.0), s.grid);
  const auto marg = marginal_error_stats(eta, nn, s.op, s.prior);
  const auto cond = conditional_error_stats(eta, nn, s.op, s.prior, Matrix::Zero(64, 64));
  CHECK((cond.cov.matrix() - marg.cov.matrix()).cwiseAbs().maxCoeff() == 0.0);
  CHECK(cond.conditional_mean(Vector::LinSpaced(64, -1, 1)).isZero(0.0));
  CHECK_FALSE(marg.conditional());

  const auto none = CovarianceModel::scaled_identity(64, 0.0);
  const auto bare = conditional_error_stats(none, nn, s.op, s.prior, Matrix::Zero(64, 64));
  const Matrix P = propagate_covariance(s.op, s.prior.covariance());
  CHECK((bare.cov.matrix() - Matrix(P.diagonal().asDiagonal())).cwiseAbs().maxCoeff() < 1e-15);
}

TEST_CASE("conditional covariance against regression on joint draws (Monte Carlo)") {
  const Grid g(2, 2);
  const ForwardOperator op(g, 0.8);
  const PriorModel prior(g, 1.0, 0.5, GridField(g));
  const double sigma = 0.5;
  Matrix R = random_matrix(4, 4, 21);
  R /= Eigen::JacobiSVD<Matrix>(R).singularValues()[0];
  // Gamma_etax = c R L_x^{-1}, so that Gamma_etax Gamma_xx^{-1} Gamma_xeta = c^2 R R^T
  const double c = 0.8 * sigma;
  const Matrix etax = c * prior.unwhiten(Matrix(R.transpose())).transpose();
  const auto eta = CovarianceModel::scaled_identity(4, sigma * sigma);
  const auto spec = MultiplicativeNoiseSpec::normal(0.7);
  const auto nn = mult_covariance(spec, g);
  const auto stats = conditional_error_stats(eta, nn, op, prior, etax);

  const Matrix explained = c * c * R * R.transpose();
  const Matrix schur_root = Eigen::LLT<Matrix>(sigma * sigma * Matrix::Identity(4, 4) - explained).matrixL();
  RandomStream rng(3, 3);
  const int N = 1000000;
  Matrix X(N, 4), E(N, 4);
  for (int k = 0; k < N; ++k) {
    const Vector w = rng.normal_vector(4);
    const Vector x = prior.unwhiten(w);
    // eta | x = Gamma_etax Gamma_xx^{-1} x + Schur^{1/2} v
    const Vector etav = c * R * w + schur_root * rng.normal_vector(4);
    const Vector n = Vector::Ones(4) + 0.7 * rng.normal_vector(4);
    X.row(k) = x.transpose();
    E.row(k) = ((n.array() - 1.0).matrix().cwiseProduct(op.apply(x)) + etav).transpose();
  }
  // least-squares regression of e on x, then the residual covariance
  const Matrix B = (X.transpose() * X).ldlt().solve(X.transpose() * E);
  const Matrix resid = E - X * B;
  const Matrix S = resid.transpose() * resid / (N - 4);
  const Matrix C = stats.cov.matrix();
  CHECK((S - C).norm() / C.norm() < 0.05);
  CHECK((B.transpose() - *stats.gain).norm() / stats.gain->norm() < 0.05);
}

TEST_CASE("conditional statistics reject a non-PSD joint covariance") {
  const Grid g(2, 2);
  const ForwardOperator op(g, 0.8);
  const PriorModel prior(g, 1.0, 0.5, GridField(g));
  const Matrix etax = 1.5 * 0.5 * prior.unwhiten(Matrix(Matrix::Identity(4, 4)));
  CHECK_THROWS_AS(conditional_error_stats(CovarianceModel::scaled_identity(4, 0.25),
                                          mult_covariance(MultiplicativeNoiseSpec::gamma(1), g), op,
                                          prior, etax),
                  NumericalError);
}

TEST_CASE("whitening") {
  const auto make = [](CovarianceModel cov) {
    const auto m = cov.size();
    return ErrorStatistics{Vector::Zero(m), std::move(cov), std::nullopt, std::nullopt, Vector()};
  };
  Vector r(3);
  r << 1.0, -2.0, 4.0;
  CHECK(whiten(make(CovarianceModel::scaled_identity(3, 1.0)), r) == r);
  CHECK((whiten(make(CovarianceModel::scaled_identity(3, 4.0)), r) - r / 2).isZero(0.0));

  const Matrix b = random_matrix(5, 5, 8);
  const Matrix spd = b * b.transpose() + Matrix::Identity(5, 5);
  const Vector v = Vector::LinSpaced(5, -1.0, 3.0);
  const auto stats = make(CovarianceModel::dense(spd));
  CHECK(whiten(stats, v).squaredNorm() == doctest::Approx(v.dot(spd.ldlt().solve(v))).epsilon(1e-10));
  const Matrix f = stats.cov.factor();
  const Matrix li = f.inverse();
  CHECK((li.transpose() * li * spd - Matrix::Identity(5, 5)).cwiseAbs().maxCoeff() < 1e-8);

  auto shifted = stats;
  shifted.mean = Vector::Ones(5);
  CHECK((whiten(shifted, v) - whiten(stats, Vector(v - Vector::Ones(5)))).isZero(0.0));
}
