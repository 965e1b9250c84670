#pragma once

#include "bae/forward.hpp"
#include "bae/noise.hpp"
#include "bae/prior.hpp"

#include <cstdint>

namespace bae {

/// Scalar observation y = n * a * x + eta, used to check the Gaussian error
/// approximation against exact marginalization over n.
struct ScalarProblem {
  double a = 1.0;
  MultiplicativeNoiseSpec noise = MultiplicativeNoiseSpec::gamma(1.0);
  double sigma_eta = 0.1;
  int quadrature_nodes = 64; ///< initial node count, at least 64
};

/// Marginal density of n (scalar problems use the marginal of the
/// correlated law).
double multiplicative_density(const MultiplicativeNoiseSpec &spec, double n);

struct QuadratureResult {
  double value = 0.0;
  int nodes = 0; ///< node count of the accepted refinement
};

/// ∫ pi_n(n) pi_eta(y - n a x) dn by composite Gauss-Legendre panels,
/// doubling the panel count until two refinements agree to 1e-8 relative.
/// Throws NumericalError when refinement does not converge.
QuadratureResult exact_likelihood_1d_detail(const ScalarProblem &prob, double y, double x);
double exact_likelihood_1d(const ScalarProblem &prob, double y, double x);

/// The Gaussian approximation N(a x, sigma_n^2 (a x)^2 + sigma_eta^2) of the
/// same likelihood (unit-mean n, zero-mean eta).
double gaussian_likelihood_1d(const ScalarProblem &prob, double y, double x);

struct DensityMoments {
  double mass = 0.0;
  double mean = 0.0;
  double variance = 0.0;
  double skewness = 0.0;
  double excess_kurtosis = 0.0;
};

/// Moments of y ↦ exact_likelihood_1d(prob, y, x) by the trapezoid rule on a
/// y-grid with spacing sigma_eta / 10 covering the support of n a x widened by
/// 10 sigma_eta.
DensityMoments exact_likelihood_moments(const ScalarProblem &prob, double x);

/// Moments of the Gaussian approximation (skewness and kurtosis are zero).
DensityMoments gaussian_likelihood_moments(const ScalarProblem &prob, double x);

/// count x m matrix whose rows are e = (n - 1) ⊙ A x + eta with independent
/// x ~ prior, n ~ mult, eta ~ add, drawn from the validation streams of `seed`.
Matrix simulate_errors(const ForwardOperator &op, const PriorModel &prior,
                       const MultiplicativeNoiseSpec &mult, const AdditiveNoiseSpec &add,
                       std::uint64_t seed, int count);

struct CovarianceComparison {
  Vector empirical_mean;
  Matrix empirical_cov;
  double rel_frobenius = 0.0;          ///< |S - C|_F / |C|_F
  double rel_frobenius_diagonal = 0.0; ///< diagonal part, relative to |C|_F
  double rel_frobenius_offdiagonal = 0.0;
};

/// Sample covariance (N - 1 normalization) of the rows of `samples` compared
/// with `reference`.
CovarianceComparison compare_covariance(const Matrix &samples, const Matrix &reference);

} // namespace bae
