#include "bae/oracle.hpp"
#include "bae/rng.hpp"

#include <boost/math/distributions/gamma.hpp>
#include <boost/math/quadrature/gauss.hpp>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <utility>

namespace bae {

namespace {

double normal_pdf(double z, double sigma) {
  return std::exp(-0.5 * (z / sigma) * (z / sigma)) / (sigma * std::sqrt(2.0 * std::numbers::pi));
}

/// Integration support of n: ±8 std (clipped at 0 for Gamma, whose upper end
/// is pushed out to the 1 - 1e-15 quantile), or the exact support for the
/// uniform law.
std::pair<double, double> support(const MultiplicativeNoiseSpec &spec) {
  const double sd = spec.stddev();
  if (const auto *g = std::get_if<GammaLaw>(&spec.law())) {
    const boost::math::gamma_distribution<double> dist(g->shape, 1.0 / g->shape);
    const double tail = boost::math::quantile(boost::math::complement(dist, 1e-15));
    return {std::max(0.0, 1.0 - 8.0 * sd), std::max(1.0 + 8.0 * sd, tail)};
  }
  if (const auto *u = std::get_if<UniformLaw>(&spec.law()))
    return {1.0 - u->half_width, 1.0 + u->half_width};
  return {1.0 - 8.0 * sd, 1.0 + 8.0 * sd};
}

template <class F> double composite_gauss(F &&f, double lo, double hi, int panels) {
  const double w = (hi - lo) / panels;
  double sum = 0.0;
  for (int p = 0; p < panels; ++p)
    sum += boost::math::quadrature::gauss<double, 20>::integrate(f, lo + p * w, lo + (p + 1) * w);
  return sum;
}

} // namespace

double multiplicative_density(const MultiplicativeNoiseSpec &spec, double n) {
  return std::visit(
      [n](const auto &law) -> double {
        using T = std::decay_t<decltype(law)>;
        if constexpr (std::is_same_v<T, GammaLaw>) {
          if (n <= 0.0)
            return 0.0;
          const double l = law.shape;
          return std::exp(l * std::log(l) + (l - 1.0) * std::log(n) - l * n - std::lgamma(l));
        } else if constexpr (std::is_same_v<T, UniformLaw>) {
          return std::abs(n - 1.0) <= law.half_width ? 0.5 / law.half_width : 0.0;
        } else {
          return normal_pdf(n - 1.0, law.sigma);
        }
      },
      spec.law());
}

QuadratureResult exact_likelihood_1d_detail(const ScalarProblem &prob, double y, double x) {
  if (!(prob.sigma_eta > 0.0))
    throw InvalidArgument("exact_likelihood_1d: sigma_eta must be positive");
  if (prob.quadrature_nodes < 64)
    throw InvalidArgument("exact_likelihood_1d: at least 64 quadrature nodes required");
  const double scale = prob.a * x;
  const double sd = prob.noise.stddev();
  if (sd == 0.0)
    return {normal_pdf(y - scale, prob.sigma_eta), 0};

  const auto [lo, hi] = support(prob.noise);
  const auto integrand = [&](double n) {
    return multiplicative_density(prob.noise, n) * normal_pdf(y - n * scale, prob.sigma_eta);
  };
  // Panels narrow enough to resolve both pi_n and the additive Gaussian seen
  // through n (width sigma_eta / |a x|).
  double width = sd;
  if (scale != 0.0)
    width = std::min(width, prob.sigma_eta / std::abs(scale));
  int panels = std::max((prob.quadrature_nodes + 19) / 20,
                        static_cast<int>(std::ceil((hi - lo) / width)));
  double coarse = composite_gauss(integrand, lo, hi, panels);
  for (int refinement = 0; refinement < 12; ++refinement) {
    panels *= 2;
    const double fine = composite_gauss(integrand, lo, hi, panels);
    if (std::abs(fine - coarse) <= 1e-8 * std::abs(fine) + 1e-290)
      return {fine, 20 * panels};
    coarse = fine;
  }
  throw NumericalError("exact_likelihood_1d: quadrature refinement did not converge");
}

double exact_likelihood_1d(const ScalarProblem &prob, double y, double x) {
  return exact_likelihood_1d_detail(prob, y, x).value;
}

double gaussian_likelihood_1d(const ScalarProblem &prob, double y, double x) {
  const double scale = prob.a * x;
  const double var = prob.noise.variance() * scale * scale + prob.sigma_eta * prob.sigma_eta;
  return normal_pdf(y - scale, std::sqrt(var));
}

DensityMoments exact_likelihood_moments(const ScalarProblem &prob, double x) {
  const double scale = prob.a * x;
  auto [lo, hi] = support(prob.noise);
  double ylo = std::min(lo * scale, hi * scale) - 10.0 * prob.sigma_eta;
  double yhi = std::max(lo * scale, hi * scale) + 10.0 * prob.sigma_eta;
  const double dy = prob.sigma_eta / 10.0;
  const auto steps = static_cast<int>(std::ceil((yhi - ylo) / dy));

  // Raw moments about the Gaussian mean a x to limit cancellation.
  double m0 = 0.0, m1 = 0.0, m2 = 0.0, m3 = 0.0, m4 = 0.0;
  for (int k = 0; k <= steps; ++k) {
    const double yk = ylo + k * dy;
    const double w = (k == 0 || k == steps) ? 0.5 * dy : dy;
    const double p = w * exact_likelihood_1d(prob, yk, x);
    const double d = yk - scale;
    m0 += p;
    m1 += p * d;
    m2 += p * d * d;
    m3 += p * d * d * d;
    m4 += p * d * d * d * d;
  }
  DensityMoments out;
  out.mass = m0;
  const double mu = m1 / m0;
  const double c2 = m2 / m0 - mu * mu;
  const double c3 = m3 / m0 - 3 * mu * m2 / m0 + 2 * mu * mu * mu;
  const double c4 = m4 / m0 - 4 * mu * m3 / m0 + 6 * mu * mu * m2 / m0 - 3 * mu * mu * mu * mu;
  out.mean = scale + mu;
  out.variance = c2;
  out.skewness = c3 / std::pow(c2, 1.5);
  out.excess_kurtosis = c4 / (c2 * c2) - 3.0;
  return out;
}

DensityMoments gaussian_likelihood_moments(const ScalarProblem &prob, double x) {
  const double scale = prob.a * x;
  DensityMoments out;
  out.mass = 1.0;
  out.mean = scale;
  out.variance = prob.noise.variance() * scale * scale + prob.sigma_eta * prob.sigma_eta;
  return out;
}

Matrix simulate_errors(const ForwardOperator &op, const PriorModel &prior,
                       const MultiplicativeNoiseSpec &mult, const AdditiveNoiseSpec &add,
                       std::uint64_t seed, int count) {
  if (count < 0)
    throw InvalidArgument("simulate_errors: count must be nonnegative");
  require_same_grid(op.grid(), prior.grid(), "simulate_errors");
  const auto m = static_cast<Eigen::Index>(op.grid().size());
  const CovarianceModel n_cov = mult.is_iid() ? CovarianceModel::scaled_identity(m, mult.variance())
                                              : mult_covariance(mult, op.grid());
  RandomStream x_rng(seed, Stream::validation_prior);
  RandomStream n_rng(seed, Stream::validation_multiplicative);
  RandomStream eta_rng(seed, Stream::validation_additive);

  Matrix out(count, m);
  Vector n(m);
  for (int r = 0; r < count; ++r) {
    const Vector x = prior.mean().values() + prior.unwhiten(x_rng.normal_vector(m));
    sample_multiplicative(mult, n_cov, n_rng, n);
    const Vector eta = add.sigma * eta_rng.normal_vector(m);
    out.row(r) = ((n.array() - 1.0) * op.apply(x).array()).matrix() + eta;
  }
  return out;
}

CovarianceComparison compare_covariance(const Matrix &samples, const Matrix &reference) {
  if (samples.cols() != reference.rows() || reference.rows() != reference.cols())
    throw InvalidArgument("compare_covariance: dimension mismatch");
  if (samples.rows() < 2)
    throw InvalidArgument("compare_covariance: need at least two samples");
  CovarianceComparison out;
  out.empirical_mean = samples.colwise().mean().transpose();
  const Matrix centred = samples.rowwise() - out.empirical_mean.transpose();
  out.empirical_cov = Matrix::Zero(reference.rows(), reference.cols());
  out.empirical_cov.selfadjointView<Eigen::Lower>().rankUpdate(centred.transpose());
  out.empirical_cov.triangularView<Eigen::StrictlyUpper>() = out.empirical_cov.transpose().eval();
  out.empirical_cov /= static_cast<double>(samples.rows() - 1);

  const Matrix diff = out.empirical_cov - reference;
  const double ref = reference.norm();
  out.rel_frobenius = diff.norm() / ref;
  out.rel_frobenius_diagonal = diff.diagonal().norm() / ref;
  out.rel_frobenius_offdiagonal =
      std::sqrt(std::max(0.0, diff.squaredNorm() - diff.diagonal().squaredNorm())) / ref;
  return out;
}

} // namespace bae
