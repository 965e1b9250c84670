#include "bae/noise.hpp"

#include <cmath>
#include <random>

namespace bae {

namespace {
template <class... Ts> struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts> overloaded(Ts...) -> overloaded<Ts...>;

bool finite_nonneg(double v) { return std::isfinite(v) && v >= 0.0; }
} // namespace

MultiplicativeNoiseSpec::MultiplicativeNoiseSpec(Law law) : law_(law) {
  std::visit(overloaded{
                 [](const GammaLaw &g) {
                   if (!(g.shape > 0.0) || !std::isfinite(g.shape))
                     throw InvalidArgument("gamma noise: shape L must be positive");
                 },
                 [](const NormalLaw &g) {
                   if (!finite_nonneg(g.sigma))
                     throw InvalidArgument("normal noise: sigma must be nonnegative");
                 },
                 [](const UniformLaw &g) {
                   if (!finite_nonneg(g.half_width))
                     throw InvalidArgument("uniform noise: half-width must be nonnegative");
                 },
                 [](const CorrelatedNormalLaw &g) {
                   if (!finite_nonneg(g.sigma))
                     throw InvalidArgument("correlated noise: sigma must be nonnegative");
                   if (!(g.length > 0.0) || !std::isfinite(g.length))
                     throw InvalidArgument("correlated noise: length must be positive");
                 },
             },
             law_);
}

std::string MultiplicativeNoiseSpec::name() const {
  return std::visit(overloaded{
                        [](const GammaLaw &) { return std::string("gamma"); },
                        [](const NormalLaw &) { return std::string("normal"); },
                        [](const UniformLaw &) { return std::string("uniform"); },
                        [](const CorrelatedNormalLaw &) { return std::string("correlated_normal"); },
                    },
                    law_);
}

double MultiplicativeNoiseSpec::variance() const {
  return std::visit(overloaded{
                        [](const GammaLaw &g) { return 1.0 / g.shape; },
                        [](const NormalLaw &g) { return g.sigma * g.sigma; },
                        [](const UniformLaw &g) { return g.half_width * g.half_width / 3.0; },
                        [](const CorrelatedNormalLaw &g) { return g.sigma * g.sigma; },
                    },
                    law_);
}

double MultiplicativeNoiseSpec::stddev() const { return std::sqrt(variance()); }

Matrix correlation_matrix(const Grid &grid, double length) {
  if (!(length > 0.0))
    throw InvalidArgument("correlation_matrix: length must be positive");
  const auto n = static_cast<Eigen::Index>(grid.size());
  const double scale = -0.5 / (length * length);
  Matrix r(n, n);
  for (Eigen::Index c = 0; c < n; ++c) {
    r(c, c) = 1.0;
    for (Eigen::Index k = c + 1; k < n; ++k) {
      const double di = static_cast<double>(grid.col_of(k) - grid.col_of(c));
      const double dj = static_cast<double>(grid.row_of(k) - grid.row_of(c));
      const double v = std::exp(scale * (di * di + dj * dj));
      r(k, c) = v;
      r(c, k) = v;
    }
  }
  return r;
}

CovarianceModel mult_covariance(const MultiplicativeNoiseSpec &spec, const Grid &grid) {
  const auto n = static_cast<Eigen::Index>(grid.size());
  if (spec.is_iid())
    return CovarianceModel::scaled_identity(n, spec.variance());
  const auto &law = std::get<CorrelatedNormalLaw>(spec.law());
  Matrix r = correlation_matrix(grid, law.length);
  CovarianceModel cov = CovarianceModel::dense(law.sigma * law.sigma * r);
  if (law.sigma > 0.0)
    cov.jitter(); // factor now so an unfactorable R surfaces here
  return cov;
}

void sample_multiplicative(const MultiplicativeNoiseSpec &spec, const CovarianceModel &cov,
                           RandomStream &rng, Vector &out) {
  auto &eng = rng.engine();
  std::visit(overloaded{
                 [&](const GammaLaw &g) {
                   std::gamma_distribution<double> d(g.shape, 1.0 / g.shape);
                   for (auto &v : out)
                     v = d(eng);
                 },
                 [&](const NormalLaw &g) {
                   for (auto &v : out)
                     v = 1.0 + g.sigma * rng.normal();
                 },
                 [&](const UniformLaw &g) {
                   std::uniform_real_distribution<double> d(1.0 - g.half_width, 1.0 + g.half_width);
                   for (auto &v : out)
                     v = g.half_width > 0.0 ? d(eng) : 1.0;
                 },
                 [&](const CorrelatedNormalLaw &g) {
                   if (g.sigma == 0.0) {
                     out.setOnes();
                     return;
                   }
                   out = Vector::Ones(out.size()) + cov.colour(rng.normal_vector(out.size()));
                 },
             },
             spec.law());
}

GridField sample_multiplicative(const MultiplicativeNoiseSpec &spec, const Grid &grid,
                                std::uint64_t seed, std::uint64_t stream) {
  const auto n = static_cast<Eigen::Index>(grid.size());
  const CovarianceModel cov = spec.is_iid() ? CovarianceModel::scaled_identity(n, spec.variance())
                                            : mult_covariance(spec, grid);
  RandomStream rng(seed, stream);
  Vector out(n);
  sample_multiplicative(spec, cov, rng, out);
  return GridField(grid, std::move(out));
}

double negative_probability(const MultiplicativeNoiseSpec &spec) {
  const auto normal_tail = [](double sigma) {
    return sigma == 0.0 ? 0.0 : 0.5 * std::erfc(1.0 / (sigma * std::sqrt(2.0)));
  };
  return std::visit(overloaded{
                        [](const GammaLaw &) { return 0.0; },
                        [&](const NormalLaw &g) { return normal_tail(g.sigma); },
                        [](const UniformLaw &g) {
                          return g.half_width <= 1.0 ? 0.0 : (g.half_width - 1.0) / (2.0 * g.half_width);
                        },
                        [&](const CorrelatedNormalLaw &g) { return normal_tail(g.sigma); },
                    },
                    spec.law());
}

AdditiveNoiseSpec calibrate_additive_sigma(const GridField &noiseless, double fraction) {
  if (!(fraction > 0.0) || !std::isfinite(fraction))
    throw InvalidArgument("calibrate_additive_sigma: fraction must be positive");
  const double range = value_range(noiseless);
  if (!(range > 0.0))
    throw InvalidArgument("calibrate_additive_sigma: noiseless field is constant");
  return AdditiveNoiseSpec{fraction * range};
}

CovarianceModel additive_covariance(const AdditiveNoiseSpec &spec, const Grid &grid) {
  return CovarianceModel::scaled_identity(static_cast<Eigen::Index>(grid.size()),
                                          spec.sigma * spec.sigma);
}

GridField sample_additive(const AdditiveNoiseSpec &spec, const Grid &grid, std::uint64_t seed,
                          std::uint64_t stream) {
  if (!finite_nonneg(spec.sigma))
    throw InvalidArgument("additive noise: sigma must be nonnegative");
  RandomStream rng(seed, stream);
  const auto n = static_cast<Eigen::Index>(grid.size());
  return GridField(grid, spec.sigma * rng.normal_vector(n));
}

} // namespace bae
