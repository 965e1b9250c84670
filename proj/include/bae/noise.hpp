#pragma once

#include "bae/covariance.hpp"
#include "bae/grid.hpp"
#include "bae/rng.hpp"

#include <cstdint>
#include <string>
#include <variant>

namespace bae {

/// n_i ~ Gamma(shape L, scale 1/L).
struct GammaLaw {
  double shape;
  bool operator==(const GammaLaw &) const = default;
};
/// n_i ~ N(1, sigma^2).
struct NormalLaw {
  double sigma;
  bool operator==(const NormalLaw &) const = default;
};
/// n_i ~ U(1 - half_width, 1 + half_width).
struct UniformLaw {
  double half_width;
  bool operator==(const UniformLaw &) const = default;
};
/// n = 1 + sigma R^{1/2} w with R_ij = exp(-d_ij^2 / (2 length^2)); d_ij and
/// length in pixels.
struct CorrelatedNormalLaw {
  double sigma;
  double length;
  bool operator==(const CorrelatedNormalLaw &) const = default;
};

/// Multiplicative noise law, always with unit mean.
class MultiplicativeNoiseSpec {
public:
  using Law = std::variant<GammaLaw, NormalLaw, UniformLaw, CorrelatedNormalLaw>;

  explicit MultiplicativeNoiseSpec(Law law);

  static MultiplicativeNoiseSpec gamma(double shape) { return MultiplicativeNoiseSpec(GammaLaw{shape}); }
  static MultiplicativeNoiseSpec normal(double sigma) { return MultiplicativeNoiseSpec(NormalLaw{sigma}); }
  static MultiplicativeNoiseSpec uniform(double half_width) {
    return MultiplicativeNoiseSpec(UniformLaw{half_width});
  }
  static MultiplicativeNoiseSpec correlated_normal(double sigma, double length) {
    return MultiplicativeNoiseSpec(CorrelatedNormalLaw{sigma, length});
  }

  const Law &law() const { return law_; }
  bool is_iid() const { return !std::holds_alternative<CorrelatedNormalLaw>(law_); }
  /// "gamma", "normal", "uniform" or "correlated_normal".
  std::string name() const;

  double mean() const { return 1.0; }
  double variance() const;
  double stddev() const;

  bool operator==(const MultiplicativeNoiseSpec &) const = default;

private:
  Law law_;
};

/// eta ~ N(0, sigma^2 I).
struct AdditiveNoiseSpec {
  double sigma = 0.0;

  bool operator==(const AdditiveNoiseSpec &) const = default;
};

/// Squared-exponential correlation over pixel (index) distances; length in pixels.
Matrix correlation_matrix(const Grid &grid, double length);

/// Gamma_nn. Dense only for the correlated law.
CovarianceModel mult_covariance(const MultiplicativeNoiseSpec &spec, const Grid &grid);

GridField sample_multiplicative(const MultiplicativeNoiseSpec &spec, const Grid &grid,
                                std::uint64_t seed,
                                std::uint64_t stream = static_cast<std::uint64_t>(Stream::multiplicative));

/// Draws one field into `out` using a caller-owned stream. `cov` must be
/// mult_covariance(spec, grid) for the correlated law and is ignored otherwise.
void sample_multiplicative(const MultiplicativeNoiseSpec &spec, const CovarianceModel &cov,
                           RandomStream &rng, Vector &out);

/// Marginal P(n_i < 0).
double negative_probability(const MultiplicativeNoiseSpec &spec);

/// sigma = fraction * value_range(noiseless).
AdditiveNoiseSpec calibrate_additive_sigma(const GridField &noiseless, double fraction);

CovarianceModel additive_covariance(const AdditiveNoiseSpec &spec, const Grid &grid);

GridField sample_additive(const AdditiveNoiseSpec &spec, const Grid &grid, std::uint64_t seed,
                          std::uint64_t stream = static_cast<std::uint64_t>(Stream::additive));

} // namespace bae
