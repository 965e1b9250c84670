#pragma once

#include "bae/error_model.hpp"
#include "bae/forward.hpp"
#include "bae/prior.hpp"

#include <optional>

namespace bae {

/// Linear-Gaussian posterior for y = A x + e, e ~ N(E[e|x], cov), x ~ prior.
///
/// The data misfit is d - B x with B = A + gain and d = y - e_* + gain x_*
/// (gain = 0 for marginal statistics). The posterior precision
///   H = B^T cov^{-1} B + L_x^2
/// is formed densely and Cholesky-factored once.
class LinearGaussianPosterior {
public:
  LinearGaussianPosterior(const ForwardOperator &op, const ErrorStatistics &stats,
                          const PriorModel &prior);

  const Matrix &precision() const { return precision_; }

  /// Closed-form MAP via the factored precision.
  GridField map(const GridField &y) const;
  /// Matrix-free conjugate gradients on the normal equations.
  GridField map_iterative(const GridField &y, double rel_tol = 1e-12, int max_iter = 0) const;

  /// Gamma_{x|y} = H^{-1}.
  CovarianceModel covariance() const;

  /// 1/2 |L_e (d - B x)|^2 + 1/2 |L_x (x - x_*)|^2.
  double objective(const Vector &x, const GridField &y) const;
  Vector gradient(const Vector &x, const GridField &y) const;

private:
  Vector data_term(const GridField &y) const; // d
  Vector apply_b(const Vector &x) const;
  Vector apply_bt(const Vector &r) const;
  Vector apply_h(const Vector &x) const;
  Vector rhs(const GridField &y) const;

  ForwardOperator op_;
  ErrorStatistics stats_;
  PriorModel prior_;
  Matrix precision_;
  Eigen::LLT<Matrix> llt_;
};

GridField map_estimate(const ForwardOperator &op, const ErrorStatistics &stats,
                       const PriorModel &prior, const GridField &y);

CovarianceModel posterior_covariance(const ForwardOperator &op, const ErrorStatistics &stats,
                                     const PriorModel &prior);

struct CredibleBand {
  GridField lower;
  GridField upper;
};

/// map ± k sqrt(diag(Gamma_{x|y})).
CredibleBand credible_band(const GridField &map, const CovarianceModel &posterior, double k);
CredibleBand credible_band(const GridField &map, const GridField &pointwise_std, double k);

/// Fraction of nodes with lower <= truth <= upper.
double coverage_fraction(const GridField &truth, const GridField &lower, const GridField &upper);

struct PosteriorSummary {
  GridField map;
  GridField pointwise_std;
  double band_halfwidth_factor = 3.0;
  CredibleBand band;
  std::optional<double> coverage;

  double mean_std() const { return pointwise_std.values().mean(); }
};

PosteriorSummary summarize(const GridField &map, const CovarianceModel &posterior, double k,
                           const GridField *truth = nullptr);

} // namespace bae
