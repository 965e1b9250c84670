#pragma once

#include "bae/covariance.hpp"
#include "bae/grid.hpp"

#include <vector>

namespace bae {

/// Largest node count for which dense realizations are formed.
inline constexpr std::size_t kMaxDenseNodes = 4096;

/// Periodized Gaussian kernel weights
///   hx*hy / (2 pi kappa^2) * exp(-(s1^2 + s2^2) / (2 kappa^2)),
/// indexed by offset residue: entry (a, b) holds the weight for the offset
/// (a mod nx, b mod ny), evaluated at its minimum-image distance.
GridField gaussian_kernel(const Grid &grid, double kappa);

/// Circulant 2D convolution with a truncated Gaussian kernel.
class ForwardOperator {
public:
  /// Weights at minimum-image distance above truncation_factor * kappa are
  /// dropped; the remaining weights are kept exactly (no renormalization).
  ForwardOperator(const Grid &grid, double kappa, double truncation_factor = 4.0);

  /// A = I. Used to check covariance propagation.
  static ForwardOperator identity(const Grid &grid);

  const Grid &grid() const { return grid_; }
  double kappa() const { return kappa_; }
  double truncation_radius() const { return radius_; }
  /// Stored (truncated) kernel, residue-indexed like gaussian_kernel().
  const GridField &kernel() const { return kernel_; }
  /// Kernel shifted so that offset (0, 0) sits at node (nx/2, ny/2).
  GridField centered_kernel() const;
  /// Sum of stored weights (every row sum of A).
  double kernel_mass() const { return mass_; }
  /// Periodized mass dropped by the truncation.
  double truncation_error() const { return truncation_error_; }

  GridField apply(const GridField &x) const;
  Vector apply(const Vector &x) const;

  /// Dense A, A(r, c) = weight of the periodic offset from node c to node r.
  Matrix dense() const;

private:
  ForwardOperator(const Grid &grid);

  struct Tap {
    int di;
    int dj;
    double weight;
  };

  Grid grid_;
  double kappa_ = 0.0;
  double radius_ = 0.0;
  GridField kernel_;
  double mass_ = 0.0;
  double truncation_error_ = 0.0;
  std::vector<Tap> taps_;
};

Matrix dense_realization(const ForwardOperator &op);

/// A Gamma A^T, symmetrized as (B + B^T)/2.
Matrix propagate_covariance(const ForwardOperator &op, const CovarianceModel &cov);

} // namespace bae
