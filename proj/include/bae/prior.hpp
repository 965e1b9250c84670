#pragma once

#include "bae/covariance.hpp"
#include "bae/grid.hpp"

#include <cstdint>
#include <memory>
#include <vector>

namespace bae {

/// Finite-element stiffness G and mass M for bilinear nodal basis functions on
/// the grid's rectangular elements, natural boundary conditions.
struct FemMatrices {
  SparseMatrix stiffness;
  SparseMatrix mass;
};

FemMatrices assemble_mass_stiffness(const Grid &grid);

/// Gaussian prior N(x_*, Gamma_xx) with Gamma_xx = (c1 (c2 G + M))^{-2}.
///
/// The precision factor L_x = c1 (c2 G + M) is symmetric positive definite and
/// serves directly as the whitening operator. The dense covariance is formed
/// on first use and shared between copies.
class PriorModel {
public:
  PriorModel(const Grid &grid, double c1, double c2, GridField mean);

  const Grid &grid() const { return mean_.grid(); }
  const GridField &mean() const { return mean_; }
  double c1() const { return c1_; }
  double c2() const { return c2_; }

  /// L_x as a sparse matrix.
  const SparseMatrix &precision_factor() const;
  /// Dense L_x^T L_x = Gamma_xx^{-1}.
  Matrix precision() const;

  /// L_x v.
  Vector whiten(const Vector &v) const;
  /// L_x^{-1} v.
  Vector unwhiten(const Vector &v) const;
  Matrix unwhiten(const Matrix &v) const;

  /// Dense Gamma_xx.
  const CovarianceModel &covariance() const;

private:
  struct State;

  GridField mean_;
  double c1_;
  double c2_;
  std::shared_ptr<State> state_;
};

PriorModel build_prior(const Grid &grid, double c1, double c2, const GridField &mean);

/// Draws x_* + L_x^{-1} w with w standard normal, from stream (seed, stream).
std::vector<GridField> sample_prior(const PriorModel &prior, std::uint64_t seed,
                                    int count,
                                    std::uint64_t stream = 1);

/// Correlation between node `center` and every other node.
GridField correlation_function(const PriorModel &prior, Eigen::Index center);

} // namespace bae
