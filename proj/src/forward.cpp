#include "bae/forward.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

namespace bae {

namespace {

double min_image(int a, int n, double h) {
  return std::min(a, n - a) * h;
}

void require_dense_size(const Grid &grid) {
  if (grid.size() > kMaxDenseNodes)
    throw InvalidArgument("dense realization: grid has " + std::to_string(grid.size()) +
                          " nodes, limit is " + std::to_string(kMaxDenseNodes));
}

} // namespace

GridField gaussian_kernel(const Grid &grid, double kappa) {
  if (!(kappa > 0.0) || !std::isfinite(kappa))
    throw InvalidArgument("gaussian_kernel: kappa must be positive");
  const double scale = grid.hx() * grid.hy() / (2.0 * std::numbers::pi * kappa * kappa);
  GridField k(grid);
  for (int b = 0; b < grid.ny(); ++b) {
    const double s2 = min_image(b, grid.ny(), grid.hy());
    for (int a = 0; a < grid.nx(); ++a) {
      const double s1 = min_image(a, grid.nx(), grid.hx());
      k(a, b) = scale * std::exp(-(s1 * s1 + s2 * s2) / (2.0 * kappa * kappa));
    }
  }
  return k;
}

ForwardOperator::ForwardOperator(const Grid &grid) : grid_(grid), kernel_(grid) {}

ForwardOperator::ForwardOperator(const Grid &grid, double kappa, double truncation_factor)
    : grid_(grid), kappa_(kappa), kernel_(gaussian_kernel(grid, kappa)) {
  if (!(truncation_factor > 0.0))
    throw InvalidArgument("forward operator: truncation factor must be positive");
  radius_ = truncation_factor * kappa;
  const double full_mass = kernel_.values().sum();
  for (int b = 0; b < grid.ny(); ++b) {
    const double s2 = min_image(b, grid.ny(), grid.hy());
    for (int a = 0; a < grid.nx(); ++a) {
      const double s1 = min_image(a, grid.nx(), grid.hx());
      if (std::sqrt(s1 * s1 + s2 * s2) > radius_)
        kernel_(a, b) = 0.0;
      else
        taps_.push_back({a, b, kernel_(a, b)});
    }
  }
  mass_ = kernel_.values().sum();
  truncation_error_ = full_mass - mass_;
}

ForwardOperator ForwardOperator::identity(const Grid &grid) {
  ForwardOperator op(grid);
  op.kernel_(0, 0) = 1.0;
  op.mass_ = 1.0;
  op.taps_.push_back({0, 0, 1.0});
  return op;
}

GridField ForwardOperator::centered_kernel() const {
  GridField out(grid_);
  const int cx = grid_.nx() / 2;
  const int cy = grid_.ny() / 2;
  for (int b = 0; b < grid_.ny(); ++b)
    for (int a = 0; a < grid_.nx(); ++a)
      out((a + cx) % grid_.nx(), (b + cy) % grid_.ny()) = kernel_(a, b);
  return out;
}

Vector ForwardOperator::apply(const Vector &x) const {
  if (static_cast<std::size_t>(x.size()) != grid_.size())
    throw InvalidArgument("forward operator: input length does not match grid");
  const int nx = grid_.nx();
  const int ny = grid_.ny();
  Vector y = Vector::Zero(x.size());
  for (const Tap &t : taps_) {
    for (int j = 0; j < ny; ++j) {
      const int sj = (j - t.dj + ny) % ny;
      const double *src = x.data() + static_cast<Eigen::Index>(sj) * nx;
      double *dst = y.data() + static_cast<Eigen::Index>(j) * nx;
      // dst[i] += w * src[(i - di) mod nx], split at the wrap point.
      for (int i = 0; i < t.di; ++i)
        dst[i] += t.weight * src[i - t.di + nx];
      for (int i = t.di; i < nx; ++i)
        dst[i] += t.weight * src[i - t.di];
    }
  }
  return y;
}

GridField ForwardOperator::apply(const GridField &x) const {
  require_same_grid(grid_, x.grid(), "forward operator");
  return GridField(grid_, apply(x.values()));
}

Matrix ForwardOperator::dense() const {
  require_dense_size(grid_);
  const auto n = static_cast<Eigen::Index>(grid_.size());
  const int nx = grid_.nx();
  const int ny = grid_.ny();
  Matrix a(n, n);
  for (Eigen::Index c = 0; c < n; ++c) {
    const int ci = grid_.col_of(c);
    const int cj = grid_.row_of(c);
    for (Eigen::Index r = 0; r < n; ++r) {
      const int da = (grid_.col_of(r) - ci + nx) % nx;
      const int db = (grid_.row_of(r) - cj + ny) % ny;
      a(r, c) = kernel_(da, db);
    }
  }
  return a;
}

Matrix dense_realization(const ForwardOperator &op) { return op.dense(); }

Matrix propagate_covariance(const ForwardOperator &op, const CovarianceModel &cov) {
  require_dense_size(op.grid());
  if (static_cast<std::size_t>(cov.size()) != op.grid().size())
    throw InvalidArgument("propagate_covariance: covariance size does not match grid");
  const Matrix a = op.dense();
  Matrix b;
  if (cov.is_diagonal()) {
    b = a * cov.diagonal().asDiagonal() * a.transpose();
  } else {
    const Matrix ag = a * cov.matrix();
    b.noalias() = ag * a.transpose();
  }
  return 0.5 * (b + b.transpose());
}

} // namespace bae
