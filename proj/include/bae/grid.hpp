#pragma once

#include "bae/types.hpp"

#include <cstddef>
#include <vector>

namespace bae {

/// Regular nx-by-ny pixel grid. Node (i, j) lives at index j*nx + i.
class Grid {
public:
  Grid(int nx, int ny, double hx = 1.0, double hy = 1.0);

  int nx() const { return nx_; }
  int ny() const { return ny_; }
  double hx() const { return hx_; }
  double hy() const { return hy_; }
  std::size_t size() const { return static_cast<std::size_t>(nx_) * ny_; }

  Eigen::Index index(int i, int j) const {
    return static_cast<Eigen::Index>(j) * nx_ + i;
  }
  int col_of(Eigen::Index k) const { return static_cast<int>(k % nx_); }
  int row_of(Eigen::Index k) const { return static_cast<int>(k / nx_); }

  /// Squared Euclidean distance between two nodes with periodic wrap-around.
  double periodic_distance2(Eigen::Index a, Eigen::Index b) const;
  /// Squared Euclidean distance between two nodes, no wrap-around.
  double distance2(Eigen::Index a, Eigen::Index b) const;

  bool operator==(const Grid &other) const = default;

private:
  int nx_;
  int ny_;
  double hx_;
  double hy_;
};

Grid make_grid(int nx, int ny, double hx = 1.0, double hy = 1.0);

/// Scalar field on a grid, row-major.
class GridField {
public:
  explicit GridField(Grid grid);
  GridField(Grid grid, Vector values);

  static GridField constant(const Grid &grid, double value);

  const Grid &grid() const { return grid_; }
  const Vector &values() const { return values_; }
  Vector &values() { return values_; }

  double operator()(int i, int j) const { return values_[grid_.index(i, j)]; }
  double &operator()(int i, int j) { return values_[grid_.index(i, j)]; }

private:
  Grid grid_;
  Vector values_;
};

/// Throws InvalidArgument when the two fields live on different grids.
void require_same_grid(const Grid &a, const Grid &b, const char *what);

/// Values along row `row`, in increasing x order.
std::vector<double> cross_section(const GridField &field, int row);

/// max(values) - min(values).
double value_range(const GridField &field);

/// Axis-aligned block of constant value, in fractional domain coordinates
/// [x0, x1) x [y0, y1) with 0 <= x0 < x1 <= 1.
struct PhantomBlock {
  double x0, y0, x1, y1;
  double value;

  bool operator==(const PhantomBlock &) const = default;
};

struct PhantomSpec {
  double background = 0.0;
  std::vector<PhantomBlock> blocks;

  bool operator==(const PhantomSpec &) const = default;
};

/// Default sign-indefinite target: zero background, one +1 block and one -1
/// block.
PhantomSpec default_phantom();

/// Rasterizes the phantom; a pixel takes the value of the last block that
/// contains its centre.
GridField make_phantom(const Grid &grid, const PhantomSpec &spec);

} // namespace bae
