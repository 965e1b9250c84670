#include "bae/grid.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <string>

namespace bae {

Grid::Grid(int nx, int ny, double hx, double hy)
    : nx_(nx), ny_(ny), hx_(hx), hy_(hy) {
  if (nx < 2 || ny < 2)
    throw InvalidArgument("grid: nx and ny must be at least 2, got " +
                          std::to_string(nx) + "x" + std::to_string(ny));
  if (!(hx > 0.0) || !(hy > 0.0) || !std::isfinite(hx) || !std::isfinite(hy))
    throw InvalidArgument("grid: element sizes must be positive");
}

namespace {
int wrap_offset(int d, int n) {
  d = std::abs(d) % n;
  return std::min(d, n - d);
}
} // namespace

double Grid::periodic_distance2(Eigen::Index a, Eigen::Index b) const {
  const double dx = wrap_offset(col_of(a) - col_of(b), nx_) * hx_;
  const double dy = wrap_offset(row_of(a) - row_of(b), ny_) * hy_;
  return dx * dx + dy * dy;
}

double Grid::distance2(Eigen::Index a, Eigen::Index b) const {
  const double dx = (col_of(a) - col_of(b)) * hx_;
  const double dy = (row_of(a) - row_of(b)) * hy_;
  return dx * dx + dy * dy;
}

Grid make_grid(int nx, int ny, double hx, double hy) {
  return Grid(nx, ny, hx, hy);
}

GridField::GridField(Grid grid)
    : grid_(grid), values_(Vector::Zero(static_cast<Eigen::Index>(grid.size()))) {}

GridField::GridField(Grid grid, Vector values)
    : grid_(grid), values_(std::move(values)) {
  if (static_cast<std::size_t>(values_.size()) != grid_.size())
    throw InvalidArgument("field: value count " + std::to_string(values_.size()) +
                          " does not match grid size " +
                          std::to_string(grid_.size()));
  if (!values_.allFinite())
    throw InvalidArgument("field: values must be finite");
}

GridField GridField::constant(const Grid &grid, double value) {
  return GridField(grid, Vector::Constant(static_cast<Eigen::Index>(grid.size()), value));
}

void require_same_grid(const Grid &a, const Grid &b, const char *what) {
  if (!(a == b))
    throw InvalidArgument(std::string(what) + ": grid mismatch");
}

std::vector<double> cross_section(const GridField &field, int row) {
  const Grid &g = field.grid();
  if (row < 0 || row >= g.ny())
    throw InvalidArgument("cross_section: row " + std::to_string(row) +
                          " outside [0, " + std::to_string(g.ny()) + ")");
  std::vector<double> out(g.nx());
  for (int i = 0; i < g.nx(); ++i)
    out[i] = field(i, row);
  return out;
}

double value_range(const GridField &field) {
  const Vector &v = field.values();
  return v.maxCoeff() - v.minCoeff();
}

PhantomSpec default_phantom() {
  PhantomSpec spec;
  spec.background = 0.0;
  spec.blocks = {{0.16, 0.24, 0.44, 0.70, 1.0}, {0.56, 0.36, 0.84, 0.80, -1.0}};
  return spec;
}

GridField make_phantom(const Grid &grid, const PhantomSpec &spec) {
  for (const auto &b : spec.blocks) {
    if (!(b.x0 >= 0.0 && b.x0 < b.x1 && b.x1 <= 1.0 && b.y0 >= 0.0 &&
          b.y0 < b.y1 && b.y1 <= 1.0) ||
        !std::isfinite(b.value))
      throw InvalidArgument("phantom: block must satisfy 0 <= x0 < x1 <= 1 and "
                            "0 <= y0 < y1 <= 1");
  }
  GridField field = GridField::constant(grid, spec.background);
  for (int j = 0; j < grid.ny(); ++j) {
    const double yc = (j + 0.5) / grid.ny();
    for (int i = 0; i < grid.nx(); ++i) {
      const double xc = (i + 0.5) / grid.nx();
      for (const auto &b : spec.blocks)
        if (xc >= b.x0 && xc < b.x1 && yc >= b.y0 && yc < b.y1)
          field(i, j) = b.value;
    }
  }
  return field;
}

} // namespace bae
