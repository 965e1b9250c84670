#include "bae/prior.hpp"
#include "bae/rng.hpp"

#include <array>
#include <cmath>
#include <mutex>
#include <optional>

namespace bae {

namespace {

// Local node order: (0,0), (1,0), (1,1), (0,1).
using Element = std::array<std::array<double, 4>, 4>;

Element element_mass(double hx, double hy) {
  const double s = hx * hy / 36.0;
  return {{{4 * s, 2 * s, 1 * s, 2 * s},
           {2 * s, 4 * s, 2 * s, 1 * s},
           {1 * s, 2 * s, 4 * s, 2 * s},
           {2 * s, 1 * s, 2 * s, 4 * s}}};
}

Element element_stiffness(double hx, double hy) {
  const double a = hy / (6.0 * hx); // d/dx part
  const double b = hx / (6.0 * hy); // d/dy part
  constexpr int kx[4][4] = {{2, -2, -1, 1}, {-2, 2, 1, -1}, {-1, 1, 2, -2}, {1, -1, -2, 2}};
  constexpr int ky[4][4] = {{2, 1, -1, -2}, {1, 2, -2, -1}, {-1, -2, 2, 1}, {-2, -1, 1, 2}};
  Element k{};
  for (int r = 0; r < 4; ++r)
    for (int c = 0; c < 4; ++c)
      k[r][c] = a * kx[r][c] + b * ky[r][c];
  return k;
}

} // namespace

FemMatrices assemble_mass_stiffness(const Grid &grid) {
  const auto me = element_mass(grid.hx(), grid.hy());
  const auto ke = element_stiffness(grid.hx(), grid.hy());
  const auto n = static_cast<Eigen::Index>(grid.size());

  std::vector<Eigen::Triplet<double>> mt, kt;
  const std::size_t elements = static_cast<std::size_t>(grid.nx() - 1) * (grid.ny() - 1);
  mt.reserve(16 * elements);
  kt.reserve(16 * elements);
  for (int j = 0; j + 1 < grid.ny(); ++j) {
    for (int i = 0; i + 1 < grid.nx(); ++i) {
      const std::array<Eigen::Index, 4> nodes = {grid.index(i, j), grid.index(i + 1, j),
                                                 grid.index(i + 1, j + 1),
                                                 grid.index(i, j + 1)};
      for (int r = 0; r < 4; ++r) {
        for (int c = 0; c < 4; ++c) {
          mt.emplace_back(nodes[r], nodes[c], me[r][c]);
          kt.emplace_back(nodes[r], nodes[c], ke[r][c]);
        }
      }
    }
  }
  FemMatrices fem{SparseMatrix(n, n), SparseMatrix(n, n)};
  fem.stiffness.setFromTriplets(kt.begin(), kt.end());
  fem.mass.setFromTriplets(mt.begin(), mt.end());
  return fem;
}

struct PriorModel::State {
  SparseMatrix factor;
  Eigen::SimplicialLLT<SparseMatrix> llt;

  std::once_flag once;
  std::optional<CovarianceModel> covariance;
};

PriorModel::PriorModel(const Grid &grid, double c1, double c2, GridField mean)
    : mean_(std::move(mean)), c1_(c1), c2_(c2), state_(std::make_shared<State>()) {
  if (!(c1 > 0.0) || !std::isfinite(c1))
    throw InvalidArgument("prior: c1 must be positive");
  if (!(c2 >= 0.0) || !std::isfinite(c2))
    throw InvalidArgument("prior: c2 must be nonnegative");
  require_same_grid(grid, mean_.grid(), "prior mean");

  const FemMatrices fem = assemble_mass_stiffness(grid);
  state_->factor = c1 * (c2 * fem.stiffness + fem.mass);
  state_->factor.makeCompressed();
  state_->llt.compute(state_->factor);
  if (state_->llt.info() != Eigen::Success)
    throw NumericalError("prior: factorization of c1 (c2 G + M) failed");
}

const SparseMatrix &PriorModel::precision_factor() const { return state_->factor; }

Matrix PriorModel::precision() const {
  const Matrix l(state_->factor);
  return l * l;
}

Vector PriorModel::whiten(const Vector &v) const { return state_->factor * v; }

Vector PriorModel::unwhiten(const Vector &v) const { return state_->llt.solve(v); }

Matrix PriorModel::unwhiten(const Matrix &v) const { return state_->llt.solve(v); }

const CovarianceModel &PriorModel::covariance() const {
  State &s = *state_;
  std::call_once(s.once, [&s] {
    const auto n = s.factor.rows();
    const Matrix half = s.llt.solve(Matrix(Matrix::Identity(n, n)));
    Matrix gamma = s.llt.solve(half);
    s.covariance.emplace(CovarianceModel::dense(std::move(gamma)));
  });
  return *s.covariance;
}

PriorModel build_prior(const Grid &grid, double c1, double c2, const GridField &mean) {
  return PriorModel(grid, c1, c2, mean);
}

std::vector<GridField> sample_prior(const PriorModel &prior, std::uint64_t seed,
                                    int count, std::uint64_t stream) {
  if (count < 0)
    throw InvalidArgument("sample_prior: count must be nonnegative");
  RandomStream rng(seed, stream);
  const auto n = static_cast<Eigen::Index>(prior.grid().size());
  std::vector<GridField> draws;
  draws.reserve(count);
  for (int k = 0; k < count; ++k) {
    Vector x = prior.mean().values() + prior.unwhiten(rng.normal_vector(n));
    draws.emplace_back(prior.grid(), std::move(x));
  }
  return draws;
}

GridField correlation_function(const PriorModel &prior, Eigen::Index center) {
  const auto n = static_cast<Eigen::Index>(prior.grid().size());
  if (center < 0 || center >= n)
    throw InvalidArgument("correlation_function: node index out of range");
  const Vector variance = prior.covariance().diagonal();
  Vector unit = Vector::Zero(n);
  unit[center] = 1.0;
  const Vector column = prior.unwhiten(prior.unwhiten(unit));
  Vector corr = column.array() / (variance.array() * variance[center]).sqrt();
  corr[center] = 1.0;
  return GridField(prior.grid(), std::move(corr));
}

} // namespace bae
