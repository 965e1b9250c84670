#include "bae/inference.hpp"
#include "bae/log_baseline.hpp"
#include "bae/noise.hpp"
#include "bae/rng.hpp"

#include <doctest.h>

#include <cmath>

using namespace bae;

namespace {
GridField positive_phantom(const Grid &g) {
  PhantomSpec spec;
  spec.background = 1.0;
  spec.blocks.push_back({0.2, 0.2, 0.6, 0.7, 2.0});
  spec.blocks.push_back({0.5, 0.1, 0.9, 0.4, 1.5});
  return make_phantom(g, spec);
}
} // namespace

TEST_CASE("lognormal moment matching") {
  const Grid g(3, 3);
  const PriorModel prior(g, 1.0, 1.0, GridField(g));
  const auto model = lognormal_log_model(1.0, prior);
  CHECK(model.xi_cov.diagonal()[0] == doctest::Approx(std::log(2.0)));
  CHECK(model.xi_mean[4] == doctest::Approx(-0.5 * std::log(2.0)));
  CHECK_THROWS_AS(lognormal_log_model(0.0, prior), InvalidArgument);
}

TEST_CASE("nonpositive data is a documented failure") {
  const Grid g(6, 6);
  const ForwardOperator op(g, 1.0);
  const PriorModel prior(g, 0.1, 5.0, GridField(g));
  const auto model = lognormal_log_model(0.5, prior);
  GridField y = GridField::constant(g, 1.0);
  y(2, 3) = -0.01;
  CHECK_THROWS_AS(log_transform_map(op, y, model), NonPositiveData);
  y(2, 3) = 0.0;
  CHECK_THROWS_AS(log_transform_map(op, y, model), NonPositiveData);
  try {
    log_transform_map(op, y, model);
  } catch (const MethodFailure &e) {
    CHECK(e.kind() == "NonPositiveData");
  }
}

TEST_CASE("sign-indefinite blurred phantom always fails on the data check") {
  const Grid g(16, 16);
  const ForwardOperator op(g, 2.0);
  const GridField y = op.apply(make_phantom(g, default_phantom()));
  const PriorModel prior(g, 0.1, 20.0, GridField(g));
  CHECK_THROWS_AS(log_transform_map(op, y, lognormal_log_model(1.0, prior)), NonPositiveData);
}

TEST_CASE("gradient matches finite differences") {
  const Grid g(5, 5);
  const ForwardOperator op(g, 1.0);
  const PriorModel prior(g, 0.5, 1.0, GridField::constant(g, 1.0));
  const auto model = lognormal_log_model(0.3, prior);
  const GridField y(g, Vector::LinSpaced(25, 0.5, 2.0));
  const Vector x = Vector::LinSpaced(25, 0.8, 1.6);
  const Vector grad = log_domain_gradient(op, y, model, x);
  for (int k = 0; k < 25; k += 3) {
    const double h = 1e-6;
    Vector xp = x, xm = x;
    xp[k] += h;
    xm[k] -= h;
    const double fd = (log_domain_objective(op, y, model, xp) - log_domain_objective(op, y, model, xm)) / (2 * h);
    CHECK(fd == doctest::Approx(grad[k]).epsilon(1e-6));
  }
  CHECK(std::isinf(log_domain_objective(op, y, model, Vector(-x))));
}

TEST_CASE("exact positive data is recovered") {
  const Grid g(8, 8);
  const ForwardOperator op(g, 0.6);
  const GridField truth = positive_phantom(g);
  const GridField y = op.apply(truth);
  const PriorModel prior(g, 1e-3, 1.0, GridField(g));
  const auto model = lognormal_log_model(1e-10, prior);
  const auto res = log_transform_map(op, y, model);
  CHECK(res.gradient_norm <= 1e-6 * res.initial_gradient_norm);
  CHECK((res.map.values() - truth.values()).norm() < 1e-5 * truth.values().norm());
}

TEST_CASE("iteration budget exhaustion is NonConvergence") {
  const Grid g(8, 8);
  const ForwardOperator op(g, 0.6);
  const GridField y = op.apply(positive_phantom(g));
  const PriorModel prior(g, 1e-3, 1.0, GridField(g));
  LogMapOptions opts;
  opts.max_iterations = 1;
  CHECK_THROWS_AS(log_transform_map(op, y, lognormal_log_model(1e-10, prior), opts), NonConvergence);
}

TEST_CASE("lognormal noise: log baseline is within 2x of the BAE error") {
  const Grid g(8, 8);
  const ForwardOperator op(g, 0.8);
  const GridField truth = positive_phantom(g);
  const PriorModel prior(g, 0.2, 1.0, GridField::constant(g, 1.4));
  const double v = 0.05;
  const double s2 = std::log1p(v);

  RandomStream rng(12, static_cast<std::uint64_t>(Stream::multiplicative));
  Vector n(64);
  for (auto &e : n)
    e = std::exp(-0.5 * s2 + std::sqrt(s2) * rng.normal());
  const double sigma_eta = 1e-3;
  const Vector eta = sample_additive({sigma_eta}, g, 12).values();
  const GridField y(g, n.cwiseProduct(op.apply(truth.values())) + eta);
  REQUIRE(y.values().minCoeff() > 0.0);

  const auto log_map = log_transform_map(op, y, lognormal_log_model(v, prior)).map;
  const auto stats = marginal_error_stats(CovarianceModel::scaled_identity(64, sigma_eta * sigma_eta),
                                          CovarianceModel::scaled_identity(64, v), op, prior);
  const auto bae_map = map_estimate(op, stats, prior, y);
  const double log_err = (log_map.values() - truth.values()).norm();
  const double bae_err = (bae_map.values() - truth.values()).norm();
  MESSAGE("log-baseline error " << log_err << ", BAE error " << bae_err);
  CHECK(log_err <= 2.0 * bae_err);
}
