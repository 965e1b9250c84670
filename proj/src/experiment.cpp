#include "bae/experiment.hpp"
#include "bae/error_model.hpp"
#include "bae/field_io.hpp"
#include "bae/log_baseline.hpp"
#include "bae/noise.hpp"
#include "bae/oracle.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <sstream>

namespace bae {

using nlohmann::json;

namespace {

json covariance_facts(const CovarianceModel &cov) {
  const Vector d = cov.diagonal();
  return {{"trace", d.sum()},
          {"min_diagonal", d.minCoeff()},
          {"max_diagonal", d.maxCoeff()},
          {"diagonal", cov.is_diagonal()},
          {"jitter", cov.jitter()}};
}

} // namespace

ExperimentOutcome simulate_and_reconstruct(const ExperimentConfig &config) {
  validate(config);
  const Grid grid = config.grid();
  const auto n = static_cast<Eigen::Index>(grid.size());

  const GridField truth = make_phantom(grid, config.phantom);
  const ForwardOperator op(grid, config.kappa, config.truncation_factor);
  const GridField blurred = op.apply(truth);
  const AdditiveNoiseSpec add = calibrate_additive_sigma(blurred, config.additive_fraction);

  const CovarianceModel n_cov = mult_covariance(config.multiplicative, grid);
  RandomStream n_rng(config.data_seed, Stream::multiplicative);
  Vector nvals(n);
  sample_multiplicative(config.multiplicative, n_cov, n_rng, nvals);
  const GridField mult(grid, nvals);
  const GridField eta = sample_additive(add, grid, config.data_seed);
  const GridField observed(grid, nvals.cwiseProduct(blurred.values()) + eta.values());

  ExperimentOutcome out{truth, blurred, mult, eta, observed, add.sigma, {}, {}, {}, {}, json::object()};
  out.diagnostics["kernel_mass"] = op.kernel_mass();
  out.diagnostics["kernel_truncation_error"] = op.truncation_error();
  out.diagnostics["sigma_eta"] = add.sigma;
  out.diagnostics["negative_multiplicative_fraction"] =
      static_cast<double>((nvals.array() < 0.0).count()) / static_cast<double>(n);
  out.diagnostics["nonpositive_observation_fraction"] =
      static_cast<double>((observed.values().array() <= 0.0).count()) / static_cast<double>(n);

  const PriorModel prior = build_prior(grid, config.c1, config.c2,
                                       GridField::constant(grid, config.prior_mean));

  if (config.method == Method::log_baseline) {
    const LogDomainModel model = lognormal_log_model(config.multiplicative.variance(), prior);
    try {
      const LogMapResult r = log_transform_map(op, observed, model);
      out.map = r.map;
      out.diagnostics["log_iterations"] = r.iterations;
      out.diagnostics["log_gradient_norm"] = r.gradient_norm;
    } catch (const MethodFailure &e) {
      out.failure = e.kind();
      out.failure_message = e.what();
    }
    return out;
  }

  const CovarianceModel eta_cov = additive_covariance(add, grid);
  ErrorStatistics stats = [&] {
    if (config.method == Method::bae_conditional) {
      const Matrix root = prior.unwhiten(Matrix(Matrix::Identity(n, n)));
      const Matrix eta_x = config.eta_x_correlation * add.sigma * root;
      return conditional_error_stats(eta_cov, n_cov, op, prior, eta_x);
    }
    return marginal_error_stats(eta_cov, n_cov, op, prior);
  }();
  out.diagnostics["error_covariance"] = covariance_facts(stats.cov);

  const LinearGaussianPosterior posterior(op, stats, prior);
  const GridField map = posterior.map(observed);
  const CovarianceModel post_cov = posterior.covariance();
  out.map = map;
  out.summary = summarize(map, post_cov, config.band_factor, &truth);
  out.diagnostics["posterior_covariance"] = covariance_facts(post_cov);
  return out;
}

std::filesystem::path resolve_output_dir(const ExperimentConfig &config) {
  std::filesystem::path dir(config.output_dir);
  if (const char *root = std::getenv("BAE_OUTPUT_ROOT"); root && *root && dir.is_relative())
    return std::filesystem::path(root) / dir;
  return dir;
}

RunResult run_experiment(const ExperimentConfig &config, const std::filesystem::path &directory) {
  const auto start = std::chrono::steady_clock::now();
  validate(config);
  std::error_code ec;
  std::filesystem::create_directories(directory, ec);
  if (ec)
    throw Error("cannot create output directory " + directory.string() + ": " + ec.message());

  ExperimentOutcome outcome = simulate_and_reconstruct(config);

  std::vector<std::string> files;
  const auto emit_field = [&](const std::string &stem, const GridField &f) {
    write_field_csv(directory / (stem + ".csv"), f);
    write_field_pgm(directory / (stem + ".pgm"), f);
    files.push_back(stem + ".csv");
    files.push_back(stem + ".pgm");
    files.push_back(stem + ".pgm.scale.txt");
  };
  emit_field("truth", outcome.truth);
  emit_field("blurred", outcome.blurred);
  emit_field("multiplicative_noise", outcome.multiplicative);
  emit_field("observed", outcome.observed);

  const int row = config.section_row();
  if (outcome.map) {
    emit_field("map", *outcome.map);
    const GridField *std_field = outcome.summary ? &outcome.summary->pointwise_std : nullptr;
    if (std_field)
      emit_field("pointwise_std", *std_field);
    write_summary_csv(directory / "summary.csv", *outcome.map, std_field);
    files.push_back("summary.csv");
    write_cross_section_csv(directory / "cross_section.csv", outcome.truth, *outcome.map,
                            outcome.summary ? &outcome.summary->band : nullptr, row);
    files.push_back("cross_section.csv");
  }

  json m = json::object();
  int exit_code = kExitOk;
  m["config"] = to_json(config);
  m["seeds"] = {{"data", config.data_seed}, {"validation", config.validation_seed}};
  m["method"] = to_string(config.method);
  m["multiplicative_noise"] = to_json(config.multiplicative);
  m["negative_probability"] = negative_probability(config.multiplicative);
  m["cross_section_row"] = row;
  m["diagnostics"] = outcome.diagnostics;
  if (outcome.failure) {
    m["status"] = "failed";
    m["failure"] = *outcome.failure;
    m["failure_message"] = outcome.failure_message;
    exit_code = kExitMethodFailure;
  } else {
    m["status"] = "ok";
  }
  if (outcome.summary) {
    m["coverage"] = *outcome.summary->coverage;
    m["mean_pointwise_std"] = outcome.summary->mean_std();
    m["band_factor"] = outcome.summary->band_halfwidth_factor;
  }
  if (outcome.map) {
    const Vector diff = outcome.map->values() - outcome.truth.values();
    m["relative_reconstruction_error"] = diff.norm() / outcome.truth.values().norm();
  }
  json listed = json::array();
  for (const auto &f : files)
    listed.push_back({{"path", f}, {"sha256", file_sha256(directory / f)}});
  m["files"] = listed;
  m["exit_code"] = exit_code;
  m["wall_clock_seconds"] =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  write_text(directory / "manifest.json", m.dump(2) + "\n");

  return RunResult{directory, std::move(m), exit_code, std::move(outcome)};
}

bool ValidationReport::pass() const {
  return std::all_of(metrics.begin(), metrics.end(),
                     [](const Metric &m) { return !m.asserted || m.pass; });
}

json ValidationReport::to_json() const {
  json arr = json::array();
  for (const auto &mt : metrics)
    arr.push_back({{"metric", mt.name},
                   {"value", mt.value},
                   {"threshold", mt.threshold},
                   {"asserted", mt.asserted},
                   {"pass", mt.pass}});
  return {{"metrics", arr}, {"pass", pass()}, {"details", details}};
}

std::string ValidationReport::to_text() const {
  std::ostringstream os;
  for (const auto &mt : metrics) {
    char line[256];
    std::snprintf(line, sizeof line, "%-36s value=%-12.6g threshold=%-10.4g %s\n", mt.name.c_str(),
                  mt.value, mt.threshold,
                  !mt.asserted ? "REPORT" : (mt.pass ? "PASS" : "FAIL"));
    os << line;
  }
  os << (pass() ? "overall PASS\n" : "overall FAIL\n");
  return os.str();
}

Grid validation_grid(const ExperimentConfig &config) {
  return Grid(config.validation_nx, config.validation_ny,
              config.nx * config.hx / config.validation_nx,
              config.ny * config.hy / config.validation_ny);
}

ValidationReport validate_covariance(const ExperimentConfig &config, int samples) {
  validate(config);
  if (samples < 10000)
    throw InvalidArgument("validate: at least 10000 samples required");
  const Grid grid = validation_grid(config);

  const ForwardOperator op(grid, config.kappa, config.truncation_factor);
  const GridField blurred = op.apply(make_phantom(grid, config.phantom));
  const AdditiveNoiseSpec add = calibrate_additive_sigma(blurred, config.additive_fraction);
  const PriorModel prior = build_prior(grid, config.c1, config.c2,
                                       GridField::constant(grid, config.prior_mean));

  const ErrorStatistics stats = marginal_error_stats(
      additive_covariance(add, grid), mult_covariance(config.multiplicative, grid), op, prior);
  const Matrix reference = stats.cov.matrix();

  const Matrix e = simulate_errors(op, prior, config.multiplicative, add, config.validation_seed,
                                   samples);
  const CovarianceComparison cmp = compare_covariance(e, reference);

  const double sqrt_n = std::sqrt(static_cast<double>(samples));
  const Vector z = (cmp.empirical_mean - stats.mean).cwiseQuotient(reference.diagonal().cwiseSqrt()) * sqrt_n;
  const Matrix white = stats.cov.whiten(Matrix((e.rowwise() - stats.mean.transpose()).transpose()));
  const Vector white_var = white.rowwise().squaredNorm() / static_cast<double>(samples);

  ValidationReport report;
  report.metrics.push_back({"covariance_rel_frobenius", cmp.rel_frobenius, 0.05,
                            cmp.rel_frobenius < 0.05, true});
  report.metrics.push_back({"covariance_rel_frobenius_diagonal", cmp.rel_frobenius_diagonal, 0.05,
                            cmp.rel_frobenius_diagonal < 0.05, false});
  report.metrics.push_back({"covariance_rel_frobenius_offdiagonal",
                            cmp.rel_frobenius_offdiagonal, 0.05,
                            cmp.rel_frobenius_offdiagonal < 0.05, false});
  const double zmax = z.cwiseAbs().maxCoeff();
  report.metrics.push_back({"mean_max_standard_errors", zmax, 5.0, zmax < 5.0, true});
  const double wmin = white_var.minCoeff();
  const double wmax = white_var.maxCoeff();
  report.metrics.push_back({"whitened_variance_min", wmin, 0.9, wmin >= 0.9, true});
  report.metrics.push_back({"whitened_variance_max", wmax, 1.1, wmax <= 1.1, true});

  report.details = {{"grid", {{"nx", grid.nx()}, {"ny", grid.ny()}, {"hx", grid.hx()}, {"hy", grid.hy()}}},
                    {"samples", samples},
                    {"seed", config.validation_seed},
                    {"multiplicative_noise", to_json(config.multiplicative)},
                    {"sigma_eta", add.sigma},
                    {"reference_trace", reference.trace()},
                    {"empirical_trace", cmp.empirical_cov.trace()}};
  return report;
}

json SweepReport::to_json() const {
  json arr = json::array();
  for (const auto &e : entries)
    arr.push_back({{"length", e.length}, {"mean_pointwise_std", e.mean_std}, {"coverage", e.coverage}});
  return {{"entries", arr}, {"ordering_holds", ordering_holds}};
}

SweepReport sweep_correlation(const ExperimentConfig &config, const std::vector<double> &lengths,
                              const std::optional<std::filesystem::path> &directory) {
  validate(config);
  if (lengths.size() < 2)
    throw InvalidArgument("sweep: at least two correlation lengths required");
  if (config.method == Method::log_baseline)
    throw ConfigError("method: sweep needs a Gaussian posterior (bae or bae-conditional)");
  std::vector<double> sorted = lengths;
  std::stable_sort(sorted.begin(), sorted.end());

  SweepReport report;
  for (std::size_t k = 0; k < sorted.size(); ++k) {
    ExperimentConfig c = config;
    c.multiplicative =
        MultiplicativeNoiseSpec::correlated_normal(config.multiplicative.stddev(), sorted[k]);
    const ExperimentOutcome outcome = [&] {
      if (!directory)
        return simulate_and_reconstruct(c);
      char name[64];
      std::snprintf(name, sizeof name, "length_%02zu_%g", k, sorted[k]);
      return run_experiment(c, *directory / name).outcome;
    }();
    report.entries.push_back({sorted[k], outcome.summary->mean_std(), *outcome.summary->coverage});
  }
  for (std::size_t k = 1; k < report.entries.size(); ++k)
    if (report.entries[k].mean_std < report.entries[k - 1].mean_std * (1.0 - 1e-12))
      report.ordering_holds = false;
  return report;
}

} // namespace bae
