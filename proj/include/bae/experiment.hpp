#pragma once

#include "bae/config.hpp"
#include "bae/forward.hpp"
#include "bae/inference.hpp"
#include "bae/prior.hpp"

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace bae {

/// Exit codes shared by the CLI and the manifest.
enum ExitCode : int {
  kExitOk = 0,
  kExitIo = 1,
  kExitConfig = 2,
  kExitMethodFailure = 3,
  kExitNumerical = 4,
  kExitCheckFailed = 5,
};

/// In-memory result of one simulate-and-reconstruct pass.
struct ExperimentOutcome {
  GridField truth;
  GridField blurred;
  GridField multiplicative;
  GridField additive;
  GridField observed;
  double sigma_eta = 0.0;

  /// Empty when the method failed; `failure` then holds the failure kind.
  std::optional<GridField> map;
  /// Posterior summary; only for the Gaussian (bae*) methods.
  std::optional<PosteriorSummary> summary;
  std::optional<std::string> failure;
  std::string failure_message;

  nlohmann::json diagnostics; ///< error-statistics and solver facts
};

/// Builds the data from the configuration and reconstructs with the configured
/// method. Documented method failures are captured, not thrown.
ExperimentOutcome simulate_and_reconstruct(const ExperimentConfig &config);

struct RunResult {
  std::filesystem::path directory;
  nlohmann::json manifest;
  int exit_code = kExitOk;
  ExperimentOutcome outcome;
};

/// Resolves the output directory: BAE_OUTPUT_ROOT (when set) prefixes a
/// relative config.output_dir.
std::filesystem::path resolve_output_dir(const ExperimentConfig &config);

/// Runs the pipeline and writes fields (CSV + PGM), the posterior summary,
/// the cross section and manifest.json into `directory`.
RunResult run_experiment(const ExperimentConfig &config, const std::filesystem::path &directory);

struct Metric {
  std::string name;
  double value = 0.0;
  double threshold = 0.0;
  bool pass = true;
  bool asserted = true; ///< false for report-only metrics
};

struct ValidationReport {
  std::vector<Metric> metrics;
  nlohmann::json details;

  bool pass() const;
  nlohmann::json to_json() const;
  std::string to_text() const;
};

/// Down-scaled grid used by validation: validation_nx x validation_ny nodes
/// covering the same physical domain as the experiment grid.
Grid validation_grid(const ExperimentConfig &config);

/// Monte Carlo check of Gamma_ee = Gamma_etaeta + Gamma_nn ⊙ A Gamma_xx A^T
/// on the down-scaled grid, with `samples` simulated errors.
ValidationReport validate_covariance(const ExperimentConfig &config, int samples);

struct SweepEntry {
  double length = 0.0;
  double mean_std = 0.0;
  double coverage = 0.0;
};

struct SweepReport {
  std::vector<SweepEntry> entries; ///< sorted by increasing length
  bool ordering_holds = true;
  nlohmann::json to_json() const;
};

/// Correlated normal multiplicative noise (variance matched to the
/// configured law) at each length, all runs sharing the configured seeds.
/// When `directory` is given each run's artifacts go to a subdirectory.
SweepReport sweep_correlation(const ExperimentConfig &config, const std::vector<double> &lengths,
                              const std::optional<std::filesystem::path> &directory = std::nullopt);

} // namespace bae
