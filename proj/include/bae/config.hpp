#pragma once

#include "bae/grid.hpp"
#include "bae/noise.hpp"

#include <json.hpp>

#include <cstdint>
#include <optional>
#include <string>

namespace bae {

enum class Method { bae, bae_conditional, log_baseline };

std::string to_string(Method m);
Method method_from_string(const std::string &s);

/// Everything that defines one reproducible experiment. Serialized as JSON.
struct ExperimentConfig {
  int nx = 50;
  int ny = 50;
  double hx = 1.0;
  double hy = 1.0;
  PhantomSpec phantom = default_phantom();
  double kappa = 5.0;
  double truncation_factor = 4.0;
  double c1 = 0.1;
  double c2 = 20.0;
  double prior_mean = 0.0;
  MultiplicativeNoiseSpec multiplicative = MultiplicativeNoiseSpec::gamma(1.0);
  double additive_fraction = 0.01;
  double band_factor = 3.0;
  std::uint64_t data_seed = 20180101;
  std::uint64_t validation_seed = 20180102;
  std::string output_dir = "output";
  Method method = Method::bae;
  /// Cross-section row; defaults to ny / 2.
  std::optional<int> cross_section_row;
  /// rho in Gamma_etax = rho sigma_eta L_x^{-1}; |rho| <= 1 keeps the joint
  /// covariance of (x, eta) PSD. Only used by bae-conditional.
  double eta_x_correlation = 0.0;
  /// Down-scaled grid for covariance validation (same physical domain).
  int validation_nx = 8;
  int validation_ny = 8;

  int section_row() const { return cross_section_row.value_or(ny / 2); }
  Grid grid() const { return Grid(nx, ny, hx, hy); }

  bool operator==(const ExperimentConfig &) const = default;
};

/// Throws ConfigError naming the offending field.
void validate(const ExperimentConfig &config);

nlohmann::json to_json(const ExperimentConfig &config);
/// Missing keys take their defaults; unknown keys are rejected.
ExperimentConfig config_from_json(const nlohmann::json &j);
ExperimentConfig load_config(const std::string &path);

nlohmann::json to_json(const MultiplicativeNoiseSpec &spec);
MultiplicativeNoiseSpec noise_from_json(const nlohmann::json &j);

} // namespace bae
