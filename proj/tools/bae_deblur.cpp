// Command-line driver: run / validate / sweep / render.

#include "bae/experiment.hpp"
#include "bae/field_io.hpp"

#include <CLI11.hpp>

#include <cstdio>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

namespace fs = std::filesystem;

namespace {

fs::path output_dir(const bae::ExperimentConfig &config, const std::string &override_dir) {
  return override_dir.empty() ? bae::resolve_output_dir(config) : fs::path(override_dir);
}

int cmd_run(const std::string &config_path, const std::string &out) {
  const auto config = bae::load_config(config_path);
  const auto result = bae::run_experiment(config, output_dir(config, out));
  const auto &m = result.manifest;
  std::cout << "method   " << m["method"].get<std::string>() << "\n"
            << "status   " << m["status"].get<std::string>() << "\n";
  if (m.contains("failure"))
    std::cout << "failure  " << m["failure"].get<std::string>() << ": "
              << m["failure_message"].get<std::string>() << "\n";
  if (m.contains("coverage"))
    std::cout << "coverage " << m["coverage"].get<double>() << "\n"
              << "mean std " << m["mean_pointwise_std"].get<double>() << "\n";
  std::cout << "manifest " << (result.directory / "manifest.json").string() << "\n";
  return result.exit_code;
}

int cmd_validate(const std::string &config_path, int samples, const std::string &out) {
  const auto config = bae::load_config(config_path);
  const auto report = bae::validate_covariance(config, samples);
  std::cout << report.to_text();
  const fs::path dir = output_dir(config, out);
  fs::create_directories(dir);
  bae::write_text(dir / "validation_report.json", report.to_json().dump(2) + "\n");
  return report.pass() ? bae::kExitOk : bae::kExitCheckFailed;
}

int cmd_sweep(const std::string &config_path, const std::vector<double> &lengths,
              const std::string &out) {
  const auto config = bae::load_config(config_path);
  const fs::path dir = output_dir(config, out);
  const auto report = bae::sweep_correlation(config, lengths, dir);
  for (const auto &e : report.entries)
    std::printf("length %-8g mean_std %-12.6g coverage %.4f\n", e.length, e.mean_std, e.coverage);
  std::printf("ordering %s\n", report.ordering_holds ? "PASS" : "FAIL");
  bae::write_text(dir / "sweep_report.json", report.to_json().dump(2) + "\n");
  return report.ordering_holds ? bae::kExitOk : bae::kExitCheckFailed;
}

int cmd_render(const std::string &csv, const std::string &image) {
  const auto field = bae::read_field_csv(csv);
  const auto scale = bae::write_field_pgm(image, field);
  std::printf("wrote %s (min %.17g, max %.17g)\n", image.c_str(), scale.min, scale.max);
  return bae::kExitOk;
}

} // namespace

int main(int argc, char **argv) {
  CLI::App app{"Deblurring under mixed multiplicative and additive noise with "
               "approximation-error marginalization"};
  app.require_subcommand(1);

  std::string config_path, out, csv, image;
  int samples = 100000;
  std::vector<double> lengths{2.0, 5.0, 10.0};

  auto *run = app.add_subcommand("run", "Simulate data and reconstruct");
  run->add_option("config", config_path, "Experiment configuration (JSON)")->required();
  run->add_option("--out", out, "Output directory (overrides the config)");

  auto *val = app.add_subcommand("validate", "Monte Carlo check of the error covariance");
  val->add_option("config", config_path, "Experiment configuration (JSON)")->required();
  val->add_option("--samples", samples, "Number of simulated errors")->check(CLI::Range(10000, 100000000));
  val->add_option("--out", out, "Output directory (overrides the config)");

  auto *sweep = app.add_subcommand("sweep", "Posterior std versus noise correlation length");
  sweep->add_option("config", config_path, "Experiment configuration (JSON)")->required();
  sweep->add_option("--lengths", lengths, "Correlation lengths")->expected(2, 64);
  sweep->add_option("--out", out, "Output directory (overrides the config)");

  auto *render = app.add_subcommand("render", "Render a field CSV as an 8-bit PGM image");
  render->add_option("field", csv, "Field CSV")->required();
  render->add_option("image", image, "Output image")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError &e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : bae::kExitConfig;
  }

  try {
    if (*run)
      return cmd_run(config_path, out);
    if (*val)
      return cmd_validate(config_path, samples, out);
    if (*sweep)
      return cmd_sweep(config_path, lengths, out);
    if (*render)
      return cmd_render(csv, image);
  } catch (const bae::ConfigError &e) {
    std::cerr << "config error: " << e.what() << "\n";
    return bae::kExitConfig;
  } catch (const bae::InvalidArgument &e) {
    std::cerr << "invalid argument: " << e.what() << "\n";
    return bae::kExitConfig;
  } catch (const bae::MethodFailure &e) {
    std::cerr << e.kind() << ": " << e.what() << "\n";
    return bae::kExitMethodFailure;
  } catch (const bae::NumericalError &e) {
    std::cerr << "numerical failure: " << e.what() << "\n";
    return bae::kExitNumerical;
  } catch (const std::exception &e) {
    std::cerr << "error: " << e.what() << "\n";
    return bae::kExitIo;
  }
  return bae::kExitOk;
}
