#include "bae/config.hpp"

#include <cmath>
#include <fstream>
#include <set>
#include <variant>

namespace bae {

using nlohmann::json;

std::string to_string(Method m) {
  switch (m) {
  case Method::bae:
    return "bae";
  case Method::bae_conditional:
    return "bae-conditional";
  case Method::log_baseline:
    return "log-baseline";
  }
  return "bae";
}

Method method_from_string(const std::string &s) {
  if (s == "bae")
    return Method::bae;
  if (s == "bae-conditional")
    return Method::bae_conditional;
  if (s == "log-baseline")
    return Method::log_baseline;
  throw ConfigError("method: unknown method '" + s +
                    "' (expected bae, bae-conditional or log-baseline)");
}

namespace {

/// Reads typed fields from one JSON object, reporting errors with the dotted
/// path of the field, and rejecting keys that were never read.
class Section {
public:
  Section(const json &j, std::string path) : j_(j), path_(std::move(path)) {
    if (!j_.is_object())
      throw ConfigError(label() + ": expected an object");
  }

  template <class T> void read(const char *key, T &out) {
    seen_.insert(key);
    if (!j_.contains(key))
      return;
    try {
      out = j_.at(key).get<T>();
    } catch (const json::exception &) {
      throw ConfigError(field(key) + ": wrong type");
    }
  }

  bool has(const char *key) const { return j_.contains(key); }
  const json &at(const char *key) {
    seen_.insert(key);
    return j_.at(key);
  }

  std::string field(const char *key) const { return path_.empty() ? key : path_ + "." + key; }

  void finish() const {
    for (const auto &[k, v] : j_.items())
      if (!seen_.count(k))
        throw ConfigError(field(k.c_str()) + ": unknown key");
  }

private:
  std::string label() const { return path_.empty() ? "config" : path_; }

  const json &j_;
  std::string path_;
  std::set<std::string> seen_;
};

void require(bool ok, const std::string &field, const std::string &what) {
  if (!ok)
    throw ConfigError(field + ": " + what);
}

} // namespace

json to_json(const MultiplicativeNoiseSpec &spec) {
  return std::visit(
      [](const auto &law) -> json {
        using T = std::decay_t<decltype(law)>;
        if constexpr (std::is_same_v<T, GammaLaw>)
          return {{"law", "gamma"}, {"shape", law.shape}};
        else if constexpr (std::is_same_v<T, NormalLaw>)
          return {{"law", "normal"}, {"sigma", law.sigma}};
        else if constexpr (std::is_same_v<T, UniformLaw>)
          return {{"law", "uniform"}, {"half_width", law.half_width}};
        else
          return {{"law", "correlated_normal"}, {"sigma", law.sigma}, {"length", law.length}};
      },
      spec.law());
}

MultiplicativeNoiseSpec noise_from_json(const json &j) {
  Section s(j, "multiplicative_noise");
  std::string law;
  s.read("law", law);
  try {
    if (law == "gamma") {
      double shape = 1.0;
      s.read("shape", shape);
      s.finish();
      return MultiplicativeNoiseSpec::gamma(shape);
    }
    if (law == "normal") {
      double sigma = 1.0;
      s.read("sigma", sigma);
      s.finish();
      return MultiplicativeNoiseSpec::normal(sigma);
    }
    if (law == "uniform") {
      double nu = std::sqrt(3.0);
      s.read("half_width", nu);
      s.finish();
      return MultiplicativeNoiseSpec::uniform(nu);
    }
    if (law == "correlated_normal") {
      double sigma = 1.0, length = 5.0;
      s.read("sigma", sigma);
      s.read("length", length);
      s.finish();
      return MultiplicativeNoiseSpec::correlated_normal(sigma, length);
    }
  } catch (const InvalidArgument &e) {
    throw ConfigError(std::string("multiplicative_noise: ") + e.what());
  }
  throw ConfigError("multiplicative_noise.law: unknown law '" + law +
                    "' (expected gamma, normal, uniform or correlated_normal)");
}

json to_json(const ExperimentConfig &c) {
  json blocks = json::array();
  for (const auto &b : c.phantom.blocks)
    blocks.push_back({{"x0", b.x0}, {"y0", b.y0}, {"x1", b.x1}, {"y1", b.y1}, {"value", b.value}});
  json j = {
      {"grid", {{"nx", c.nx}, {"ny", c.ny}, {"hx", c.hx}, {"hy", c.hy}}},
      {"phantom", {{"background", c.phantom.background}, {"blocks", blocks}}},
      {"kernel", {{"kappa", c.kappa}, {"truncation_factor", c.truncation_factor}}},
      {"prior", {{"c1", c.c1}, {"c2", c.c2}, {"mean", c.prior_mean}}},
      {"multiplicative_noise", to_json(c.multiplicative)},
      {"additive_fraction", c.additive_fraction},
      {"band_factor", c.band_factor},
      {"seeds", {{"data", c.data_seed}, {"validation", c.validation_seed}}},
      {"output_dir", c.output_dir},
      {"method", to_string(c.method)},
      {"eta_x_correlation", c.eta_x_correlation},
      {"validation_grid", {{"nx", c.validation_nx}, {"ny", c.validation_ny}}},
  };
  if (c.cross_section_row)
    j["cross_section_row"] = *c.cross_section_row;
  return j;
}

ExperimentConfig config_from_json(const json &j) {
  ExperimentConfig c;
  Section root(j, "");
  if (root.has("grid")) {
    Section s(root.at("grid"), "grid");
    s.read("nx", c.nx);
    s.read("ny", c.ny);
    s.read("hx", c.hx);
    s.read("hy", c.hy);
    s.finish();
  }
  if (root.has("phantom")) {
    Section s(root.at("phantom"), "phantom");
    s.read("background", c.phantom.background);
    if (s.has("blocks")) {
      const json &arr = s.at("blocks");
      require(arr.is_array(), "phantom.blocks", "expected an array");
      c.phantom.blocks.clear();
      for (std::size_t k = 0; k < arr.size(); ++k) {
        Section b(arr[k], "phantom.blocks[" + std::to_string(k) + "]");
        PhantomBlock blk{0, 0, 1, 1, 1};
        b.read("x0", blk.x0);
        b.read("y0", blk.y0);
        b.read("x1", blk.x1);
        b.read("y1", blk.y1);
        b.read("value", blk.value);
        b.finish();
        c.phantom.blocks.push_back(blk);
      }
    }
    s.finish();
  }
  if (root.has("kernel")) {
    Section s(root.at("kernel"), "kernel");
    s.read("kappa", c.kappa);
    s.read("truncation_factor", c.truncation_factor);
    s.finish();
  }
  if (root.has("prior")) {
    Section s(root.at("prior"), "prior");
    s.read("c1", c.c1);
    s.read("c2", c.c2);
    s.read("mean", c.prior_mean);
    s.finish();
  }
  if (root.has("multiplicative_noise"))
    c.multiplicative = noise_from_json(root.at("multiplicative_noise"));
  root.read("additive_fraction", c.additive_fraction);
  root.read("band_factor", c.band_factor);
  if (root.has("seeds")) {
    Section s(root.at("seeds"), "seeds");
    s.read("data", c.data_seed);
    s.read("validation", c.validation_seed);
    s.finish();
  }
  root.read("output_dir", c.output_dir);
  if (root.has("method")) {
    std::string m;
    root.read("method", m);
    c.method = method_from_string(m);
  }
  if (root.has("cross_section_row")) {
    int row = 0;
    root.read("cross_section_row", row);
    c.cross_section_row = row;
  }
  root.read("eta_x_correlation", c.eta_x_correlation);
  if (root.has("validation_grid")) {
    Section s(root.at("validation_grid"), "validation_grid");
    s.read("nx", c.validation_nx);
    s.read("ny", c.validation_ny);
    s.finish();
  }
  root.finish();
  validate(c);
  return c;
}

void validate(const ExperimentConfig &c) {
  require(c.nx >= 2, "grid.nx", "must be at least 2");
  require(c.ny >= 2, "grid.ny", "must be at least 2");
  require(c.hx > 0.0 && std::isfinite(c.hx), "grid.hx", "must be positive");
  require(c.hy > 0.0 && std::isfinite(c.hy), "grid.hy", "must be positive");
  require(static_cast<std::size_t>(c.nx) * c.ny <= 4096, "grid",
          "at most 4096 nodes (dense posterior)");
  for (std::size_t k = 0; k < c.phantom.blocks.size(); ++k) {
    const auto &b = c.phantom.blocks[k];
    require(b.x0 >= 0.0 && b.x0 < b.x1 && b.x1 <= 1.0 && b.y0 >= 0.0 && b.y0 < b.y1 && b.y1 <= 1.0,
            "phantom.blocks[" + std::to_string(k) + "]",
            "needs 0 <= x0 < x1 <= 1 and 0 <= y0 < y1 <= 1");
  }
  require(c.kappa > 0.0 && std::isfinite(c.kappa), "kernel.kappa", "must be positive");
  require(c.truncation_factor > 0.0, "kernel.truncation_factor", "must be positive");
  require(c.c1 > 0.0 && std::isfinite(c.c1), "prior.c1", "must be positive");
  require(c.c2 > 0.0 && std::isfinite(c.c2), "prior.c2", "must be positive");
  require(std::isfinite(c.prior_mean), "prior.mean", "must be finite");
  require(c.additive_fraction > 0.0 && std::isfinite(c.additive_fraction), "additive_fraction",
          "must be positive");
  require(c.band_factor > 0.0 && std::isfinite(c.band_factor), "band_factor", "must be positive");
  require(!c.output_dir.empty(), "output_dir", "must not be empty");
  if (c.cross_section_row)
    require(*c.cross_section_row >= 0 && *c.cross_section_row < c.ny, "cross_section_row",
            "must lie in [0, ny)");
  require(std::abs(c.eta_x_correlation) <= 1.0, "eta_x_correlation", "must lie in [-1, 1]");
  require(c.validation_nx >= 2 && c.validation_ny >= 2, "validation_grid",
          "nx and ny must be at least 2");
  require(static_cast<std::size_t>(c.validation_nx) * c.validation_ny <= 4096, "validation_grid",
          "at most 4096 nodes");
}

ExperimentConfig load_config(const std::string &path) {
  std::ifstream in(path);
  if (!in)
    throw ConfigError("cannot open config file " + path);
  json j;
  try {
    j = json::parse(in, nullptr, true, true);
  } catch (const json::parse_error &e) {
    throw ConfigError("config " + path + ": " + e.what());
  }
  return config_from_json(j);
}

} // namespace bae
