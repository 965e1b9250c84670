#include "bae/config.hpp"
#include "bae/field_io.hpp"
#include "bae/forward.hpp"
#include "bae/prior.hpp"

#include <doctest.h>

#include <filesystem>

using namespace bae;
namespace fs = std::filesystem;

namespace {
fs::path scratch(const std::string &name) {
  const fs::path dir = fs::temp_directory_path() / "bae_unit" / name;
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}
} // namespace

TEST_CASE("field CSV layout and round trip") {
  const Grid g(3, 2);
  Vector v(6);
  v << 0.1, -0.0, 1e-300, 2.0 / 3.0, -5.0, 1e20;
  const GridField f(g, v);
  const std::string csv = field_to_csv(f);
  CHECK(csv.rfind("0.10000000000000001,0,1e-300\n", 0) == 0);
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 2);

  const auto dir = scratch("csv");
  write_field_csv(dir / "f.csv", f);
  const GridField back = read_field_csv(dir / "f.csv");
  CHECK(back.grid() == g);
  CHECK(back.values() == v);

  write_text(dir / "bad.csv", "1,2\n3\n");
  CHECK_THROWS_AS(read_field_csv(dir / "bad.csv"), InvalidArgument);
  write_text(dir / "nan.csv", "1,x\n3,4\n");
  CHECK_THROWS_AS(read_field_csv(dir / "nan.csv"), InvalidArgument);
}

TEST_CASE("PGM raster: header, orientation, scale sidecar") {
  const Grid g(3, 2);
  Vector v(6);
  v << 0, 1, 2, 3, 4, 6; // row j = 0 then j = 1
  const auto dir = scratch("pgm");
  const auto scale = write_field_pgm(dir / "f.pgm", GridField(g, v));
  CHECK(scale.min == 0.0);
  CHECK(scale.max == 6.0);
  const std::string bytes = read_text(dir / "f.pgm");
  const std::string header = "P5\n3 2\n255\n";
  REQUIRE(bytes.size() == header.size() + 6);
  CHECK(bytes.substr(0, header.size()) == header);
  const auto px = [&](int k) { return static_cast<unsigned char>(bytes[header.size() + k]); };
  // top image row is grid row j = 1
  CHECK(px(0) == 128); // round(255 * 3 / 6)
  CHECK(px(2) == 255);
  CHECK(px(3) == 0);
  const std::string side = read_text(dir / "f.pgm.scale.txt");
  CHECK(side.find("min 0\n") != std::string::npos);
  CHECK(side.find("max 6\n") != std::string::npos);
}

TEST_CASE("phantom cross section matches the raster read back") {
  const Grid g(50, 50);
  const GridField x = make_phantom(g, default_phantom());
  const auto dir = scratch("phantom");
  write_field_pgm(dir / "x.pgm", x);
  const std::string bytes = read_text(dir / "x.pgm");
  const std::size_t offset = std::string("P5\n50 50\n255\n").size();
  const auto row = cross_section(x, 25);
  for (int i = 0; i < 50; ++i) {
    const auto b = static_cast<unsigned char>(bytes[offset + (49 - 25) * 50 + i]);
    CHECK(b / 255.0 * 2.0 - 1.0 == doctest::Approx(row[i]).epsilon(1e-2).scale(1.0));
  }
}

TEST_CASE("summary and cross-section tables") {
  const Grid g(2, 2);
  const GridField map(g, Vector::LinSpaced(4, 0, 3));
  const GridField sd(g, Vector::Constant(4, 0.5));
  const auto dir = scratch("tables");
  write_summary_csv(dir / "s.csv", map, &sd);
  CHECK(read_text(dir / "s.csv") == "index,i,j,map,std\n0,0,0,0,0.5\n1,1,0,1,0.5\n2,0,1,2,0.5\n3,1,1,3,0.5\n");
  write_summary_csv(dir / "n.csv", map, nullptr);
  CHECK(read_text(dir / "n.csv").find("3,1,1,3,\n") != std::string::npos);

  const CredibleBand band{GridField(g, map.values().array() - 1.0), GridField(g, map.values().array() + 1.0)};
  write_cross_section_csv(dir / "c.csv", GridField::constant(g, 7.0), map, &band, 1);
  CHECK(read_text(dir / "c.csv") == "i,truth,map,lower,upper\n0,7,2,1,3\n1,7,3,2,4\n");
}

TEST_CASE("coordinate export and digests") {
  const auto dir = scratch("coord");
  const auto fem = assemble_mass_stiffness(Grid(2, 2));
  write_coordinate(dir / "m.txt", fem.mass);
  const std::string txt = read_text(dir / "m.txt");
  CHECK(std::count(txt.begin(), txt.end(), '\n') == 16);
  CHECK(txt.rfind("0 0 0.1111111111111111", 0) == 0);
  write_coordinate(dir / "a.txt", ForwardOperator(Grid(3, 3), 0.5).dense());

  write_text(dir / "abc.txt", "abc");
  CHECK(file_sha256(dir / "abc.txt") ==
        "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
  CHECK_THROWS_AS(file_sha256(dir / "missing"), Error);
}

TEST_CASE("config defaults are the reference experiment") {
  const ExperimentConfig c = config_from_json(nlohmann::json::object());
  CHECK(c.nx == 50);
  CHECK(c.ny == 50);
  CHECK(c.kappa == 5.0);
  CHECK(c.c1 == 0.1);
  CHECK(c.c2 == 20.0);
  CHECK(c.multiplicative == MultiplicativeNoiseSpec::gamma(1.0));
  CHECK(c.additive_fraction == 0.01);
  CHECK(c.band_factor == 3.0);
  CHECK(c.method == Method::bae);
  CHECK(c.section_row() == 25);
}

TEST_CASE("config round trip") {
  ExperimentConfig c;
  c.nx = 16;
  c.ny = 12;
  c.hx = 0.5;
  c.phantom.background = 0.25;
  c.phantom.blocks.push_back({0.1, 0.2, 0.3, 0.4, 7.0});
  c.multiplicative = MultiplicativeNoiseSpec::correlated_normal(0.8, 3.5);
  c.method = Method::bae_conditional;
  c.eta_x_correlation = -0.3;
  c.cross_section_row = 3;
  c.data_seed = 0xFFFFFFFFFFFFull;
  c.validation_nx = 6;
  CHECK(config_from_json(to_json(c)) == c);
  CHECK(config_from_json(nlohmann::json::parse(to_json(c).dump())) == c);

  for (const auto &spec : {MultiplicativeNoiseSpec::gamma(2.5), MultiplicativeNoiseSpec::normal(0.3),
                           MultiplicativeNoiseSpec::uniform(1.1)})
    CHECK(noise_from_json(to_json(spec)) == spec);
  for (auto m : {Method::bae, Method::bae_conditional, Method::log_baseline})
    CHECK(method_from_string(to_string(m)) == m);
}

TEST_CASE("config errors name the field") {
  const auto message = [](const char *text) -> std::string {
    try {
      config_from_json(nlohmann::json::parse(text));
    } catch (const ConfigError &e) {
      return e.what();
    }
    return "";
  };
  CHECK(message(R"({"grid": {"nx": 1}})").find("grid.nx") != std::string::npos);
  CHECK(message(R"({"grid": {"nx": "ten"}})").find("grid.nx") != std::string::npos);
  CHECK(message(R"({"grid": {"nz": 5}})").find("grid.nz: unknown key") != std::string::npos);
  CHECK(message(R"({"kernel": {"kappa": -1}})").find("kernel.kappa") != std::string::npos);
  CHECK(message(R"({"prior": {"c2": 0}})").find("prior.c2") != std::string::npos);
  CHECK(message(R"({"multiplicative_noise": {"law": "rayleigh"}})").find("multiplicative_noise.law") !=
        std::string::npos);
  CHECK(message(R"({"multiplicative_noise": {"law": "gamma", "shape": 0}})").find("multiplicative_noise") !=
        std::string::npos);
  CHECK(message(R"({"method": "tv"})").find("method") != std::string::npos);
  CHECK(message(R"({"grid": {"nx": 80, "ny": 80}})").find("4096") != std::string::npos);
  CHECK(message(R"({"cross_section_row": 50})").find("cross_section_row") != std::string::npos);
  CHECK(message(R"({"phantom": {"blocks": [{"x0": 0.5, "x1": 0.2}]}})").find("phantom.blocks[0]") !=
        std::string::npos);
  CHECK(message(R"({"eta_x_correlation": 2})").find("eta_x_correlation") != std::string::npos);
  CHECK(message(R"({"additive_fraction": 0})").find("additive_fraction") != std::string::npos);
  CHECK(message(R"({"typo": 1})").find("typo: unknown key") != std::string::npos);
}

TEST_CASE("load_config reads files with comments") {
  const auto dir = scratch("cfg");
  write_text(dir / "c.json", "{\n  // coarse run\n  \"grid\": {\"nx\": 10, \"ny\": 10}\n}\n");
  CHECK(load_config((dir / "c.json").string()).nx == 10);
  CHECK_THROWS_AS(load_config((dir / "none.json").string()), ConfigError);
  write_text(dir / "broken.json", "{\"grid\": ");
  CHECK_THROWS_AS(load_config((dir / "broken.json").string()), ConfigError);
}
