#include <unistd.h>

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "doctest.h"
#include "nearfield/cli.hpp"
#include "nearfield/io.hpp"

using namespace nearfield;
namespace fs = std::filesystem;

namespace {

struct Result {
  int code;
  std::string out;
  std::string err;
};

Result run(std::vector<std::string> args) {
  args.insert(args.begin(), "nearfield");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int code = cli::run(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

struct TempDir {
  fs::path path;
  TempDir() {
    path = fs::temp_directory_path() / ("nearfield_test_" + std::to_string(::getpid()) + "_" + std::to_string(counter()++));
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
  static int& counter() {
    static int c = 0;
    return c;
  }
  fs::path write(const std::string& name, const std::string& text) const {
    std::ofstream(path / name) << text;
    return path / name;
  }
};

std::string read(const fs::path& p) {
  std::ifstream in(p);
  std::stringstream s;
  s << in.rdbuf();
  return s.str();
}

std::vector<std::vector<std::string>> csv_rows(const std::string& text) {
  std::vector<std::vector<std::string>> rows;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) break;
    std::vector<std::string> cells;
    std::istringstream l(line);
    std::string cell;
    while (std::getline(l, cell, ',')) cells.push_back(cell);
    rows.push_back(cells);
  }
  return rows;
}

const char* random_model = R"({"model": "random_unitary", "l_max": 3, "seed": 7,
  "channels": [{"label": "a", "k": 1.0}, {"label": "b", "k": 0.55}, {"label": "c", "k": 1.8}]})";

}  // namespace

TEST_CASE("amplitude file round trip is byte identical") {
  TempDir dir;
  const auto cfg = io::parse_config(nlohmann::json::parse(std::string(R"({"amplitude": )") + random_model + "}"));
  const auto data = io::resolve_amplitudes(cfg);
  io::save_amplitudes(data, dir.path / "set.json");
  const auto loaded = io::load_amplitudes(dir.path / "set.json");
  io::save_amplitudes(loaded, dir.path / "again.json");
  CHECK(read(dir.path / "set.json") == read(dir.path / "again.json"));
  REQUIRE(loaded.by_entrance.size() == 3);
  for (std::size_t a = 0; a < 3; ++a)
    for (std::size_t b = 0; b < 3; ++b)
      for (int l = 0; l <= 3; ++l)
        CHECK(loaded.by_entrance.at(a).coefficient(b, l, 0) == data.by_entrance.at(a).coefficient(b, l, 0));

  io::AmplitudeData single{data.channels, {}};
  PartialWaveAmplitude f(3, 0, direction(0.3, 0.2));
  f.set(1, 2, -2, Complex(0.1, 1.0 / 3.0));
  single.by_entrance.emplace(0, f);
  io::save_amplitudes(single, dir.path / "one.json");
  const auto back = io::load_amplitudes(dir.path / "one.json");
  CHECK(back.primary().coefficient(1, 2, -2) == Complex(0.1, 1.0 / 3.0));
  CHECK(back.primary().incident().x == doctest::Approx(f.incident().x).epsilon(1e-16));
  CHECK_THROWS_AS(back.complete_set(), io::DataError);
}

TEST_CASE("malformed amplitude documents") {
  using nlohmann::json;
  const json good = json::parse(R"({"channels": [{"label": "a", "k": 1.0}], "alpha": 0,
    "coefficients": [{"beta": 0, "l": 1, "m": 0, "re": 1.0, "im": 0.0}]})");
  CHECK_NOTHROW(io::amplitude_data_from_json(good));
  auto bad = [&](auto edit) {
    json doc = good;
    edit(doc);
    return doc;
  };
  CHECK_THROWS_AS(io::amplitude_data_from_json(bad([](json& d) { d["channels"][0]["k"] = -1.0; })), io::DataError);
  CHECK_THROWS_AS(io::amplitude_data_from_json(bad([](json& d) { d["alpha"] = 2; })), io::DataError);
  CHECK_THROWS_AS(io::amplitude_data_from_json(bad([](json& d) { d["coefficients"][0]["m"] = 3; })), io::DataError);
  CHECK_THROWS_AS(io::amplitude_data_from_json(bad([](json& d) { d["coefficients"][0]["beta"] = 1; })), io::DataError);
  CHECK_THROWS_AS(io::amplitude_data_from_json(bad([](json& d) { d["coefficients"].push_back(d["coefficients"][0]); })),
                  io::DataError);
  CHECK_THROWS_AS(io::amplitude_data_from_json(bad([](json& d) { d["weight_mode"] = "velocity_ratio"; })),
                  io::DataError);
  CHECK_THROWS_AS(io::amplitude_data_from_json(bad([](json& d) { d.erase("coefficients"); })), io::DataError);
}

TEST_CASE("config parsing") {
  using nlohmann::json;
  const auto cfg = io::parse_config(json::parse(R"({"R": {"min": 1, "max": 100, "points": 3}, "format": "json"})"));
  REQUIRE(cfg.R.size() == 3);
  CHECK(cfg.R[1] == doctest::Approx(10.0));
  CHECK(cfg.R[2] == 100.0);
  CHECK(cfg.format == io::OutputFormat::json);
  CHECK(cfg.tolerances.conservation == 1e-9);
  CHECK(cfg.tolerances.unitarity == 1e-10);
  CHECK(cfg.tolerances.greens == 1e-9);
  CHECK_THROWS_AS(io::parse_config(json::parse(R"({"R": [1, 0.5]})")), io::ConfigError);
  CHECK_THROWS_AS(io::parse_config(json::parse(R"({"R": [0, 1]})")), io::ConfigError);
  CHECK_THROWS_AS(io::parse_config(json::parse(R"({"grid": 3})")), io::ConfigError);
  CHECK_THROWS_AS(io::parse_config(json::parse(R"({"order": 5})")), io::ConfigError);

  std::ostringstream warnings;
  const auto low = io::parse_config(json::parse(R"({"grid_degree": 4})"));
  CHECK(io::effective_grid_degree(low, 6, warnings) == 12);
  CHECK(warnings.str().find("raised") != std::string::npos);
  CHECK(io::effective_grid_degree(io::RunConfig{}, 6, warnings) == 16);
}

TEST_CASE("flux command") {
  TempDir dir;
  const auto cfg = dir.write("single.json", R"({"amplitude": {"model": "single_mode", "k": 2.0, "l": 2, "m": 1,
    "re": 0.5, "im": -1.0}, "R": {"min": 0.2, "max": 50, "points": 5}})");
  const auto r = run({"flux", "--config", cfg.string()});
  REQUIRE(r.code == 0);
  const auto rows = csv_rows(r.out);
  REQUIRE(rows.size() == 6);
  CHECK(rows[0][0] == "R");
  for (std::size_t i = 2; i < rows.size(); ++i) CHECK(rows[i][2] == rows[1][2]);
  CHECK(std::stod(rows[1][2]) == doctest::Approx(1.25).epsilon(1e-14));

  const auto hs = dir.write("hs.json", R"({"amplitude": {"model": "hard_sphere", "k": 1.0, "a": 1.0, "l_max": 6},
    "R": {"min": 1, "max": 10000, "points": 9}, "order": 0})");
  const auto h = run({"flux", "--config", hs.string()});
  REQUIRE(h.code == 0);
  const auto hrows = csv_rows(h.out);
  const std::size_t column = 6;  // asymptotic_deviation
  REQUIRE(hrows[0][column] == "asymptotic_deviation");
  for (std::size_t i = 3; i < hrows.size(); ++i) CHECK(std::stod(hrows[i][column]) < std::stod(hrows[i - 1][column]));
  CHECK(std::stod(hrows.back()[column]) < 1e-3);

  const auto json_run = run({"flux", "--config", hs.string(), "--format", "json"});
  REQUIRE(json_run.code == 0);
  const auto doc = nlohmann::json::parse(json_run.out);
  CHECK(doc["total_flux"].size() == 9);

  const auto out_file = dir.path / "out.csv";
  CHECK(run({"flux", "--config", hs.string(), "--out", out_file.string()}).code == 0);
  CHECK(read(out_file) == h.out);
}

TEST_CASE("flux output does not depend on the thread count") {
  TempDir dir;
  const std::string body = std::string(R"({"amplitude": )") + random_model +
                           R"(, "R": {"min": 0.3, "max": 300, "points": 7}, "per_angle": true, "threads": )";
  const auto one = run({"flux", "--config", dir.write("t1.json", body + "1}").string()});
  const auto four = run({"flux", "--config", dir.write("t4.json", body + "4}").string()});
  REQUIRE(one.code == 0);
  CHECK(one.out == four.out);
  CHECK(one.out.find("R,theta,phi,weight,dflux") != std::string::npos);
}

TEST_CASE("coeffs command") {
  const auto r = run({"coeffs", "--l", "3", "--j", "0"});
  CHECK(r.code == 0);
  CHECK(r.out == "n,numerator,denominator\n0,1,1\n1,-12,1\n2,60,1\n3,-120,1\n");
  const auto same = run({"coeffs", "--l", "4", "--j", "4"});
  CHECK(same.code == 0);
  CHECK(same.out == "# Δ=0\nn,numerator,denominator\n");
  const auto table = run({"coeffs", "--table", "--l", "3"});
  CHECK(table.out.find("n,j=0,j=1,j=2,j=3\n0,1,1,1,\n1,-12,-10,-6,\n") == 0);
  const auto j = run({"coeffs", "--l", "2", "--j", "5", "--format", "json"});
  const auto doc = nlohmann::json::parse(j.out);
  CHECK(doc["delta"] == 24);
  for (const auto& row : doc["rows"]) CHECK(row.contains("numerator"));
  CHECK(doc["rows"][0]["numerator"] == "1");
}

TEST_CASE("check command outcomes") {
  TempDir dir;
  const auto model = dir.write("model.json", std::string(R"({"amplitude": )") + random_model + R"(, "R": [0.4, 3, 500]})");
  for (const char* which : {"conservation", "unitarity", "optical", "two-path"}) {
    const auto r = run({"check", which, "--config", model.string()});
    CHECK_MESSAGE(r.code == 0, which);
    CHECK(r.out.ends_with("PASS\n"));
  }
  CHECK(run({"check", "greens", "--config", model.string()}).code == 0);

  dir.write("real.json", R"({"channels": [{"label": "a", "k": 1.0}], "alpha": 0, "weight_mode": "momentum_ratio",
    "coefficients": [{"beta": 0, "l": 0, "m": 0, "re": 1.5, "im": 0.0}, {"beta": 0, "l": 1, "m": 0, "re": -0.5, "im": 0.0}]})");
  const auto real = dir.write("real_cfg.json", R"({"amplitude": {"file": "real.json"}, "R": [2.0]})");
  const auto r = run({"check", "optical", "--config", real.string(), "--format", "json"});
  CHECK(r.code == 1);
  const auto doc = nlohmann::json::parse(r.out);
  CHECK(doc["pass"] == false);
  CHECK(doc["results"][0]["defect"].get<double>() == doctest::Approx(1.0));
  // One entrance channel of a multichannel problem cannot feed the unitarity relation.
  dir.write("partial.json", R"({"channels": [{"label": "a", "k": 1.0}, {"label": "b", "k": 2.0}], "alpha": 0,
    "coefficients": [{"beta": 1, "l": 0, "m": 0, "re": 0.5, "im": 0.1}]})");
  const auto partial = dir.write("partial_cfg.json", R"({"amplitude": {"file": "partial.json"}})");
  CHECK(run({"check", "unitarity", "--config", partial.string()}).code == 3);
}

TEST_CASE("exit codes for bad input") {
  TempDir dir;
  CHECK(run({}).code == 2);
  CHECK(run({"flux"}).code == 2);
  CHECK(run({"flux", "--config", (dir.path / "missing.json").string()}).code == 2);
  CHECK(run({"check", "everything", "--config", dir.write("c.json", "{}").string()}).code == 2);
  CHECK(run({"flux", "--config", dir.write("broken.json", "{\"R\": [1,").string()}).code == 2);
  CHECK(run({"flux", "--config", dir.write("nor.json", R"({"amplitude": {"model": "hard_sphere", "k": 1, "a": 1, "l_max": 2}})").string()}).code == 2);
  CHECK(run({"flux", "--config", dir.write("bad_model.json", R"({"amplitude": {"model": "soft"}, "R": [1]})").string()}).code == 2);

  dir.write("neg.json", R"({"channels": [{"label": "a", "k": -1.0}], "alpha": 0, "coefficients": []})");
  const auto r = run({"flux", "--config", dir.write("neg_cfg.json", R"({"amplitude": {"file": "neg.json"}, "R": [1]})").string()});
  CHECK(r.code == 3);
  CHECK(r.err.find("wavenumber must be > 0") != std::string::npos);
  dir.write("garbage.json", "not json");
  CHECK(run({"flux", "--config", dir.write("g_cfg.json", R"({"amplitude": {"file": "garbage.json"}, "R": [1]})").string()}).code == 3);
  CHECK(run({"coeffs", "--l", "3"}).code == 2);
}
