// Copyright the dualhelm authors.
// SPDX-License-Identifier: Apache-2.0

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "doctest.h"
#include "json.hpp"

namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  auto p = fs::temp_directory_path() / ("dualhelm_cli_" + name);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

int run(const std::string& args) {
  const std::string cmd = std::string(DUALHELM_CLI) + " " + args + " > /dev/null 2>&1";
  const int st = std::system(cmd.c_str());
  return WIFEXITED(st) ? WEXITSTATUS(st) : -1;
}

std::string slurp(const fs::path& p) {
  std::ifstream f(p, std::ios::binary);
  std::ostringstream s;
  s << f.rdbuf();
  return s.str();
}

fs::path write_config(const fs::path& dir, const std::string& text) {
  auto p = dir / "config.json";
  std::ofstream(p) << text;
  return p;
}

const char* ball4 = R"({"dimension": 4, "grid": {"r_max": 7.0},
  "coefficient": {"constant": 0, "periodic_amplitude": 0, "decay": "smoothed_ball",
                  "height": 1, "radius": 5, "width": 1},
  "solve": {"backend": "radial", "tol": 1e-6}})";

}  // namespace

TEST_CASE("usage errors exit 2") {
  CHECK(run("") == 2);
  CHECK(run("frobnicate") == 2);
  CHECK(run("gap --no-such-flag") == 2);
  CHECK(run("gap --config /nonexistent/config.json") == 2);
  CHECK(run("--help") == 0);
}

TEST_CASE("config validation") {
  const auto d = scratch("config");
  CHECK(run("gap --dry-run --config " + write_config(d, R"({"bogus": 1})").string()) == 2);
  CHECK(run("gap --dry-run --config " + write_config(d, R"({"dimension": 9})").string()) == 2);
  CHECK(run("gap --dry-run --config " + write_config(d, R"({"grid": {"r_max": 5, "what": 1}})").string()) == 2);
  CHECK(run("gap --dry-run --config " + write_config(d, R"({"gap": {"alpha": 0.1, "eps": [0.5]}})").string()) == 2);
  CHECK(run("solve --dry-run --config " + write_config(d, R"({"solve": {"backend": "spectral"}})").string()) == 2);
  CHECK(run("solve --dry-run --config " + write_config(d, "{not json").string()) == 2);
  CHECK(run("nonexist3d --dry-run --config " + write_config(d, R"({"dimension": 4})").string()) == 2);
  CHECK(run("solve --dry-run --config " + write_config(d, ball4).string()) == 0);
}

TEST_CASE("dry run writes nothing") {
  const auto d = scratch("dry");
  CHECK(run("sobolev --dry-run --out " + (d / "out").string()) == 0);
  CHECK_FALSE(fs::exists(d / "out"));
}

TEST_CASE("sobolev and fundsol-table outputs") {
  const auto d = scratch("tables");
  REQUIRE(run("sobolev --out " + d.string()) == 0);
  const auto s = nlohmann::json::parse(slurp(d / "sobolev.json"));
  CHECK(s["N"] == 4);
  CHECK(s["S"].get<double>() == doctest::Approx(10.260398641).epsilon(1e-9));
  REQUIRE(run("fundsol-table --out " + d.string()) == 0);
  CHECK(fs::file_size(d / "fundsol_table.csv") > 1000);
  const auto b = nlohmann::json::parse(slurp(d / "bound_certificate.json"));
  CHECK(b["certified"] == true);
}

TEST_CASE("solve is deterministic") {
  const auto d = scratch("solve");
  const auto cfg = write_config(d, ball4).string();
  REQUIRE(run("solve --threads 2 --config " + cfg + " --out " + (d / "a").string()) == 0);
  REQUIRE(run("solve --threads 2 --config " + cfg + " --out " + (d / "b").string()) == 0);
  for (const char* f : {"solve_report.json", "residuals.csv", "v.field", "u.field"})
    CHECK(slurp(d / "a" / f) == slurp(d / "b" / f));
  const auto rep = nlohmann::json::parse(slurp(d / "a" / "solve_report.json"));
  CHECK(rep["status"] == "converged");
  CHECK(rep["energy"].get<double>() < rep["l_star"].get<double>());
}

TEST_CASE("zero init is rejected") {
  const auto d = scratch("zero");
  CHECK(run("solve --config " + write_config(d, R"({"solve": {"init": "zero"}})").string() + " --out " +
            d.string()) == 2);
}

TEST_CASE("gap and nonexist3d report negative findings with exit 0") {
  const auto d = scratch("gap");
  const auto cfg = write_config(d, R"({"dimension": 3, "gap": {"eps": [1e-2, 1e-3]}})").string();
  REQUIRE(run("gap --config " + cfg + " --out " + d.string()) == 0);
  const auto g = nlohmann::json::parse(slurp(d / "gap_certificate.json"));
  CHECK(g["status"] == "no_gap_equality");
  const auto cfg3 = write_config(d, R"({"nonexist3d": {"eps": [1e-2, 1e-3]}})").string();
  REQUIRE(run("nonexist3d --config " + cfg3 + " --out " + d.string()) == 0);
  const auto n = nlohmann::json::parse(slurp(d / "nonexist3d.json"));
  CHECK(n["above_threshold"] == true);
  CHECK(n["kernel_violations"] == 0);
}
