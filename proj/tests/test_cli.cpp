#include <cstdio>
#include <filesystem>
#include <fstream>
#include <regex>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "doctest.h"
#include "so4atom/cli.hpp"

using namespace so4atom;

namespace {

struct Run {
  int code;
  std::string out;
  std::string err;
};

Run run(std::vector<std::string> args) {
  args.insert(args.begin(), "so4atom");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out;
  std::ostringstream err;
  int code = run_main(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

std::string temp_path(const std::string& name) {
  return (std::filesystem::temp_directory_path() / ("so4atom_test_" + name)).string();
}

std::string slurp(const std::string& path) {
  std::ifstream f(path);
  std::stringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

std::string strip_elapsed(const std::string& text) {
  return std::regex_replace(text, std::regex("\"elapsed_ms\": [0-9.e+-]+"), "\"elapsed_ms\": 0");
}

}  // namespace

TEST_CASE("verify so4 writes an all-pass JSON report") {
  Run r = run({"verify", "--suite", "so4", "--format", "json"});
  CHECK(r.code == 0);
  auto j = nlohmann::json::parse(r.out);
  CHECK(j["command"] == "verify");
  CHECK(j["config"]["seed"] == 42);
  CHECK(j["summary"]["fail"] == 0);
  CHECK(j["summary"]["pass"].get<int>() == static_cast<int>(j["checks"].size()));
  for (const auto& c : j["checks"]) {
    CHECK(c.contains("id"));
    CHECK(c.contains("status"));
    CHECK(c.contains("elapsed_ms"));
  }
  CHECK(r.err.find("verify so4:") != std::string::npos);
}

TEST_CASE("summaries go to stdout when the report goes to a file") {
  std::string path = temp_path("so3.json");
  Run r = run({"verify", "--suite", "so3", "--out", path});
  CHECK(r.code == 0);
  CHECK(r.out.rfind("verify so3: ", 0) == 0);
  auto j = nlohmann::json::parse(slurp(path));
  CHECK(j["checks"].size() >= 5);
  std::remove(path.c_str());
}

TEST_CASE("theorem suite at mu=all reports per-regime statuses and exits 1") {
  Run r = run({"verify", "--suite", "theorem", "--mu", "all"});
  CHECK(r.code == 1);
  auto j = nlohmann::json::parse(r.out);
  bool saw_regime_status = false;
  for (const auto& c : j["checks"])
    if (c["status"] == "pass_at_mu_1") saw_regime_status = true;
  CHECK(saw_regime_status);
}

TEST_CASE("usage errors exit 2") {
  CHECK(run({"verify", "--suite", "bogus"}).code == 2);
  CHECK(run({"frobnicate"}).code == 2);
  CHECK(run({"verify", "--no-such-flag"}).code == 2);
  CHECK(run({"verify", "--mu", "2"}).code == 2);
  CHECK(run({"verify", "--format", "csv"}).code == 2);
  CHECK(run({"spectrum", "--format", "xml"}).code == 2);
  CHECK(run({"spectrum", "--j", "1/3"}).code == 2);
  CHECK(run({"spectrum", "--j", "1/2", "--grid-n", "100"}).code == 2);
  CHECK(run({"inverse", "--f-window", "2:1"}).code == 2);
  CHECK(run({"verify", "--suite", "so3", "--out", "/nonexistent-dir/report.json"}).code == 2);
  CHECK(run({"verify", "--config", "/nonexistent-config"}).code == 2);
}

TEST_CASE("spectrum writes CSV rows within tolerance") {
  Run r = run({"spectrum", "--j", "1/2", "--k1", "-1", "--k2", "0", "--grid-n", "4000", "--rmax", "200", "--levels",
               "4"});
  CHECK(r.code == 0);
  std::istringstream lines(r.out);
  std::string line;
  std::getline(lines, line);
  CHECK(line == "sector_j,s_r_or_channel,level_index,E_computed,E_predicted,n_label,branch,rel_error");
  int rows = 0;
  while (std::getline(lines, line)) {
    std::vector<std::string> cells;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) cells.push_back(cell);
    if (cells.size() == 8 && !cells[3].empty()) {
      ++rows;
      CHECK(std::stod(cells[7]) <= 1e-3);
    }
  }
  CHECK(rows == 4);
}

TEST_CASE("integer j selects mu = 0") {
  Run r = run({"spectrum", "--j", "0", "--levels", "4", "--format", "json"});
  CHECK(r.code == 0);
  auto j = nlohmann::json::parse(r.out);
  REQUIRE(j["checks"].size() == 1);
  CHECK(j["checks"][0]["id"].get<std::string>().find("mu=0") != std::string::npos);
}

TEST_CASE("a tolerance the solver cannot meet exits 1") {
  CHECK(run({"spectrum", "--j", "0", "--levels", "2", "--tol", "1e-12"}).code == 1);
}

TEST_CASE("config file values apply and flags override them") {
  std::string cfg = temp_path("run.cfg");
  {
    std::ofstream f(cfg);
    f << "# run settings\nsuite=so3\nseed=7\n";
  }
  Run r = run({"verify", "--config", cfg});
  CHECK(r.code == 0);
  auto j = nlohmann::json::parse(r.out);
  CHECK(j["config"]["seed"] == 7);
  CHECK(j["config"]["suites"] == nlohmann::json::array({"so3"}));
  r = run({"verify", "--config", cfg, "--seed", "9"});
  CHECK(nlohmann::json::parse(r.out)["config"]["seed"] == 9);
  {
    std::ofstream f(cfg);
    f << "no_such_key=1\n";
  }
  CHECK(run({"verify", "--config", cfg}).code == 2);
  std::remove(cfg.c_str());
}

TEST_CASE("reports are byte-stable apart from timings") {
  Run a = run({"verify", "--suite", "so4"});
  Run b = run({"verify", "--suite", "so4"});
  CHECK(strip_elapsed(a.out) == strip_elapsed(b.out));
  Run c = run({"oracle", "--suite", "so3", "--seed", "42"});
  Run d = run({"oracle", "--suite", "so3", "--seed", "42"});
  CHECK(c.code == 0);
  CHECK(strip_elapsed(c.out) == strip_elapsed(d.out));
}

TEST_CASE("markdown mirrors the JSON report") {
  Run r = run({"verify", "--suite", "so3", "--format", "md"});
  CHECK(r.code == 0);
  CHECK(r.out.find("## Checks") != std::string::npos);
  CHECK(r.out.find("so3/l_cross_l") != std::string::npos);
  CHECK(r.out.find("- fail: 0") != std::string::npos);
}

TEST_CASE("ansatz commands") {
  Run inv = run({"inverse"});
  CHECK(inv.code == 0);
  CHECK(inv.out.find("span{c_m1}") != std::string::npos);
  Run spin = run({"spin-potential"});
  CHECK(spin.code == 0);
  Run narrow = run({"inverse", "--f-window=0:2"});
  CHECK(narrow.code == 1);
}

TEST_CASE("half-integer parsing") {
  CHECK(parse_half_integer("1/2") == 1);
  CHECK(parse_half_integer("3/2") == 3);
  CHECK(parse_half_integer("2") == 4);
  CHECK_THROWS_AS(parse_half_integer("2/2"), UsageError);
  CHECK_THROWS_AS(parse_half_integer("-1/2"), UsageError);
  CHECK_THROWS_AS(parse_half_integer("x"), UsageError);
}
