#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "semidev/format.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct RunResult {
  int exit_code = -1;
  std::string out;
  std::string err;
};

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

RunResult run_cli(const std::string& args) {
  static int counter = 0;
  const fs::path dir = fs::temp_directory_path() / "semidev_cli_test";
  fs::create_directories(dir);
  const fs::path out = dir / ("out" + std::to_string(counter) + ".txt");
  const fs::path err = dir / ("err" + std::to_string(counter) + ".txt");
  ++counter;
  const std::string cmd = std::string(SEMIDEV_CLI_PATH) + " " + args + " > " +
                          out.string() + " 2> " + err.string();
  const int rc = std::system(cmd.c_str());
  RunResult res;
  res.exit_code = WEXITSTATUS(rc);
  res.out = slurp(out);
  res.err = slurp(err);
  return res;
}

std::vector<std::vector<std::string>> parse_csv(const std::string& text) {
  std::vector<std::vector<std::string>> rows;
  std::stringstream ss(text);
  std::string line;
  while (std::getline(ss, line)) {
    std::vector<std::string> cells;
    std::stringstream ls(line);
    std::string cell;
    while (std::getline(ls, cell, ',')) cells.push_back(cell);
    if (line.back() == ',') cells.push_back("");
    rows.push_back(std::move(cells));
  }
  return rows;
}

}  // namespace

TEST_CASE("rate curve golden output") {
  const RunResult r =
      run_cli("rate --id gaussian --q 1 --sigma2 2 --eps 0.5 --ymax 2 --points 3");
  CHECK(r.exit_code == 0);
  CHECK(r.out ==
        "y,value,theta,branch,jumps\n"
        "0,0,,gaussian,\n"
        "1,0.25,,gaussian,\n"
        "2,1,,gaussian,\n");
}

TEST_CASE("rate exit codes") {
  CHECK(run_cli("rate --id gaussian --ymax 0").exit_code == 2);
  CHECK(run_cli("rate --id nonsense --ymax 2").exit_code == 2);
  CHECK(run_cli("rate --ymax 2").exit_code == 2);            // missing --id
  CHECK(run_cli("rate --id transition2 --ymax 2").exit_code == 2);  // no --c
}

TEST_CASE("transition2 curve changes jump count exactly at multiples of c") {
  const RunResult r = run_cli(
      "rate --id transition2 --q 1 --sigma2 2 --eps 0.5 --c 1 --ymax 8 "
      "--points 513");
  REQUIRE(r.exit_code == 0);
  const auto rows = parse_csv(r.out);
  REQUIRE(rows.size() == 514);
  CHECK(rows[0] == std::vector<std::string>{"y", "value", "theta", "branch", "jumps"});
  std::string prev_jumps = rows[1][4];
  for (std::size_t i = 2; i < rows.size(); ++i) {
    if (rows[i][4] != prev_jumps) {
      const double y = std::stod(rows[i][0]);
      CHECK(y == doctest::Approx(std::stod(rows[i][4])).epsilon(1e-12));
    }
    prev_jumps = rows[i][4];
  }
}

TEST_CASE("curve CSV round-trips through 12-significant-digit parsing") {
  const RunResult r = run_cli(
      "rate --id transition --q 1.7 --sigma2 2.3 --eps 0.41 --ymax 9 --points 50");
  REQUIRE(r.exit_code == 0);
  const auto rows = parse_csv(r.out);
  for (std::size_t i = 1; i < rows.size(); ++i) {
    for (std::size_t col : {std::size_t{0}, std::size_t{1}, std::size_t{2}}) {
      const std::string& cell = rows[i][col];
      if (cell.empty()) continue;
      CHECK(semidev::fmt_g(std::stod(cell)) == cell);
    }
  }
}

TEST_CASE("phase point output") {
  const RunResult g = run_cli("phase --alpha 0.6 --beta 0.8 --eps 0.5");
  CHECK(g.exit_code == 0);
  CHECK(g.out == "gaussian, speed 0.2\n");
  const RunResult t1 = run_cli("phase --alpha \"1/(1+eps)\" --beta 0.8 --eps 0.5");
  CHECK(t1.out.rfind("transition1", 0) == 0);
  CHECK(run_cli("phase --alpha 0.5 --beta 0.8 --eps 0.5").exit_code == 2);
  const RunResult ycond = run_cli("phase --alpha \"beta+1\" --beta 0.7 --eps 0.5");
  CHECK(ycond.out.find("y < c") != std::string::npos);
}

TEST_CASE("phase grid output and boundary polylines") {
  const fs::path dir = fs::temp_directory_path() / "semidev_cli_test";
  const fs::path bpath = dir / "bounds.json";
  const RunResult r = run_cli(
      "phase --grid --eps 0.5 --c 1 --alpha-min 0.51 --alpha-max 1.8 "
      "--beta-min 0.1 --beta-max 1.2 --resolution 5 --boundaries-out " +
      bpath.string());
  REQUIRE(r.exit_code == 0);
  const auto rows = parse_csv(r.out);
  CHECK(rows.size() == 26);  // header + 25 cells
  CHECK(rows[0] == std::vector<std::string>{"alpha", "beta", "regime"});
  const json bounds = json::parse(slurp(bpath));
  CHECK(bounds.is_array());
  CHECK(!bounds.empty());
  bool has_t3 = false;
  for (const auto& b : bounds)
    if (b["name"].get<std::string>().find("transition3") != std::string::npos)
      has_t3 = true;
  CHECK(has_t3);
}

TEST_CASE("estimate JSON lines and the two-point self-test") {
  const RunResult exact =
      run_cli("estimate --estimator exact --family two_point --alpha 0 --y 2 --n 4");
  REQUIRE(exact.exit_code == 0);
  const json e = json::parse(exact.out);
  CHECK(e["estimator"] == "exact_lattice");
  CHECK(e["std_err"] == 0.0);
  const double exact_lp = e["log_prob"].get<double>();
  CHECK(exact_lp == doctest::Approx(std::log(5.0 / 16.0)).epsilon(1e-12));

  const RunResult is = run_cli(
      "estimate --estimator tilted --family two_point --alpha 0 --y 2 --n 4 "
      "--samples 100000 --seed 7");
  REQUIRE(is.exit_code == 0);
  const json j = json::parse(is.out);
  CHECK(std::fabs(j["log_prob"].get<double>() - exact_lp) <=
        3.0 * j["std_err"].get<double>());
  for (const char* key : {"n", "y", "log_prob", "std_err", "samples",
                          "estimator", "seed"})
    CHECK(j.contains(key));
}

TEST_CASE("estimate validation exit codes") {
  CHECK(run_cli("estimate --estimator naive --family symmetric --alpha 0.6 "
                "--y 1 --n 16 --samples 0").exit_code == 2);
  CHECK(run_cli("estimate --estimator naive --family symmetric --alpha 0.6 "
                "--y 1 --n 32,16 --samples 2000").exit_code == 2);
  CHECK(run_cli("estimate --estimator tilted --family symmetric --alpha 0.6 "
                "--y 1 --n 16 --samples 2000").exit_code == 2);  // no lattice
  CHECK(run_cli("estimate --estimator big_jump --family symmetric --eps 0.5 "
                "--alpha 0.55 --y 1 --n 16 --samples 2000").exit_code == 2);
}

TEST_CASE("estimate slope-fit summary") {
  const RunResult r = run_cli(
      "estimate --estimator naive --family symmetric --eps 0.5 --q 1 "
      "--alpha 0.6 --y 0.5 --n 16,64,256 --samples 20000 --seed 5 --slope-fit");
  REQUIRE(r.exit_code == 0);
  std::stringstream ss(r.out);
  std::string line, last;
  int lines = 0;
  while (std::getline(ss, line)) {
    last = line;
    ++lines;
  }
  CHECK(lines == 4);
  const json fit = json::parse(last);
  REQUIRE(fit.contains("slope_fit"));
  CHECK(fit["slope_fit"]["speed_exponent"].get<double>() ==
        doctest::Approx(0.2));
  CHECK(fit["slope_fit"]["per_n_ratios"].size() == 3);
}

TEST_CASE("verify subcommand exit codes and report shape") {
  const RunResult r = run_cli("verify rates --seed 5");
  CHECK(r.exit_code == 0);
  const json rep = json::parse(r.out);
  CHECK(rep["pass"] == true);
  CHECK(rep["suite"] == "rates");
  CHECK(rep["checks"].is_array());
  CHECK(run_cli("verify bogus").exit_code == 2);
}

TEST_CASE("relative --out joins SEMIDEV_OUTPUT_DIR") {
  const fs::path dir = fs::temp_directory_path() / "semidev_out_dir";
  fs::create_directories(dir);
  setenv("SEMIDEV_OUTPUT_DIR", dir.c_str(), 1);
  const RunResult r = run_cli(
      "rate --id gaussian --sigma2 2 --ymax 1 --points 2 --out rel_curve.csv");
  unsetenv("SEMIDEV_OUTPUT_DIR");
  REQUIRE(r.exit_code == 0);
  CHECK(fs::exists(dir / "rel_curve.csv"));
  CHECK(slurp(dir / "rel_curve.csv").rfind("y,value", 0) == 0);
}
