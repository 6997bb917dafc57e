#include <doctest.h>

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>

#include "coagself/serialize.hpp"
#include "coagself/verify.hpp"

using namespace coagself;

namespace {

struct RunResult {
  int status = -1;
  std::string out;
};

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

RunResult run_cli(const std::string& args) {
  const std::string outfile = "cli_stdout.txt";
  const std::string cmd =
      std::string(COAGSELF_CLI_PATH) + " " + args + " > " + outfile + " 2>&1";
  RunResult r;
  const int raw = std::system(cmd.c_str());
  r.status = WEXITSTATUS(raw);
  r.out = slurp(outfile);
  return r;
}

// small grid keeps the end-to-end solves fast
const std::string kGrid = "--grid -30,30,512";

}  // namespace

TEST_CASE("cli: usage errors name the offending field") {
  RunResult bad_rho = run_cli("solve --rho 1.5 --out t.json");
  CHECK(bad_rho.status != 0);
  CHECK(bad_rho.out.find("rho must lie in (0,1)") != std::string::npos);

  RunResult bad_kernel = run_cli("solve --kernel nosuch --rho 0.1 --out t.json");
  CHECK(bad_kernel.status != 0);
  CHECK(bad_kernel.out.find("available:") != std::string::npos);
  CHECK(bad_kernel.out.find("additive") != std::string::npos);
}

TEST_CASE("cli: solve writes profile + verification, validate round-trips") {
  RunResult solve1 = run_cli("solve --kernel additive --rho 0.2 " + kGrid +
                             " --out prof_a.json");
  REQUIRE(solve1.status == 0);

  nlohmann::json prof = load_json("prof_a.json");
  CHECK(prof.at("kernel") == "additive");
  CHECK(prof.at("rho") == 0.2);
  CHECK(prof.at("grid").at("n") == 512);
  CHECK(prof.at("report").at("converged") == true);

  nlohmann::json ver = load_json("prof_a.verify.json");
  const double res_solve = ver.at("residual").get<double>();
  CHECK(res_solve < 1e-6);

  RunResult val = run_cli("validate --profile prof_a.json --out reval.json");
  REQUIRE(val.status == 0);
  const double res_val = load_json("reval.json").at("residual").get<double>();
  CHECK(std::abs(res_val - res_solve) <= 1e-12);
}

TEST_CASE("cli: determinism, export round trip, csv layout") {
  RunResult a = run_cli("solve --kernel additive --rho 0.2 " + kGrid + " --out det_a.json");
  RunResult b = run_cli("solve --kernel additive --rho 0.2 " + kGrid + " --out det_b.json");
  REQUIRE(a.status == 0);
  REQUIRE(b.status == 0);
  CHECK(slurp("det_a.json") == slurp("det_b.json"));
  CHECK(slurp("det_a.verify.json") == slurp("det_b.verify.json"));

  // json re-export is byte-stable
  RunResult ej = run_cli("export --profile det_a.json --format json --out det_c.json");
  REQUIRE(ej.status == 0);
  CHECK(slurp("det_c.json") == slurp("det_a.json"));

  RunResult ec = run_cli("export --profile det_a.json --format csv --out det.csv");
  REQUIRE(ec.status == 0);
  std::ifstream csv("det.csv");
  std::string header;
  std::getline(csv, header);
  CHECK(header == "x,lambda,xi,g");
  int rows = 0;
  ProfileDoc doc = profile_from_json(load_json("det_a.json"));
  std::string line;
  while (std::getline(csv, line)) {
    if (line.empty()) continue;
    double x, lam, xi, gv;
    REQUIRE(std::sscanf(line.c_str(), "%lf,%lf,%lf,%lf", &x, &lam, &xi, &gv) == 4);
    if (rows < doc.lambda.grid.n) CHECK(lam == doc.lambda.values[rows]);
    ++rows;
  }
  CHECK(rows == doc.lambda.grid.n);
}

TEST_CASE("cli: probe requires a normalized profile (exit 2), then runs") {
  RunResult pre =
      run_cli("probe --profile det_a.json --kernel shear --b 1.000001 --A 4 --out pr.json");
  CHECK(pre.status == 2);
  CHECK(pre.out.find("alpha-moment") != std::string::npos);

  RunResult ok = run_cli(
      "probe --profile det_a.json --kernel shear --b 1.000001 --A 4 --normalize --out pr.json");
  REQUIRE(ok.status == 0);
  nlohmann::json pr = load_json("pr.json");
  for (const char* key : {"alpha", "beta0", "A", "R0", "D", "M_dual", "omega_R0", "q",
                          "n_bar", "lhs", "rhs", "flag", "b_hat"})
    CHECK(pr.contains(key));
  CHECK(pr.at("alpha").get<double>() == doctest::Approx(1.0 / 3.0));
  CHECK(pr.at("q").get<double>() > 0.0);
  CHECK(pr.at("q").get<double>() < 1.0);
}

TEST_CASE("cli: sweep writes the per-rho table") {
  RunResult sw = run_cli("sweep --kernel unit-test --rhos 0.05,0.1 " + kGrid +
                         " --no-corner --out sweep.csv");
  REQUIRE(sw.status == 0);
  std::ifstream csv("sweep.csv");
  std::string header;
  std::getline(csv, header);
  CHECK(header == "rho,converged,iterations,final_weighted_residual,max_contraction_ratio");
  int rows = 0;
  std::string line;
  while (std::getline(csv, line))
    if (!line.empty()) ++rows;
  CHECK(rows == 2);
}

TEST_CASE("cli: io failure paths exit 3, corrupt json names the byte") {
  RunResult bad = run_cli("solve --kernel unit-test --rho 0.1 --no-corner " + kGrid +
                          " --out /nonexistent-dir/x.json");
  CHECK(bad.status == 3);

  std::ofstream("corrupt.json") << "{\"grid\": {";
  RunResult load = run_cli("validate --profile corrupt.json");
  CHECK(load.status == 1);
  CHECK(load.out.find("parse error") != std::string::npos);
  CHECK(load.out.find("byte") != std::string::npos);
}

TEST_CASE("cli: config file supplies defaults, flags win") {
  std::ofstream("cfg.json") << R"({"kernel":"unit-test","rho":0.07,"grid":"-30,30,256"})";
  RunResult r = run_cli("solve --config cfg.json --no-corner --out cfgd.json");
  REQUIRE(r.status == 0);
  nlohmann::json prof = load_json("cfgd.json");
  CHECK(prof.at("kernel") == "unit-test");
  CHECK(prof.at("rho").get<double>() == doctest::Approx(0.07));
  CHECK(prof.at("grid").at("n") == 256);

  RunResult r2 = run_cli("solve --config cfg.json --rho 0.09 --no-corner --out cfgd2.json");
  REQUIRE(r2.status == 0);
  CHECK(load_json("cfgd2.json").at("rho").get<double>() == doctest::Approx(0.09));
}
