#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "doctest.h"
#include "oracle.hpp"
#include "robustiv/cli/csv.hpp"
#include "robustiv/cli/report.hpp"
#include "robustiv/cli/run.hpp"
#include "robustiv/rng.hpp"

using namespace robustiv;
using namespace robustiv::cli;

namespace {

std::filesystem::path scratch(const std::string& name) {
  const auto dir = std::filesystem::temp_directory_path() / "robustiv_cli_tests";
  std::filesystem::create_directories(dir);
  return dir / name;
}

std::string write_file(const std::string& name, const std::string& text) {
  const auto p = scratch(name);
  std::ofstream(p, std::ios::binary) << text;
  return p.string();
}

std::string slurp(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  std::stringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

struct Outcome {
  int code;
  std::string out, err;
};

Outcome run_cli(const std::vector<std::string>& args) {
  std::ostringstream out, err;
  const int code = run(args, out, err);
  return {code, out.str(), err.str()};
}

// Linear simulation written once and shared across tests.
std::string sim_csv() {
  static const std::string path = [] {
    const std::string p = scratch("sim.csv").string();
    const Outcome o = run_cli({"simulate", "--n", "600", "--pz", "8", "--invalid", "2", "--seed", "3",
                               "--out", p});
    REQUIRE(o.code == 0);
    return p;
  }();
  return path;
}

}  // namespace

TEST_CASE("parse a small well-formed file") {
  std::istringstream in("y,educ,z\n1,12,3\n2,\"13\",4\r\n3,14,5\n");
  const ColumnTable t = parse_csv(in);
  CHECK(t.rows() == 3);
  CHECK(t.names == std::vector<std::string>{"y", "educ", "z"});
  CHECK(t.columns[1][1] == 13.0);

  const std::string path = write_file("three.csv", "y,educ,z,x\n1,12,3,0.5\n2,13,1,0.1\n3,14,5,0.9\n");
  ColumnSpec spec{"y", "educ", {"z"}, {}};
  ValidationSummary sum;
  const Dataset ds = read_csv(path, spec, &sum);
  CHECK(ds.n() == 3);
  CHECK(sum.pz == 1);
}

TEST_CASE("missing values are dropped") {
  const std::string path = write_file(
      "na.csv", "y,d,z\n1,2,0.3\nNA,3,1.2\n3,5,2.1\n4,4,0.7\n5,8,1.9\n6,7,3.3\n");
  ValidationSummary sum;
  const Dataset ds = read_csv(path, {"y", "d", {"z"}, {}}, &sum);
  CHECK(ds.n() == 5);
  CHECK(sum.dropped_rows == 1);
}

TEST_CASE("non-numeric cells name their location") {
  std::istringstream in("lwage,educ\n1,12\n2,12\n3,12\n4,twelve\n");
  try {
    parse_csv(in);
    FAIL("expected ParseError");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::ParseError);
    const std::string msg = e.what();
    CHECK(msg.find("row 4") != std::string::npos);
    CHECK(msg.find("\"educ\"") != std::string::npos);
  }
}

TEST_CASE("column ranges expand") {
  CHECK(expand_column_list("Z1..Z3") == std::vector<std::string>{"Z1", "Z2", "Z3"});
  CHECK(expand_column_list("Z8..Z10").size() == 3);
  CHECK(expand_column_list("a") == std::vector<std::string>{"a"});
  // Mismatched prefixes are not a range and pass through as a single name.
  CHECK(expand_column_list("Z1..X3") == std::vector<std::string>{"Z1..X3"});
  CHECK_THROWS_AS(expand_column_list("Z5..Z2"), Error);
}

TEST_CASE("written datasets read back exactly") {
  const Dataset ds = oracle::mroz_linear();
  std::stringstream ss;
  write_csv(ss, ds);
  const ColumnTable t = parse_csv(ss);
  REQUIRE(t.rows() == static_cast<std::size_t>(ds.n()));
  for (Eigen::Index i = 0; i < ds.n(); ++i) CHECK(t.columns[1][i] == ds.d(i));
}

TEST_CASE("exit codes") {
  CHECK(run_cli({"tsht", "--bogus"}).code == kExitUsage);
  const Outcome none = run_cli({});
  CHECK(none.code == kExitUsage);
  const Outcome missing = run_cli({"tsht", "--data", "/nonexistent.csv", "--outcome", "Y", "--treatment",
                                   "D", "--iv", "Z1"});
  CHECK(missing.code == kExitUsage);
  // Pure-noise instruments fail the first-stage screen.
  std::string text = "Y,D,Z1,Z2\n";
  Rng rng(5);
  for (int i = 0; i < 200; ++i)
    text += std::to_string(rng.normal()) + "," + std::to_string(rng.normal()) + "," +
            std::to_string(rng.normal()) + "," + std::to_string(rng.normal()) + "\n";
  const std::string noise = write_file("noise.csv", text);
  const Outcome weak = run_cli({"tsht", "--data", noise, "--outcome", "Y", "--treatment", "D", "--iv",
                                "Z1,Z2", "--tuning-1st", "10"});
  CHECK(weak.code == kExitStatistical);
  CHECK(weak.err.find("NoRelevantIV") != std::string::npos);
}

TEST_CASE("tsht text output") {
  const Outcome o = run_cli({"tsht", "--data", sim_csv(), "--outcome", "Y", "--treatment", "D", "--iv",
                             "Z1..Z8", "--voting", "MP"});
  REQUIRE(o.code == 0);
  CHECK(o.out.find("betaHat") != std::string::npos);
  CHECK(o.out.find("Detected invalid IVs: Z1 Z2") != std::string::npos);
}

TEST_CASE("stochastic subcommands are byte-identical across runs") {
  const std::string a = scratch("s1.json").string(), b = scratch("s2.json").string();
  const std::vector<std::string> base{"sample", "--data", sim_csv(), "--outcome", "Y", "--treatment", "D",
                                      "--iv", "Z1..Z8", "--seed", "7", "--M", "100", "--grid-points", "501"};
  auto args = base;
  args.insert(args.end(), {"--json", a});
  REQUIRE(run_cli(args).code == 0);
  args = base;
  args.insert(args.end(), {"--json", b});
  REQUIRE(run_cli(args).code == 0);
  CHECK(slurp(a) == slurp(b));
  CHECK_FALSE(slurp(a).empty());
}

TEST_CASE("JSON round trip and agreement with the text layout") {
  const Outcome o = run_cli({"cf", "--data", oracle::data_path("mroz.csv"), "--outcome", "lwage",
                             "--treatment", "educ", "--iv", "motheduc,fatheduc,huseduc", "--covariates",
                             "exper,expersq,age", "--json", "-"});
  REQUIRE(o.code == 0);
  const auto j = nlohmann::json::parse(o.out);
  const Report r = report_from_json(j);
  CHECK(to_json(r) == j);
  CHECK(to_json(r).dump() == j.dump());
  CHECK(r.coefficients.at(1).name == "D");
  CHECK(std::abs(r.coefficients.at(1).estimate - -0.1434395) < 1e-6);

  const std::string text = render_text(r);
  for (const auto& c : r.coefficients) CHECK(text.find(format_number(c.estimate)) != std::string::npos);
  for (const auto& e : r.estimates) {
    CHECK(text.find(format_number(e.estimate)) != std::string::npos);
    CHECK(text.find(format_number(e.se)) != std::string::npos);
  }
}

TEST_CASE("reports reject non-finite numbers and unordered intervals") {
  Report r;
  r.method = "x";
  r.estimates.push_back({"b", 1.0, 0.1, 0.8, 1.2, {}});
  CHECK_NOTHROW(check_report(r));
  r.estimates[0].lower = 2.0;
  CHECK_THROWS_AS(check_report(r), Error);
  r.estimates[0].lower = std::nan("");
  CHECK_THROWS_AS(check_report(r), Error);
}

TEST_CASE("format_number uses six significant digits") {
  CHECK(format_number(0.0726256123) == "0.0726256");
  CHECK(format_number(-1234567.0) == "-1.23457e+06");
}
