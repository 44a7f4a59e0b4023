// Integration tests that invoke the installed CLI binary.

#include <doctest.h>

#include <json.hpp>

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>

namespace {

struct CommandResult {
  int exit_code = -1;
  std::string output;
};

std::string temp_path(const std::string& name) {
  return std::string("/tmp/cksd_cli_test_") + std::to_string(::getpid()) + "_" +
         name;
}

CommandResult run_cli(const std::string& args) {
  std::string out_path = temp_path("stdout.txt");
  std::string cmd = std::string(CKSD_CLI_PATH) + " " + args + " > " + out_path +
                    " 2>" + temp_path("stderr.txt");
  int status = std::system(cmd.c_str());
  CommandResult r;
  r.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  std::ifstream in(out_path);
  std::stringstream ss;
  ss << in.rdbuf();
  r.output = ss.str();
  return r;
}

std::string read_stderr() {
  std::ifstream in(temp_path("stderr.txt"));
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::string& path, const std::string& text) {
  std::ofstream out(path);
  out << text;
}

}  // namespace

TEST_CASE("cli: simulate then test round trip") {
  std::string data = temp_path("data.csv");
  auto sim = run_cli("simulate --null exp:rate=1 --n 80 --censoring 0.3 "
                     "--seed 11 --output " + data);
  REQUIRE(sim.exit_code == 0);

  auto test = run_cli("test --input " + data +
                      " --null exp:rate=1 --op m --op s --bootstrap 200 "
                      "--seed 5");
  REQUIRE(test.exit_code == 0);
  auto doc = nlohmann::json::parse(test.output);
  REQUIRE(doc["results"].size() == 2);

  // martingale and survival statistics coincide under the unit exponential
  CHECK(doc["results"][0]["statistic"] == doc["results"][1]["statistic"]);
  CHECK(doc["results"][0]["p_value"] == doc["results"][1]["p_value"]);

  // decision bit reproduces from the reported p-value and alpha
  for (const auto& r : doc["results"]) {
    CHECK(r["reject"].get<bool>() ==
          (r["p_value"].get<double>() < r["alpha"].get<double>()));
  }

  SUBCASE("identical invocation gives byte-identical output") {
    auto again = run_cli("test --input " + data +
                         " --null exp:rate=1 --op m --op s --bootstrap 200 "
                         "--seed 5");
    CHECK(again.exit_code == 0);
    CHECK(again.output == test.output);
  }
  SUBCASE("csv format") {
    auto csv = run_cli("test --input " + data +
                       " --null exp:rate=1 --op m --op lr1 --bootstrap 100 "
                       "--seed 5 --format csv");
    CHECK(csv.exit_code == 0);
    CHECK(csv.output.rfind("operator,n,n_events,bandwidth,statistic", 0) == 0);
  }
}

TEST_CASE("cli: empty csv exits 2 with empty-input") {
  std::string empty = temp_path("empty.csv");
  write_file(empty, "");
  auto r = run_cli("test --input " + empty + " --null exp:rate=1 --op m");
  CHECK(r.exit_code == 2);
  CHECK(read_stderr().find("empty-input") != std::string::npos);
}

TEST_CASE("cli: statistical precondition failures exit 1") {
  std::string data = temp_path("events.csv");
  write_file(data, "time,status\n0.5,1\n1.0,1\n2.0,0\n");
  auto r = run_cli("test --input " + data +
                   " --null weibull:shape=0.5,rate=1 --op s");
  CHECK(r.exit_code == 1);
  CHECK(read_stderr().find("condition b)") != std::string::npos);
}

TEST_CASE("cli: malformed csv names the line") {
  std::string data = temp_path("bad.csv");
  write_file(data, "time,status\n1.0,1\nbroken,1\n");
  auto r = run_cli("test --input " + data + " --null exp:rate=1 --op m");
  CHECK(r.exit_code == 2);
  CHECK(read_stderr().find("line 3") != std::string::npos);
}

TEST_CASE("cli: identity-check pass and fail") {
  auto ok = run_cli("identity-check --null exp:rate=1 --op m");
  CHECK(ok.exit_code == 0);
  auto doc = nlohmann::json::parse(ok.output);
  CHECK(doc["pass"].get<bool>());
  CHECK(doc["max_abs_deviation"].get<double>() < 1e-6);
  CHECK(doc["probes"].size() == 10);

  auto mismatch = run_cli(
      "identity-check --null exp:rate=1 --op m "
      "--data-law weibull:shape=1.5,rate=1 --censoring-rate 0.42857142857");
  CHECK(mismatch.exit_code == 1);
  auto bad = nlohmann::json::parse(mismatch.output);
  CHECK_FALSE(bad["pass"].get<bool>());
  CHECK(bad["max_abs_deviation"].get<double>() > 1e-3);

  auto unsupported = run_cli("identity-check --null exp:rate=1 --op p");
  CHECK(unsupported.exit_code == 1);
  CHECK(read_stderr().find("deterministic kernel") != std::string::npos);
}

TEST_CASE("cli: power from a one-cell config") {
  std::string cfg = temp_path("power.json");
  write_file(cfg, R"({
    "null": "exp:rate=1",
    "alternative": {"family": "exp", "vary": "rate", "grid": [1.0]},
    "censoring": 0.3, "sample_sizes": [20], "repetitions": 1,
    "alpha": 0.05, "operators": ["m"], "bootstrap": 30, "seed": 3
  })");
  auto r = run_cli("power --config " + cfg);
  REQUIRE(r.exit_code == 0);
  std::istringstream lines(r.output);
  std::string header, row, extra;
  std::getline(lines, header);
  std::getline(lines, row);
  CHECK(header == "operator,n,param,censoring,alpha,rejections,reps,rate,se");
  CHECK(row.rfind("m,20,1,0.3,0.05,", 0) == 0);
  CHECK_FALSE(std::getline(lines, extra));

  SUBCASE("preset dump and unknown preset") {
    auto dump = run_cli("power --preset fig2-periodic --dump-config");
    CHECK(dump.exit_code == 0);
    CHECK(nlohmann::json::parse(dump.output)["alternative"]["grid"].size() == 8);
    auto unknown = run_cli("power --preset does-not-exist");
    CHECK(unknown.exit_code == 2);
  }
}

TEST_CASE("cli: bad flags exit 2") {
  auto r = run_cli("test --null exp:rate=1 --op m");  // missing --input
  CHECK(r.exit_code == 2);
  auto bogus = run_cli("frobnicate");
  CHECK(bogus.exit_code == 2);
}
