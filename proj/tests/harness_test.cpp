#include <catch2/catch_amalgamated.hpp>

#include <cstdio>
#include <fstream>
#include <sstream>

#include "renact/harness.hpp"

using namespace renact;
using nlohmann::json;

namespace {

std::string temp_path(const std::string& tag) {
  return std::string("harness_test_") + tag + ".out";
}

std::string slurp(const std::string& path) {
  std::ifstream f(path);
  std::ostringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

}  // namespace

TEST_CASE("partition-check subcommand emits a passing report") {
  const auto path = temp_path("partition");
  const int rc = harness::run({"--out", path, "graphs", "partition-check", "--n", "4"});
  CHECK(rc == 0);
  const auto j = json::parse(slurp(path));
  CHECK(j["schema"] == 1);
  CHECK(j["interval_sum_2_pow_eprime"] == 38);
  CHECK(j["connected_count"] == 38);
  CHECK(j["pass"] == true);
  std::remove(path.c_str());
}

TEST_CASE("graphs count subcommand") {
  const auto path = temp_path("count");
  CHECK(harness::run({"--out", path, "graphs", "count", "--n", "4", "--class",
                      "connected"}) == 0);
  CHECK(json::parse(slurp(path))["count"] == 38);
  CHECK(harness::run({"--out", path, "graphs", "count", "--class", "star-connected",
                      "--m", "2", "--r", "1"}) == 0);
  CHECK(json::parse(slurp(path))["count"] == 2);
  std::remove(path.c_str());
}

TEST_CASE("convergence sweep CSV: row count, header, ratio column") {
  const auto path = temp_path("sweep");
  const int rc = harness::run({"--out", path, "convergence", "sweep", "--zr-grid",
                               "0:0.1:11", "--criteria", "easy,kp"});
  CHECK(rc == 0);
  std::istringstream is(slurp(path));
  std::string line;
  REQUIRE(std::getline(is, line));
  CHECK(line == "zr,R,r,zhat_easy,zR_easy,zR_kp,ratio");
  int rows = 0;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    ++rows;
    const auto last_comma = line.rfind(',');
    const double ratio = std::stod(line.substr(last_comma + 1));
    CHECK(ratio >= 1.0 - 1e-12);
  }
  CHECK(rows == 11);
  std::remove(path.c_str());
}

TEST_CASE("unknown subcommand exits 1") {
  CHECK(harness::run({"frobnicate"}) == 1);
  CHECK(harness::run({}) == 1);
}

TEST_CASE("pressure refuses outside the convergence region with exit 2") {
  const auto path = temp_path("pressure");
  const int rc = harness::run({"--out", path, "pressure", "--model", "penetrable",
                               "--zr", "0.1", "--zR", "1.0", "--M", "2",
                               "--samples", "4096"});
  CHECK(rc == 2);
  const auto j = json::parse(slurp(path));
  CHECK(j.contains("error"));
  std::remove(path.c_str());
}

TEST_CASE("coeff bm subcommand carries stderr and seed") {
  const auto path = temp_path("bm");
  const int rc = harness::run({"--out", path, "--seed", "7", "coeff", "bm", "--m", "2",
                               "--zr", "0.05", "--samples", "16384"});
  CHECK(rc == 0);
  const auto j = json::parse(slurp(path));
  CHECK(j["m"] == 2);
  CHECK(j["seed"] == 7);
  CHECK(j["estimate"].get<double>() < 0.0);
  CHECK(j["stderr"].get<double>() > 0.0);
  std::remove(path.c_str());
}

TEST_CASE("byte-identical reruns, independent of worker count") {
  const auto p1 = temp_path("repro1"), p2 = temp_path("repro2"), p3 = temp_path("repro3");
  const std::vector<std::string> base{"--seed", "99", "coeff", "bm", "--m", "2",
                                      "--zr", "0.05", "--samples", "65536"};
  auto with_out = [&](const std::string& path, const std::string& workers) {
    std::vector<std::string> args{"--out", path, "--workers", workers};
    args.insert(args.end(), base.begin(), base.end());
    return args;
  };
  CHECK(harness::run(with_out(p1, "1")) == 0);
  CHECK(harness::run(with_out(p2, "1")) == 0);
  CHECK(harness::run(with_out(p3, "4")) == 0);
  CHECK(slurp(p1) == slurp(p2));
  CHECK(slurp(p1) == slurp(p3));
  std::remove(p1.c_str());
  std::remove(p2.c_str());
  std::remove(p3.c_str());
}

TEST_CASE("effective zhat subcommand matches the closed form") {
  const auto path = temp_path("zhat");
  CHECK(harness::run({"--out", path, "effective", "zhat", "--model", "penetrable",
                      "--zR", "1", "--zr", "0.1", "--L", "20", "--boundary",
                      "free"}) == 0);
  const auto j = json::parse(slurp(path));
  CHECK(j["zhat"]["value"].get<double>() == Catch::Approx(0.5726228529569878));
  std::remove(path.c_str());
}

TEST_CASE("config file provides defaults, flags override") {
  const std::string cfg_path = temp_path("cfg.ini");
  {
    std::ofstream f(cfg_path);
    f << "seed=123\n";
  }
  const auto path = temp_path("cfgout");
  CHECK(harness::run({"--config", cfg_path, "--out", path, "coeff", "bm", "--m", "1",
                      "--zr", "0.05"}) == 0);
  CHECK(json::parse(slurp(path))["seed"] == 123);
  CHECK(harness::run({"--config", cfg_path, "--seed", "7", "--out", path, "coeff",
                      "bm", "--m", "1", "--zr", "0.05"}) == 0);
  CHECK(json::parse(slurp(path))["seed"] == 7);
  std::remove(cfg_path.c_str());
  std::remove(path.c_str());
}
