#include <doctest.h>

#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "cli.hpp"

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

struct Result {
  int code;
  std::string out, err;
};

Result run(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int code = froglab::cli::run(args, out, err);
  return {code, out.str(), err.str()};
}

std::string slurp(const fs::path& p) {
  std::ifstream f(p);
  std::stringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

fs::path scratch(const std::string& name) {
  const auto dir = fs::temp_directory_path() / "froglab_cli_test";
  fs::create_directories(dir);
  return dir / name;
}

}  // namespace

TEST_CASE("poly prints the printed forms") {
  auto r = run({"poly", "--family", "P", "--k", "3"});
  CHECK(r.code == 0);
  CHECK(r.out == "P3 = z3^3 - z1*z3^2 - 2*z2^2*z3 + 2*z1*z2*z3\n");
  r = run({"poly", "--family", "Q", "--k", "3", "--format", "json"});
  CHECK(r.code == 0);
  const auto doc = json::parse(r.out);
  CHECK(doc["schema_version"] == froglab::cli::kSchemaVersion);
  CHECK(doc["body"]["text"] == "z3^3 - z2^2*z3");
}

TEST_CASE("usage errors exit with 2") {
  CHECK(run({"params", "--bogus"}).code == 2);
  CHECK(run({"params", "--d", "1"}).code == 2);
  CHECK(run({"params", "--p", "0.7"}).code == 2);
  CHECK(run({"params", "--p", "1/0"}).code == 2);
  CHECK(run({}).code == 2);
  CHECK(run({"frobnicate"}).code == 2);
  CHECK(run({"simulate", "--x-grid", "0.2,1.5"}).code == 2);
  CHECK(run({"poly", "--k", "0"}).code == 2);
  CHECK(run({"--help"}).code == 0);
}

TEST_CASE("params reports exact rationals") {
  const auto r = run({"params", "--d", "3", "--p", "1/3"});
  REQUIRE(r.code == 0);
  const auto body = json::parse(r.out)["body"];
  CHECK(body["exact"]["pstar"] == "2/5");
  CHECK(body["critical_drift"]["exact"] == "2/5");
  CHECK(body["pstar"].get<double>() == doctest::Approx(0.4));
}

TEST_CASE("seed precedence and reproducible bodies") {
  const std::vector<std::string> base = {"simulate", "--model", "sfm", "--d", "3", "--p", "0.1", "--depth", "5", "--reps", "500"};
  auto with = [&](std::vector<std::string> extra) {
    auto a = base;
    a.insert(a.end(), extra.begin(), extra.end());
    return run(a);
  };
  ::unsetenv("FROGLAB_SEED");
  const auto d0 = json::parse(with({}).out);
  CHECK(d0["header"]["config"]["seed"] == 0);
  CHECK(d0["header"]["config"]["seed_source"] == "default");

  ::setenv("FROGLAB_SEED", "9", 1);
  const auto e9 = json::parse(with({}).out);
  const auto f9 = json::parse(with({"--seed", "9", "--threads", "2"}).out);
  const auto f4 = json::parse(with({"--seed", "4"}).out);
  ::unsetenv("FROGLAB_SEED");
  CHECK(e9["header"]["config"]["seed_source"] == "FROGLAB_SEED");
  CHECK(f4["header"]["config"]["seed"] == 4);
  CHECK(e9["body"]["per_x"].dump() == f9["body"]["per_x"].dump());
  CHECK(e9["body"]["per_x"].dump() != f4["body"]["per_x"].dump());
  CHECK(with({"--seed", "4"}).out.size() == with({"--seed", "4"}).out.size());
  CHECK(json::parse(with({"--seed", "4"}).out)["body"].dump() == f4["body"].dump());
}

TEST_CASE("coupling and iterate write CSV with a metadata header") {
  const auto csv = scratch("patterns.csv");
  auto r = run({"coupling", "--d", "3", "--p", "1/3", "--depth", "4", "--reps", "200", "--seed", "1", "--out", csv});
  REQUIRE(r.code == 0);
  const auto text = slurp(csv);
  CHECK(text.rfind("replicate,k1_or_root,steps_used\n", 0) == 0);
  CHECK(std::count(text.begin(), text.end(), '\n') == 201);
  CHECK(json::parse(slurp(csv.string() + ".meta.json"))["header"]["config"]["seed"] == 1);

  const auto trace = scratch("trace.csv");
  r = run({"iterate", "--d", "2", "--p", "1/3", "--n", "3", "--grid-size", "16", "--out", trace});
  REQUIRE(r.code == 0);
  const auto t = slurp(trace);
  CHECK(t.rfind("n,x,value\n0,0,1\n", 0) == 0);
  CHECK(std::count(t.begin(), t.end(), '\n') == 1 + 4 * 16);
  CHECK(run({"iterate", "--n", "3"}).code == 2);
}

TEST_CASE("check and verify exit codes follow the verdict") {
  auto r = run({"check", "--name", "ad-le-a2", "--d", "3", "--n", "5", "--grid-size", "64"});
  CHECK(r.code == 0);
  CHECK(json::parse(r.out)["body"]["name"] == "ad-le-a2");
  r = run({"verify", "--suite", "self-similarity", "--d", "3", "--p", "0.1", "--reps", "3000", "--depth", "6", "--seed", "2"});
  CHECK(r.code == 0);
  const auto doc = json::parse(r.out);
  CHECK(doc["body"]["pass"] == true);
  CHECK(doc["body"]["suites"].size() == 1);
  r = run({"verify", "--suite", "binomial", "--reps", "100", "--depth", "5"});
  CHECK(r.code == 1);
  CHECK(r.err.find("fewer than 1000") != std::string::npos);
}
