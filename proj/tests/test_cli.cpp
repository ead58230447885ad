#include <doctest.h>

#include <algorithm>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iterator>
#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "cli.hpp"

using namespace rfcw::cli;

namespace {

struct Result {
  int code;
  std::string out;
  std::string err;
};

Result run(const std::vector<std::string>& args) {
  std::ostringstream out;
  std::ostringstream err;
  const int code = dispatch(args, out, err);
  return {code, out.str(), err.str()};
}

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

void write_file(const std::string& path, const std::string& text) { std::ofstream(path) << text; }

}  // namespace

TEST_CASE("analyze prints the minima of the zero-field model") {
  const auto r = run({"analyze", "--nu", "dirac 0.0", "--beta", "2"});
  REQUIRE(r.code == kExitOk);
  const auto doc = nlohmann::json::parse(r.out);
  CHECK(doc["phase"] == "ferromagnetic");
  REQUIRE(doc["minima"].size() == 2);
  CHECK(doc["minima"][1]["m"].get<double>() == doctest::Approx(0.957504).epsilon(1e-6));
  CHECK(doc["minima"][1]["broadness"] == "inf");
  CHECK(r.err.find("ferromagnetic") != std::string::npos);
}

TEST_CASE("usage errors exit with code 2") {
  CHECK(run({"exact", "--n", "0", "--nu", "dirac 0", "--beta", "1"}).code == kExitUsage);
  CHECK(run({"analyze", "--nu", "dirac 0", "--beta", "1", "--bogus"}).code == kExitUsage);
  CHECK(run({}).code == kExitUsage);
  CHECK(run({"analyze", "--nu", "cauchy 0 1", "--beta", "1"}).code == kExitUsage);
  CHECK(run({"analyze", "--nu", "dirac 0", "--beta", "-1"}).code == kExitUsage);
  CHECK(run({"verify", "--experiment", "nope"}).code == kExitUsage);
  CHECK(run({"verify", "--experiment", "hs_consistency", "--config", "/nonexistent.cfg"}).code == kExitUsage);
  CHECK(run({"mc", "--n", "10", "--nu", "dirac 0", "--beta", "1", "--sweeps", "5", "--burn-in", "10"}).code ==
        kExitUsage);
}

TEST_CASE("version and help") {
  const auto v = run({"--version"});
  CHECK(v.code == kExitOk);
  CHECK(v.out.find("config schema 1") != std::string::npos);
  CHECK(run({"--help"}).code == kExitOk);
}

TEST_CASE("verify writes an identical report on every run") {
  const std::string cfg = "rfcw_cli_test.cfg";
  write_file(cfg, "# small case\nn = 120\npoints = 301\n");
  const std::string a = "rfcw_cli_test_a.json";
  const std::string b = "rfcw_cli_test_b.json";
  const auto ra = run({"verify", "--experiment", "hs_consistency", "--config", cfg, "--out", a});
  const auto rb = run({"verify", "--experiment", "hs_consistency", "--config", cfg, "--out", b});
  CHECK(ra.code == kExitOk);
  CHECK(rb.code == kExitOk);
  CHECK(ra.out.find("PASS") != std::string::npos);
  const auto text = slurp(a);
  CHECK_FALSE(text.empty());
  CHECK(text == slurp(b));
  const auto doc = nlohmann::json::parse(text);
  CHECK(doc["experiment"] == "hs_consistency");
  CHECK(doc["inputs"]["n"] == 120);
  CHECK(doc["passed"] == true);
  std::remove(a.c_str());
  std::remove(b.c_str());

  write_file(cfg, "n = 120\npoints = 301\ntolerance = 1e-300\n");
  CHECK(run({"verify", "--experiment", "hs_consistency", "--config", cfg}).code == kExitFailed);
  write_file(cfg, "n = 120\nunknown_key = 1\n");
  CHECK(run({"verify", "--experiment", "hs_consistency", "--config", cfg}).code == kExitUsage);
  std::remove(cfg.c_str());
}

TEST_CASE("exact output") {
  const auto r = run({"exact", "--n", "4", "--nu", "dirac 0", "--beta", "1"});
  REQUIRE(r.code == kExitOk);
  const auto doc = nlohmann::json::parse(r.out);
  REQUIRE(doc["pmf"].size() == 5);
  CHECK(doc["pmf"][0][0] == -4);
  CHECK(doc["pmf"][4][0] == 4);
}

TEST_CASE("mc writes little-endian int32 samples") {
  const std::string base = "rfcw_cli_test_mc";
  const auto r = run({"mc", "--n", "20", "--nu", "two_point 0.3 0.5", "--beta", "1.2", "--sweeps", "60",
                      "--burn-in", "10", "--thin", "5", "--chains", "2", "--out", base + ".json"});
  REQUIRE(r.code == kExitOk);
  const auto doc = nlohmann::json::parse(slurp(base + ".json"));
  const std::size_t count = doc["samples"].get<std::size_t>();
  CHECK(count == 20);
  const std::string bin_path = doc["samples_path"].get<std::string>();
  const auto bytes = slurp(bin_path);
  REQUIRE(bytes.size() == 4 * count);
  std::size_t total = 0;
  for (const auto& entry : doc["summary"]["histogram"]) total += entry[1].get<std::size_t>();
  CHECK(total == count);
  for (std::size_t i = 0; i < count; ++i) {
    std::uint32_t u = 0;
    for (int b = 3; b >= 0; --b) u = (u << 8) | static_cast<unsigned char>(bytes[4 * i + b]);
    const auto s = static_cast<std::int32_t>(u);
    CHECK(s >= -20);
    CHECK(s <= 20);
    CHECK((s + 20) % 2 == 0);
  }
  std::remove(bin_path.c_str());
  std::remove((base + ".json").c_str());
}

TEST_CASE("rates CSV") {
  const auto r = run({"rates", "--nu", "dirac 0.2", "--beta", "0.8", "--x", "0,0.5,1"});
  REQUIRE(r.code == kExitOk);
  std::istringstream lines(r.out);
  std::string line;
  std::getline(lines, line);
  CHECK(line == "x,ldp_rate,mdp_rate");
  int rows = 0;
  while (std::getline(lines, line)) {
    ++rows;
    CHECK(std::count(line.begin(), line.end(), ',') == 2);
  }
  CHECK(rows == 3);
  const auto full = run({"rates", "--nu", "dirac 0.2", "--beta", "0.8"});
  CHECK(std::count(full.out.begin(), full.out.end(), '\n') == 22);
}

TEST_CASE("number formatting round-trips") {
  for (double v : {0.1, 1.0 / 3.0, -2.5e-300, 6.02214076e23, 0.95750402407726876}) {
    CHECK(std::strtod(format_double(v).c_str(), nullptr) == v);
  }
  CHECK(format_double(1.0 / 0.0) == "inf");
  const nlohmann::json doc = {{"a", 0.1}, {"b", {1, 2}}, {"c", nlohmann::json::object()}};
  const auto text = dump_json(doc);
  CHECK(text.find("0.10000000000000001") != std::string::npos);
  CHECK(nlohmann::json::parse(text) == doc);
}
