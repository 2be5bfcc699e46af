#include <catch2/catch_amalgamated.hpp>

#include <sys/wait.h>

#include <array>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

namespace fs = std::filesystem;
using Catch::Matchers::ContainsSubstring;

namespace {

struct Result {
  int code = -1;
  std::string out;
};

std::string binary() {
  const char* p = std::getenv("GTAP_CLI");
  REQUIRE(p != nullptr);
  return p;
}

Result run(const std::string& args) {
  Result r;
  const std::string cmd = binary() + " " + args + " 2>&1";
  FILE* pipe = popen(cmd.c_str(), "r");
  REQUIRE(pipe != nullptr);
  std::array<char, 4096> buf{};
  while (fgets(buf.data(), buf.size(), pipe)) r.out += buf.data();
  const int status = pclose(pipe);
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return r;
}

fs::path scratch(const std::string& name) {
  const auto dir = fs::temp_directory_path() / ("gtap_cli_" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::stringstream s;
  s << in.rdbuf();
  return s.str();
}

void write(const fs::path& p, const std::string& text) { std::ofstream(p) << text; }

std::size_t data_lines(const std::string& csv) {
  std::size_t n = 0;
  std::istringstream in(csv);
  for (std::string line; std::getline(in, line);)
    if (!line.empty() && line[0] != '#') ++n;
  return n;
}

}  // namespace

TEST_CASE("check-scheme prints the classification") {
  auto r = run("check-scheme GSA342");
  CHECK(r.code == 0);
  CHECK_THAT(r.out, ContainsSubstring("stages   4"));
  CHECK_THAT(r.out, ContainsSubstring("GSA      yes"));
  CHECK_THAT(r.out, ContainsSubstring("order 2  yes"));
  r = run("check-scheme ssp2332");
  CHECK(r.code == 0);
  CHECK_THAT(r.out, ContainsSubstring("GSA      no"));
  CHECK_THAT(r.out, ContainsSubstring("ISA      yes"));
  r = run("check-scheme nosuch");
  CHECK(r.code == 2);
  CHECK_THAT(r.out, ContainsSubstring("GSA342"));
}

TEST_CASE("missing subcommand or config fails without touching the output") {
  const auto dir = scratch("missing");
  CHECK(run("").code != 0);
  const auto out = dir / "out";
  const auto r = run("forward --config " + (dir / "absent.json").string() + " --out " + out.string());
  CHECK(r.code == 2);
  CHECK_THAT(r.out, ContainsSubstring("absent.json"));
  CHECK_FALSE(fs::exists(out));
}

TEST_CASE("malformed config names the file and the key") {
  const auto dir = scratch("badkey");
  const auto cfg = dir / "bad.json";
  write(cfg, R"({"scheme": "GSA342", "cells": 2})");
  const auto out = dir / "out";
  auto r = run("forward --config " + cfg.string() + " --out " + out.string());
  CHECK(r.code == 2);
  CHECK_THAT(r.out, ContainsSubstring("bad.json"));
  CHECK_THAT(r.out, ContainsSubstring("'cells'"));
  CHECK_FALSE(fs::exists(out));

  write(cfg, R"({"eps": 0, "phi": 0.5})");
  r = run("forward --config " + cfg.string() + " --out " + out.string());
  CHECK(r.code == 2);
  CHECK_THAT(r.out, ContainsSubstring("phi"));
  CHECK_FALSE(fs::exists(out));
}

TEST_CASE("forward writes tables with a provenance header") {
  const auto dir = scratch("forward");
  const auto cfg = dir / "run.json";
  write(cfg, R"({"scheme": "SSP2332", "eps": 0.5, "n_steps": 8, "cells": 10, "experiment": {"control": 0.1}})");
  const auto out = dir / "out";
  const auto r = run("forward --config " + cfg.string() + " --out " + out.string());
  REQUIRE(r.code == 0);
  for (const char* f : {"state.csv", "adjoint.csv", "control.csv", "summary.txt"}) CHECK(fs::exists(out / f));
  const auto state = slurp(out / "state.csv");
  CHECK(state.rfind("# ", 0) == 0);
  CHECK_THAT(state, ContainsSubstring("SSP2332"));
  CHECK(data_lines(state) == 1 + 9 * 10);
  CHECK(data_lines(slurp(out / "control.csv")) == 1 + 8);
}

TEST_CASE("order study output is deterministic") {
  const auto dir = scratch("order");
  const auto a = dir / "a", b = dir / "b";
  REQUIRE(run("order-study --scheme SSP2332 --out " + a.string()).code == 0);
  REQUIRE(run("order-study --scheme SSP2332 --workers 2 --out " + b.string()).code == 0);
  const auto csv = slurp(a / "order.csv");
  CHECK(data_lines(csv) == 1 + 5);
  CHECK(csv == slurp(b / "order.csv"));
}
