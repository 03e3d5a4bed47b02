#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <json.hpp>

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <string>
#include <sys/wait.h>

using json = nlohmann::json;

namespace {

struct RunResult {
  int exit_code = -1;
  std::string out;
};

RunResult run(const std::string& args) {
  std::string cmd = std::string(SUBFINSLER_CLI_PATH) + " " + args + " 2>/dev/null";
  FILE* p = popen(cmd.c_str(), "r");
  REQUIRE(p != nullptr);
  RunResult r;
  char buf[4096];
  size_t n;
  while ((n = fread(buf, 1, sizeof(buf), p)) > 0) r.out.append(buf, n);
  int status = pclose(p);
  r.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return r;
}

std::string write_temp_config(const std::string& name, const std::string& body) {
  std::string path = std::string("/tmp/subfinsler_cli_") + name + ".json";
  std::ofstream f(path);
  f << body;
  return path;
}

}  // namespace

TEST_CASE("kernel-grid with the default config emits a CSV table") {
  auto r = run("kernel-grid");
  CHECK(r.exit_code == 0);
  CHECK(r.out.rfind("r,s,t,value,error_estimate\n", 0) == 0);
  // default grid: 2 x 2 x 1 points
  int rows = 0;
  for (char c : r.out)
    if (c == '\n') ++rows;
  CHECK(rows == 5);
  CHECK(r.out.find("ERROR") == std::string::npos);
}

TEST_CASE("kernel-grid with an empty grid emits only the header") {
  auto cfg = write_temp_config("empty",
      R"({"space":{"m":1,"k":1},"grid":{"r":[],"s":[],"t":[]}})");
  auto r = run("kernel-grid --config " + cfg);
  CHECK(r.exit_code == 0);
  CHECK(r.out == "r,s,t,value,error_estimate\n");
}

TEST_CASE("an invalid norm kind is a usage error") {
  auto cfg = write_temp_config("badnorm",
      R"({"space":{"m":1,"k":1,"phi":{"kind":"mystery"}}})");
  auto r = run("kernel-grid --config " + cfg);
  CHECK(r.exit_code == 2);
}

TEST_CASE("a missing config file is a usage error") {
  auto r = run("constants --config /tmp/definitely_missing_subfinsler.json");
  CHECK(r.exit_code == 2);
}

TEST_CASE("constants reports the closed-form data as JSON") {
  auto r = run("constants");
  CHECK(r.exit_code == 0);
  json j = json::parse(r.out);
  CHECK(j["m"] == 2);
  CHECK(j["k"] == 1);
  CHECK(j["Q"] == doctest::Approx(4.0));
  CHECK(j["branch"] == "p_ne_Q");
  CHECK(j["sigma_alpha_p"].get<double>() > 0.0);
  CHECK(j["c_alpha_p"].get<double>() > 0.0);
  // alpha = 1, p = 2: the Gamma-function route must agree
  double route = j["c12_gamma_route"].get<double>();
  CHECK(route == doctest::Approx(j["c_alpha_p"].get<double>()).epsilon(1e-11));
}

TEST_CASE("constants selects the logarithmic branch when p equals Q") {
  auto cfg = write_temp_config("logbranch",
      R"({"space":{"m":2,"k":1,"alpha":1.0,"p":4.0}})");
  auto r = run("constants --config " + cfg);
  CHECK(r.exit_code == 0);
  json j = json::parse(r.out);
  CHECK(j["branch"] == "p_eq_Q");
}

TEST_CASE("constants --print-defaults shows the config schema") {
  auto r = run("constants --print-defaults");
  CHECK(r.exit_code == 0);
  json j = json::parse(r.out);
  CHECK(j.contains("space"));
  CHECK(j.contains("grid"));
  CHECK(j["space"].contains("phi"));
}

TEST_CASE("verify runs are deterministic for a fixed seed") {
  std::string args = "verify --checks constants_identity --jobs 1 --seed 7";
  auto a = run(args);
  auto b = run(args);
  CHECK(a.exit_code == 0);
  // the report is deterministic apart from the wall-clock runtime fields
  json ja = json::parse(a.out), jb = json::parse(b.out);
  for (auto* doc : {&ja, &jb})
    for (auto& c : (*doc)["checks"]) c.erase("runtime_ms");
  CHECK(ja.dump() == jb.dump());
  json j = json::parse(a.out);
  CHECK(j["seed"] == 7);
  CHECK(j["all_pass"] == true);
  CHECK(j["checks"].size() == 1);
  CHECK(j["checks"][0]["name"] == "constants_identity");
  CHECK(j["checks"][0]["pass"] == true);
}

TEST_CASE("verify report lists checks in sorted order") {
  auto r = run("verify --checks duality,constants_identity --jobs 2");
  CHECK(r.exit_code == 0);
  json j = json::parse(r.out);
  REQUIRE(j["checks"].size() == 2);
  CHECK(j["checks"][0]["name"] == "constants_identity");
  CHECK(j["checks"][1]["name"] == "duality");
}

TEST_CASE("an unknown check name is a usage error") {
  auto r = run("verify --checks no_such_check");
  CHECK(r.exit_code == 2);
}

TEST_CASE("fault injection makes the constants identity fail") {
  auto r = run("verify --checks constants_identity --corrupt-sigma 1.01");
  CHECK(r.exit_code == 1);
  json j = json::parse(r.out);
  CHECK(j["all_pass"] == false);
  CHECK(j["checks"][0]["pass"] == false);
  CHECK(j["checks"][0]["residual"].get<double>() > 1.0);
}

TEST_CASE("missing subcommand is a usage error") {
  auto r = run("");
  CHECK(r.exit_code == 2);
}
