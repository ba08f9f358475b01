#include <doctest.h>

#include <json.hpp>

#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "orbitspec/cli.hpp"

using namespace orbitspec;
using json = nlohmann::json;

namespace {

struct CliRun {
  int code;
  std::string out;
  std::string err;
  json report;
};

CliRun run(std::vector<std::string> args) {
  std::ostringstream out, err;
  int code = run_cli(args, out, err);
  CliRun r{code, out.str(), err.str(), json()};
  if (!r.out.empty() && r.out.front() == '{') r.report = json::parse(r.out);
  return r;
}

bool all_checks_pass(const json& report) {
  for (const auto& c : report.at("checks"))
    if (c.at("status") != "pass") return false;
  return true;
}

}  // namespace

TEST_SUITE("cli") {

TEST_CASE("value-set over a prime") {
  auto r = run({"value-set", "--poly", "n^2", "--prime", "7"});
  REQUIRE(r.code == 0);
  CHECK(r.report["schema_version"] == 1);
  CHECK(r.report["command"] == "value-set");
  CHECK(r.report["results"]["modulus"] == "7");
  CHECK(r.report["results"]["size"] == 4);
  CHECK(r.report["results"]["residues"] == json::parse("[0,1,2,4]"));
  CHECK(all_checks_pass(r.report));
}

TEST_CASE("value-set over a squarefree modulus") {
  auto r = run({"value-set", "--poly", "n^2", "--modulus", "35"});
  REQUIRE(r.code == 0);
  CHECK(r.report["results"]["size"] == 12);
  CHECK(all_checks_pass(r.report));
}

TEST_CASE("usage errors exit with code 1") {
  CHECK(run({"value-set", "--poly", "n^2"}).code == 1);
  CHECK(run({"value-set", "--poly", "n^2", "--prime", "7", "--modulus", "35"}).code == 1);
  CHECK(run({"value-set", "--poly", "n^2", "--prime", "7", "--bogus"}).code == 1);
  CHECK(run({"value-set", "--poly", "n^2", "--prime", "abc"}).code == 1);
  CHECK(run({"value-set", "--poly", "2n^2", "--prime", "7"}).code == 1);
  CHECK(run({"nosuch"}).code == 1);

  auto bare = run({});
  CHECK(bare.code == 1);
  CHECK(bare.err.find("value-set") != std::string::npos);

  auto missing = run({"value-set", "--poly", "n^2"});
  CHECK(missing.err.find("usage error") != std::string::npos);
}

TEST_CASE("help exits cleanly") {
  auto r = run({"--help"});
  CHECK(r.code == 0);
  CHECK(r.out.find("value-set") != std::string::npos);
  CHECK(r.out.find("increment") != std::string::npos);
}

TEST_CASE("deficient-primes table and scan bound") {
  auto r = run({"deficient-primes", "--poly", "n^2", "--count", "4"});
  REQUIRE(r.code == 0);
  CHECK(r.report["results"]["lambda"] == "2/3");
  REQUIRE(r.report["results"]["primes"].size() == 4);
  CHECK(r.report["results"]["primes"][0]["prime"] == "3");
  CHECK(r.report["results"]["primes"][0]["value_set_size"] == 2);
  CHECK(all_checks_pass(r.report));

  auto tight = run({"deficient-primes", "--poly", "n^2", "--count", "50", "--scan-bound", "20"});
  CHECK(tight.code == 2);
  CHECK(tight.err.find("bound exceeded") != std::string::npos);
}

TEST_CASE("counterexample blueprint with its progression table") {
  auto r = run({"counterexample", "--poly", "n^2", "--depth", "2", "--kmax", "15"});
  REQUIRE(r.code == 0);
  const auto& res = r.report["results"];
  CHECK(res["lambda"] == "2/3");
  CHECK(res["primes"] == json::parse(R"(["3","5","7"])"));
  CHECK(res["period"] == "105");
  REQUIRE(res["levels"].size() == 2);
  CHECK(res["levels"][0]["modulus"] == "3");
  CHECK(res["levels"][1]["modulus"] == "35");
  CHECK(res["levels"][1]["value_set_size"] == 12);
  CHECK(res["levels"][1]["set_size"] == 23);
  REQUIRE(res["m_table"].size() == 15);
  CHECK(res["m_table"][0]["k"] == 1);
  CHECK(res["m_table"][0]["level"] == 1);
  CHECK(res["m_table"][0]["m"] == "2");
  for (int k = 1; k <= 14; ++k) CHECK(!res["m_table"][k - 1]["m"].is_null());
  CHECK(res["m_table"][14]["m"].is_null());  // k = 15 outruns depth 2
  CHECK(all_checks_pass(r.report));
}

TEST_CASE("pinned-refute on the ambient period") {
  auto r = run({"pinned-refute", "--poly", "n^2", "--depth", "2", "--k", "1"});
  REQUIRE(r.code == 0);
  const auto& res = r.report["results"];
  CHECK(res["mode"] == "ambient-periodic");
  CHECK(res["period"] == "105");
  CHECK(res["set_size"] == 23);
  CHECK(res["refuted"] == true);
  CHECK(res["progression"]["m"] == "2");
  REQUIRE(r.report["checks"].size() == 1);
  CHECK(r.report["checks"][0]["id"] == "pattern-run-link");
  CHECK(r.report["checks"][0]["status"] == "pass");

  auto vac = run({"pinned-refute", "--poly", "n^2", "--depth", "2", "--k", "1", "--m", "0"});
  CHECK(vac.code == 0);
  CHECK(vac.report["results"]["refuted"] == false);
  CHECK(vac.report["results"].contains("covering_pair"));
  CHECK(vac.report["checks"].empty());

  CHECK(run({"pinned-refute", "--poly", "n^2", "--depth", "2", "--k", "1", "--base", "1"})
            .code == 1);
}

TEST_CASE("bogolyubov scan over a windowed set") {
  auto r = run({"bogolyubov", "--poly", "n^2", "--set", "ap:0:2:100", "--kmax", "4",
                "--radius", "5"});
  REQUIRE(r.code == 0);
  const auto& res = r.report["results"];
  CHECK(res["k"] == "2");
  REQUIRE(res["trail"].size() >= 2);
  CHECK(res["trail"][0]["k"] == "1");
  CHECK(res["trail"][0]["covered"] == false);
  CHECK(res["trail"][1]["covered"] == true);
  CHECK(all_checks_pass(r.report));

  auto full = run({"bogolyubov", "--poly", "n^2", "--set", "grid:0:40"});
  CHECK(full.report["results"]["k"] == "1");
}

TEST_CASE("bogolyubov necessity certificate") {
  auto r = run({"bogolyubov", "--necessity", "--poly", "x0; x1^2", "--bohr-alpha",
                "408/577", "--bohr-eps", "1/20", "--window-lo", "0", "--window-hi", "120",
                "--kmax", "10", "--radius", "6"});
  REQUIRE(r.code == 0);
  const auto& res = r.report["results"];
  CHECK(res["fat_eps"] == "1/5");
  CHECK(res["none_certified"] == true);
  CHECK(res["uncovered"].size() == 10);
  CHECK(res["windowed_check"]["k"].is_null());
  CHECK(all_checks_pass(r.report));

  CHECK(run({"bogolyubov", "--necessity", "--poly", "x0; x1^2"}).code == 1);
}

TEST_CASE("volspec spectrum and coverage") {
  auto r = run({"volspec", "--set", "grid:0:4:0:4", "--k", "1", "--bound", "4"});
  REQUIRE(r.code == 0);
  CHECK(r.report["results"]["dim"] == 2);
  CHECK(r.report["results"]["coverage"]["covered"] == true);
  CHECK(all_checks_pass(r.report));

  auto line = run({"volspec", "--set", "0,2,5"});
  CHECK(line.report["results"]["spectrum"] ==
        json::parse(R"(["-5","-3","-2","0","2","3","5"])"));
}

TEST_CASE("increment on a cyclic system") {
  auto r = run({"increment", "--moduli", "4", "--set", "0", "--poly", "n^2", "--eps", "0.3"});
  REQUIRE(r.code == 0);
  const auto& res = r.report["results"];
  CHECK(res["status"] == "success");
  CHECK(res["k_total"] == "4");
  CHECK(res["final_nu"].get<double>() == doctest::Approx(1.0));
  REQUIRE(res["steps"].size() == 2);
  CHECK(res["steps"][0]["k_step"] == "2");
  CHECK(res["steps"][1]["k_step"] == "2");
  CHECK(all_checks_pass(r.report));
}

TEST_CASE("increment from a blueprint system") {
  auto r = run({"increment", "--poly", "n^2", "--blueprint", "--depth", "1", "--eps", "0.3"});
  REQUIRE(r.code == 0);
  CHECK(r.report["inputs"]["blueprint"]["moduli"] == json::parse("[3]"));
  CHECK(r.report["results"]["status"] == "success");
  CHECK(all_checks_pass(r.report));

  CHECK(run({"increment", "--poly", "n^2", "--eps", "0.3"}).code == 1);
  CHECK(run({"increment", "--moduli", "4", "--set", "0", "--poly", "n^2", "--eps", "1.5"})
            .code == 1);
}

TEST_CASE("direction search over a torus") {
  auto r = run({"direction", "--gamma", "0.01", "--set", "0", "--torus", "7:2"});
  REQUIRE(r.code == 0);
  const auto& res = r.report["results"];
  CHECK(res["found"] == true);
  CHECK(res["direction"] == json::parse(R"(["1","1"])"));
  CHECK(res["union_measure"] == "1/7");
  CHECK(all_checks_pass(r.report));

  auto capped = run({"direction", "--gamma", "1e-9", "--set", "0", "--torus", "7:2"});
  CHECK(capped.code == 2);
  CHECK(capped.report["results"]["found"] == false);
  CHECK(capped.report["results"]["cap_exceeded"] == true);
}

TEST_CASE("weyl averages, psi, and thresholds") {
  auto r = run({"weyl", "--poly", "n^2", "--alpha", "1/4"});
  REQUIRE(r.code == 0);
  CHECK(r.report["results"]["period"] == "4");
  CHECK(r.report["results"]["value_re"].get<double>() == doctest::Approx(0.5));
  CHECK(r.report["results"]["value_im"].get<double>() == doctest::Approx(0.5));
  CHECK(all_checks_pass(r.report));

  auto psi = run({"weyl", "--poly", "n^2", "--psi-modulus", "4"});
  CHECK(psi.report["results"]["value"].get<double>() ==
        doctest::Approx(0.7071067811865476));

  auto hua = run({"weyl", "--poly", "n^2", "--hua-target", "0.5", "--scan-bound", "50"});
  CHECK(hua.report["results"]["m"] == 8);
  CHECK(hua.report["results"]["psi_at_m"].get<double>() == doctest::Approx(0.5));
  CHECK(hua.report["results"]["empirical"] == true);

  CHECK(run({"weyl", "--poly", "n^2"}).code == 1);
  CHECK(run({"weyl", "--poly", "n^2", "--alpha", "1/4", "--psi-modulus", "4"}).code == 1);
}

TEST_CASE("snf on matrices and coefficient matrices") {
  auto r = run({"snf", "--matrix", "2,4;6,8"});
  REQUIRE(r.code == 0);
  CHECK(r.report["results"]["invariant_factors"] == json::parse(R"(["2","4"])"));
  CHECK(all_checks_pass(r.report));

  auto p = run({"snf", "--poly", "n; 2*n^2"});
  REQUIRE(p.code == 0);
  CHECK(p.report["results"]["complexity_bound"] == "2");
  const auto& cx = p.report["results"]["smallest_factor_counterexample"];
  REQUIRE(!cx.is_null());
  CHECK(cx["gcd_value"] != cx["smallest_factor"]);
  CHECK(all_checks_pass(p.report));

  auto clean = run({"snf", "--poly", "n^2"});
  CHECK(clean.report["results"]["complexity_bound"] == "1");
  CHECK(clean.report["results"]["smallest_factor_counterexample"].is_null());

  CHECK(run({"snf"}).code == 1);
  CHECK(run({"snf", "--matrix", "1,0;0,1", "--poly", "n^2"}).code == 1);
}

TEST_CASE("text rendering flattens the report") {
  auto r = run({"value-set", "--poly", "n^2", "--prime", "7", "--format", "text"});
  REQUIRE(r.code == 0);
  CHECK(r.out.find("schema_version = 1") != std::string::npos);
  CHECK(r.out.find("results.modulus = 7") != std::string::npos);
  CHECK(r.out.find("results.size = 4") != std::string::npos);
  CHECK(r.out.find("checks[0].status = pass") != std::string::npos);

  CHECK(run({"value-set", "--poly", "n^2", "--prime", "7", "--format", "yaml"}).code == 1);
}

TEST_CASE("output file mirrors stdout") {
  std::string path = "/tmp/orbitspec_cli_test_out.json";
  auto r = run({"value-set", "--poly", "n^2", "--prime", "7", "--output", path});
  REQUIRE(r.code == 0);
  std::ifstream f(path);
  REQUIRE(f.good());
  std::stringstream ss;
  ss << f.rdbuf();
  CHECK(ss.str() == r.out);
  std::remove(path.c_str());
}

TEST_CASE("reports are deterministic and carry the seed") {
  auto a = run({"counterexample", "--poly", "n^2", "--depth", "2"});
  auto b = run({"counterexample", "--poly", "n^2", "--depth", "2"});
  CHECK(a.out == b.out);

  auto seeded = run({"value-set", "--poly", "n^2", "--prime", "7", "--seed", "42"});
  CHECK(seeded.report["seed"] == 42);
}

}  // TEST_SUITE
