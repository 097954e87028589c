#include <filesystem>
#include <fstream>
#include <sstream>

#include "cli.hpp"
#include "doctest.h"
#include "json.hpp"
#include "scenario_io.hpp"
#include "socdispatch/error.hpp"

using namespace socdispatch;
namespace fs = std::filesystem;

namespace {

std::string fixture(const std::string& name) { return std::string(SOCDISPATCH_FIXTURE_DIR) + "/" + name; }

struct Run {
  int code;
  std::string out, err;
};

Run run(std::vector<std::string> args, cli::Environment env = {}) {
  std::ostringstream out, err;
  const int code = cli::run(args, out, err, env);
  return {code, out.str(), err.str()};
}

std::string slurp(const fs::path& p) {
  std::ifstream f(p);
  std::ostringstream s;
  s << f.rdbuf();
  return s.str();
}

fs::path scratch(const std::string& name) {
  auto p = fs::temp_directory_path() / ("socdispatch_test_" + name);
  fs::remove_all(p);
  return p;
}

}  // namespace

TEST_CASE("scenario files round-trip") {
  for (const char* name : {"os1.json", "bid_b.json", "crafted_rolling.json", "idle.json"}) {
    const auto doc = io::load_scenario(fixture(name));
    const auto text = io::dump_scenario(doc);
    const auto again = io::parse_scenario(text);
    CHECK(io::dump_scenario(again) == text);
    CHECK(again.scenario.demand == doc.scenario.demand);
  }
  auto doc = io::load_scenario(fixture("os1.json"));
  doc.scenario.fleet[0].gamma = 1;
  doc.scenario.options.gamma = 0;
  doc.seed = 7;
  const auto j = io::to_json(doc);
  CHECK(j["storages"][0]["gamma"] == 2);
  CHECK(j["options"]["gamma"] == 1);
  const auto back = io::parse_scenario(j.dump());
  CHECK(back.scenario.fleet[0].gamma == std::optional<std::size_t>(1));
  CHECK(back.seed == std::optional<std::uint64_t>(7));
}

TEST_CASE("scenario parse errors name the place") {
  try {
    io::load_scenario(fixture("malformed.json"));
    FAIL("expected a parse error");
  } catch (const ValidationError& e) {
    CHECK(std::string(e.what()).find("line 3") != std::string::npos);
  }
  try {
    io::load_scenario(fixture("bad_field.json"));
    FAIL("expected a field error");
  } catch (const ValidationError& e) {
    CHECK(std::string(e.what()).find("storages[0].spec.gCmax") != std::string::npos);
  }
  CHECK_THROWS_AS(io::parse_scenario(R"({"horizon": 1, "demand": [0]})"), ValidationError);
  CHECK_THROWS_AS(io::parse_scenario(R"({"horizon": 2, "demand": [0], "storages": []})"), ValidationError);
  CHECK_THROWS_AS(io::load_scenario(fixture("missing.json")), ValidationError);
}

TEST_CASE("validate command") {
  auto a = run({"validate", fixture("os1.json")});
  CHECK(a.code == 0);
  CHECK(a.out.find("EDCR: yes") != std::string::npos);
  auto b = run({"validate", fixture("bid_b.json")});
  CHECK(b.code == 0);
  CHECK(b.out.find("EDCR: no (ratios 2") != std::string::npos);
  auto m = run({"validate", fixture("malformed.json")});
  CHECK(m.code == 2);
  CHECK(m.err.find("line 3") != std::string::npos);
}

TEST_CASE("clear command writes the run directory") {
  const auto dir = scratch("clear");
  auto r = run({"clear", fixture("os1.json"), "--out", dir.string()});
  REQUIRE(r.code == 0);
  const auto summary = nlohmann::json::parse(slurp(dir / "summary.json"));
  CHECK(summary["objective"].get<double>() == 5.0);
  CHECK(summary["lambda"][0].get<double>() == 10.0);
  CHECK(summary["lambda"][1].get<double>() == 15.0);
  CHECK(slurp(dir / "dispatch.csv") == "t,id,gC,gD,e\n1,es1,1,0,5\n2,es1,0,1,4\n");
  CHECK(slurp(dir / "prices.csv") == "t,price\n1,10\n2,15\n");
  CHECK(slurp(dir / "duals.csv").rfind("t,id,lambda,phi,muC_lo,muC_hi,muD_lo,muD_hi\n", 0) == 0);

  auto o = run({"clear", fixture("os1.json"), "--mode", "oracle"});
  CHECK(o.code == 0);
  CHECK(o.out.find("objective 5\n") != std::string::npos);

  auto pre = run({"clear", fixture("bid_b.json")});
  CHECK(pre.code == 3);
  CHECK(pre.err.find("EDCR required; use --mode oracle") != std::string::npos);
  CHECK(run({"clear", fixture("bid_b.json"), "--mode", "oracle"}).code == 0);
  CHECK(run({"clear", fixture("os1.json"), "--mode", "fast"}).code == 2);
  CHECK(run({"clear"}).code == 2);
  CHECK(run({"clear", fixture("os1.json"), "--gamma", "0"}).code == 2);
}

TEST_CASE("price and loc commands") {
  auto lmp = run({"price", fixture("os1.json")});
  CHECK(lmp.code == 0);
  CHECK(lmp.out == "t,price\n1,10\n2,15\n");
  auto tl = run({"price", fixture("os1.json"), "--scheme", "tlmp"});
  CHECK(tl.out == "t,id,charge,discharge\n1,es1,10,10\n2,es1,15,15\n");

  auto loc = run({"loc", fixture("os1.json")});
  CHECK(loc.code == 0);
  CHECK(loc.out == "id,Q,payment,bid_cost,loc\nes1,0,5,5,0\n");
  CHECK(run({"loc", fixture("idle.json")}).out == "id,Q,payment,bid_cost,loc\nes1,0,0,0,0\n");

  auto rl = run({"loc", fixture("crafted_rolling.json"), "--scheme", "r-lmp", "--forecast", "additive:13"});
  CHECK(rl.code == 0);
  CHECK(rl.out.find("es1,0,-25,-20,5\n") != std::string::npos);
  const auto dir = scratch("loc");
  auto rt = run({"loc", fixture("crafted_rolling.json"), "--scheme", "r-tlmp", "--forecast", "additive:13",
                 "--end-state", "--out", dir.string()});
  CHECK(rt.code == 0);
  const auto summary = nlohmann::json::parse(slurp(dir / "summary.json"));
  CHECK(std::abs(summary["max_loc"].get<double>()) <= 1e-9);
  CHECK(fs::exists(dir / "prices.csv"));

  CHECK(run({"price", fixture("os1.json"), "--scheme", "dual"}).code == 2);
  CHECK(run({"price", fixture("os1.json"), "--scheme", "r-lmp", "--forecast", "gaussian"}).code == 2);
}

TEST_CASE("roll command") {
  const auto dir = scratch("roll");
  auto r = run({"roll", fixture("os1.json"), "--window", "1", "--out", dir.string()});
  CHECK(r.code == 0);
  CHECK(slurp(dir / "dispatch.csv") == "t,id,gC,gD,e\n1,es1,1,0,5\n2,es1,0,1,4\n");
  const auto summary = nlohmann::json::parse(slurp(dir / "summary.json"));
  CHECK(summary["window"] == 1);
  CHECK(summary["complete"] == true);

  auto noisy = [&](const char* seed) {
    return run({"roll", fixture("crafted_rolling.json"), "--forecast", "additive", "--sigma", "1", "--seed", seed}).out;
  };
  CHECK(noisy("3") == noisy("3"));
}

TEST_CASE("demo-affine command") {
  auto b = run({"demo-affine", fixture("bid_b.json"), "--points", "11"});
  CHECK(b.code == 0);
  CHECK(b.out.find("-1,6,-1,1\n") != std::string::npos);
  auto two = run({"demo-affine", fixture("os1.json"), "--points", "2"});
  CHECK(two.out == "g,cost,second_difference,violation\n-4,20,,\n6,30,,\n");
  CHECK(run({"demo-affine", fixture("os1.json"), "--storage", "nope"}).code == 2);
}

TEST_CASE("compare-oracle command") {
  auto a = run({"compare-oracle", fixture("os1.json")});
  CHECK(a.code == 0);
  CHECK(a.out.find("equivalent yes") != std::string::npos);
  auto b = run({"compare-oracle", fixture("bid_b.json")});
  CHECK(b.code == 0);
  CHECK(b.out.find("oracle only") != std::string::npos);
  CHECK(run({"compare-oracle", fixture("oversized.json")}).code == 4);
}

TEST_CASE("tolerance override and number format") {
  const auto t = cli::parse_tolerances("1e-6");
  CHECK(t.feas == 1e-6);
  CHECK(t.gap == 1e-6);
  const auto u = cli::parse_tolerances("gap=1e-5,feas=1e-9");
  CHECK(u.gap == 1e-5);
  CHECK(u.feas == 1e-9);
  CHECK(u.comp == lp::Tolerances{}.comp);
  CHECK_THROWS_AS(cli::parse_tolerances("tight"), ValidationError);
  CHECK_THROWS_AS(cli::parse_tolerances("slack=1"), ValidationError);
  CHECK(run({"clear", fixture("os1.json")}, {std::string("bogus")}).code == 2);
  CHECK(run({"clear", fixture("os1.json")}, {std::string("1e-9")}).code == 0);

  CHECK(cli::format_number(1.0 / 3.0) == "0.333333333333");
  CHECK(cli::format_number(-0.0) == "0");
  CHECK(cli::format_number(15.0) == "15");
}
