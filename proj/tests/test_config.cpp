#include "doctest.h"

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "coarsent/config.hpp"
#include "coarsent/error.hpp"
#include "coarsent/presets.hpp"
#include "coarsent/report.hpp"
#include "coarsent/runner.hpp"

using namespace coarsent;

namespace {

Json small_doc() {
  return Json::parse(R"({
    "schema": "coarsent.experiment/1",
    "name": "small",
    "seed": 3,
    "budget": 100000,
    "jobs": [{
      "type": "entropy", "label": "dbl",
      "space": {"kind": "euclidean", "q": 1},
      "map": {"kind": "linear", "matrix": [["2"]]},
      "x0": ["0"],
      "schedule": {"cells": [
        {"delta": "2", "R": ["8", "16"], "n": [4, 8], "lower": "FINAL_TERM", "upper": "SHADOW_HULL", "spacing": "1"}
      ]}
    }]
  })");
}

std::string slurp(const std::string& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

TEST_CASE("numbers") {
  CHECK(parse_number(Json(1.5)) == 1.5);
  CHECK(parse_number(Json("0.25")) == 0.25);
  CHECK(parse_number(Json("1/3")) == doctest::Approx(1.0 / 3.0));
  CHECK(parse_number(Json("2e-5")) == 2e-5);
  CHECK_THROWS_AS(parse_number(Json("abc")), InvalidInput);
  CHECK_THROWS_AS(parse_number(Json("1/0")), InvalidInput);
  CHECK_THROWS_AS(parse_number(Json(true)), InvalidInput);
}

TEST_CASE("spaces, maps and points") {
  const auto cone = parse_space(Json::parse(R"({"kind":"cone","q":2,"base":{"kind":"cantor_arc","levels":3}})"));
  CHECK(cone.kind() == Space::Kind::Cone);
  CHECK(cone.cone_base().size() == 8);
  const auto hp = parse_space(Json::parse(R"({"kind":"halfplane"})"));
  CHECK(parse_point(Json("origin"), hp) == Point({0.0, 0.0}));
  CHECK(parse_point(Json::parse(R"({"chart": 0, "coords": ["1", 2]})"), hp) == Point({1.0, 2.0}));
  CHECK_THROWS_AS(parse_point(Json::parse(R"([0, -1])"), hp), InvalidInput);

  const auto e1 = Space::euclidean(1);
  const auto it = parse_map(Json::parse(R"({"kind":"iterate","k":3,"base":{"kind":"linear","matrix":[[2]]}})"), e1);
  CHECK(it.apply(Point({1.0})).coords[0] == 8.0);
  const auto d = parse_map(Json::parse(R"({"kind":"linear","matrix":[[2,1],[0,3]],
                                           "declared":{"big_lambda":"6"}})"),
                           Space::euclidean(2));
  CHECK(*d.big_lambda() == 6.0);
  CHECK_THROWS_AS(parse_map(Json::parse(R"({"kind":"warp"})"), e1), InvalidInput);
  CHECK_THROWS_AS(parse_map(Json::parse(R"({"kind":"linear","matrix":[[1,2]]})"), e1), InvalidInput);

  const auto L = parse_control(Json::parse(R"({"kind":"affine","a":"2","b":"1"})"));
  CHECK(L(3.0) == 7.0);
}

TEST_CASE("config validation") {
  const auto cfg = parse_config(small_doc());
  CHECK(cfg.name == "small");
  CHECK(cfg.seed == 3);
  CHECK(cfg.budget == 100000);
  REQUIRE(cfg.jobs.size() == 1);
  CHECK(std::string(job_type_name(cfg.jobs[0].task)) == "entropy");

  auto bad = small_doc();
  bad["schema"] = "other/2";
  CHECK_THROWS_AS(parse_config(bad), InvalidInput);
  bad = small_doc();
  bad["jobs"][0]["extra"] = 1;
  CHECK_THROWS_AS(parse_config(bad), InvalidInput);
  bad = small_doc();
  bad["jobs"][0]["schedule"]["cells"].push_back(bad["jobs"][0]["schedule"]["cells"][0]);
  bad["jobs"][0]["schedule"]["cells"][1]["delta"] = "1";
  CHECK_THROWS_AS(parse_config(bad), InvalidInput);
  bad = small_doc();
  bad["budget"] = 0;
  CHECK_THROWS_AS(parse_config(bad), InvalidInput);
  bad = small_doc();
  bad["jobs"] = Json::array();
  CHECK_THROWS_AS(parse_config(bad), InvalidInput);
  bad = small_doc();
  bad["jobs"][0]["schedule"]["cells"][0]["lower"] = "NOPE";
  CHECK_THROWS_AS(parse_config(bad), InvalidInput);
}

TEST_CASE("budget override") {
  auto cfg = parse_config(small_doc());
  apply_budget(cfg, 77);
  CHECK(cfg.budget == 77);
  CHECK(std::get<EntropyJob>(cfg.jobs[0].task).schedule.options.budget == 77);
}

TEST_CASE("config hash") {
  const auto a = config_hash(small_doc());
  CHECK(a.size() == 16);
  CHECK(a == config_hash(small_doc()));
  auto other = small_doc();
  other["seed"] = 4;
  CHECK(a != config_hash(other));
}

TEST_CASE("csv formatting") {
  CHECK(format_number(3.0) == "3");
  CHECK(format_number(0.5) == "0.5");
  CountRecord r;
  r.n = 4;
  r.delta = 2;
  r.R = 8;
  r.strategy = Strategy::FinalTerm;
  r.separated_lower = 12;
  CHECK(to_csv({r}) == std::string(kCsvHeader) + "\n4,2,8,FINAL_TERM,12,\n");
  CHECK(std::string(kCsvHeader) == "n,delta,R,strategy,separated_lower,spanning_upper");
}

TEST_CASE("runner writes deterministic files") {
  const auto dir = std::filesystem::temp_directory_path() / "coarsent_test_runner";
  std::filesystem::remove_all(dir);
  const auto cfg = parse_config(small_doc());
  RunOptions opts;
  opts.output_dir = dir.string();
  const auto r1 = run(cfg, opts);
  CHECK(r1.exit_code == kExitOk);
  REQUIRE(r1.files.size() == 2);
  const auto csv1 = slurp(r1.files[0]);
  const auto r2 = run(cfg, opts);
  CHECK(slurp(r2.files[0]) == csv1);
  CHECK(csv1.rfind(kCsvHeader, 0) == 0);
  const auto report = Json::parse(slurp(r1.files[1]));
  CHECK(report["config_hash"] == config_hash(small_doc()));
  REQUIRE(r1.find("dbl"));
  CHECK(r1.find("dbl")->entropy->extrapolated_lower);

  opts.pipeline = Pipeline::Bcd;
  CHECK_THROWS_AS(run(cfg, opts), InvalidInput);

  auto tiny = cfg;
  apply_budget(tiny, 5);
  opts.pipeline = Pipeline::All;
  const auto r3 = run(tiny, opts);
  CHECK(r3.budget_exhausted);
  CHECK(r3.exit_code == kExitBudget);
  std::filesystem::remove_all(dir);
}

TEST_CASE("every preset parses and round-trips") {
  CHECK(preset_ids().size() == 12);
  for (const auto& id : preset_ids()) {
    CAPTURE(id);
    const auto doc = preset_config(id);
    const auto cfg = parse_config(doc);
    CHECK(cfg.preset == id);
    CHECK(parse_config(Json::parse(doc.dump(2))).source == doc);
    CHECK_FALSE(preset_description(id).empty());
    CHECK_FALSE(preset_expectation(id).empty());
  }
  CHECK_FALSE(is_preset("NOPE"));
  CHECK_THROWS_AS(preset_config("NOPE"), InvalidInput);
}
