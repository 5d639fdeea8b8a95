#include <string>

#include "doctest.h"
#include "reserveband/scenario.hpp"

using namespace reserveband;

namespace {

const char* kBase = R"(
[market]
mu = 0.0
sigma = 1.0
x0 = 1.2

[costs]
h = 1.0
alpha = 0.1
beta = 0.1
n = 0.5
lambda = 1.0
lambda_bar = 0.8

[policy]
a = 1.0

[simulation]
seed = 42
)";

}  // namespace

TEST_SUITE("scenario") {

TEST_CASE("parses the base scenario with defaults") {
    const auto s = parse_scenario_text(kBase, "base.scn");
    CHECK(s.market.sigma == 1.0);
    CHECK(s.market.x0 == 1.2);
    CHECK(s.costs.lambda_bar == 0.8);
    CHECK(s.floor == 1.0);
    CHECK_FALSE(s.band_override.has_value());
    CHECK(s.seed == 42);
    CHECK(s.n_paths == 100000);
    CHECK(s.dt == 1e-3);
    CHECK(s.tail_cap == 1e-4);
    CHECK(s.workers == 1);
    CHECK(s.scan_factors.size() == 5);
    CHECK(s.out_dir == "out");
    CHECK(s.source_hash.size() == 16);
}

TEST_CASE("rejects unknown keys and sections") {
    CHECK_THROWS_AS(parse_scenario_text(std::string(kBase) + "\n[market]\nsigmaa = 1\n"),
                    ScenarioError);
    CHECK_THROWS_AS(parse_scenario_text(std::string(kBase) + "\n[marketplace]\nmu = 1\n"),
                    ScenarioError);
    CHECK_THROWS_AS(parse_scenario_text("mu = 1\n"), ScenarioError);  // key before any section
}

TEST_CASE("seed is mandatory") {
    std::string no_seed(kBase);
    const auto pos = no_seed.find("seed = 42");
    no_seed.erase(pos, 9);
    CHECK_THROWS_WITH_AS(parse_scenario_text(no_seed, "x.scn"),
                         doctest::Contains("simulation.seed"), ScenarioError);
}

TEST_CASE("missing required keys are reported") {
    CHECK_THROWS_WITH_AS(parse_scenario_text("[simulation]\nseed = 1\n", "y.scn"),
                         doctest::Contains("missing required key"), ScenarioError);
}

TEST_CASE("optional keys and lists") {
    const std::string text = std::string(kBase) + R"(
n_paths = 500
dt = 0.01
horizon = 3.5
tail_cap = 1e-3
workers = 2

[policy]
b = 1.7

[scan]
b_factors = 0.5, 1.0, 2

[output]
dir = elsewhere
formats = csv
)";
    const auto s = parse_scenario_text(text);
    CHECK(s.n_paths == 500);
    CHECK(s.dt == 0.01);
    CHECK(s.horizon.has_value());
    CHECK(*s.horizon == 3.5);
    CHECK(s.tail_cap == 1e-3);
    CHECK(s.workers == 2);
    REQUIRE(s.band_override.has_value());
    CHECK(*s.band_override == 1.7);
    REQUIRE(s.scan_factors.size() == 3);
    CHECK(s.scan_factors[2] == 2.0);
    CHECK(s.out_dir == "elsewhere");
    REQUIRE(s.formats.size() == 1);
    CHECK(s.formats[0] == "csv");

    CHECK_THROWS_AS(parse_scenario_text(std::string(kBase) + "[output]\nformats = yaml\n"),
                    ScenarioError);
    CHECK_THROWS_AS(parse_scenario_text(std::string(kBase) + "[scan]\nb_factors =\n"),
                    ScenarioError);
}

TEST_CASE("numeric validation") {
    CHECK_THROWS_AS(parse_scenario_text(std::string(kBase) + "[simulation]\ndt = abc\n"),
                    ScenarioError);
    CHECK_THROWS_AS(parse_scenario_text(std::string(kBase) + "[simulation]\nn_paths = 0\n"),
                    ScenarioError);
    CHECK_THROWS_AS(parse_scenario_text(std::string(kBase) + "[simulation]\nworkers = 0\n"),
                    ScenarioError);
}

TEST_CASE("hash depends on content bytes only") {
    const auto s1 = parse_scenario_text(kBase, "a.scn");
    const auto s2 = parse_scenario_text(kBase, "b.scn");
    CHECK(s1.source_hash == s2.source_hash);
    const auto s3 = parse_scenario_text(std::string(kBase) + "# comment change\n", "a.scn");
    CHECK(s3.source_hash != s1.source_hash);
}

TEST_CASE("run config carries the simulation block") {
    auto s = parse_scenario_text(kBase);
    s.workers = 3;
    const auto cfg = s.run_config();
    CHECK(cfg.n_paths == 100000);
    CHECK(cfg.master_seed == 42);
    CHECK(cfg.workers == 3);
    CHECK(cfg.horizon == 0.0);  // derived later from the tail cap
    CHECK(cfg.tail_cap == 1e-4);
}

}  // TEST_SUITE
