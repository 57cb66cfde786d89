#include <doctest.h>

#include <string>

#include "hexagait/config.hpp"

using namespace hexagait;
using namespace hexagait::config;

namespace {

std::string first_problem(std::string_view text) {
  try {
    parse_config(text);
  } catch (const ConfigError& e) {
    return e.problems().empty() ? std::string() : e.problems().front();
  }
  return {};
}

}  // namespace

TEST_SUITE("config") {

TEST_CASE("defaults survive a serialize and parse round trip") {
  const RunConfig defaults;
  const auto text = serialize_config(defaults);
  CHECK(parse_config(text) == defaults);
  CHECK(serialize_config(parse_config(text)) == text);
  CHECK(validate_config(defaults).empty());
}

TEST_CASE("edited values round trip") {
  const auto c = parse_config(
      "[run]\nseed = 9\nterrain_seed = 12345\nworkers = 3\n"
      "[sim]\ndt = 0.01\ntrial_duration = 30\n"
      "[evolution]\npopulation_size = 8\nsigma_phase = 0.3\n"
      "[terrain]\nincline = false\n");
  CHECK(c.master_seed() == 9);
  CHECK(c.effective_terrain_seed() == 12345);
  CHECK(c.workers == 3);
  CHECK(c.sim.dt == 0.01);
  CHECK(c.evolution.population_size == 8);
  CHECK(c.evolution.sigma.phase == 0.3);
  CHECK_FALSE(c.layout.incline);
  CHECK(parse_config(serialize_config(c)) == c);
}

TEST_CASE("course length drives fitness scaling") {
  const auto c = parse_config("[sim]\ncourse_length = 6.0\n");
  CHECK(c.evolution.course_length == 6.0);
}

TEST_CASE("errors name the section and key") {
  CHECK(first_problem("[sim]\ndtt = 0.1\n").find("[sim] dtt") != std::string::npos);
  CHECK(first_problem("[physics]\nx = 1\n").find("[physics]") != std::string::npos);
  CHECK(first_problem("[evolution]\npopulation_size = many\n").find("[evolution] population_size") !=
        std::string::npos);
  CHECK(first_problem("[evolution]\npopulation_size = 7\n").find("population_size") != std::string::npos);
  CHECK(first_problem("[sim]\ndt = -1\n").find("[sim] dt") != std::string::npos);
  CHECK(first_problem("[gait]\nseed_genome = 1 2 3\n").find("[gait] seed_genome") != std::string::npos);
  CHECK_NOTHROW(parse_config("[notes]\nanything = 1\n", {"notes"}));
}

TEST_CASE("bundled presets load") {
  const std::string dir = HEXAGAIT_CONFIG_DIR;
  const auto desk = load_config(dir + "/desk.ini");
  CHECK(desk.evolution.population_size == 20);
  CHECK(desk.evolution.generations == 10);
  const auto full = load_config(dir + "/full.ini");
  CHECK(full.evolution.population_size == 200);
  CHECK(full.evolution.generations == 23);
  CHECK(full.sim.trial_duration == 90.0);
  CHECK(validate_config(desk).empty());
  CHECK(validate_config(full).empty());
  CHECK_THROWS_AS(load_config(dir + "/missing.ini"), ConfigError);
}

TEST_CASE("hash ignores the worker count only") {
  RunConfig a, b;
  b.workers = 8;
  CHECK(config_hash(a) == config_hash(b));
  CHECK(config_hash(a).size() == 16);
  b.evolution.rng_seed = 2;
  CHECK(config_hash(a) != config_hash(b));
}

}  // TEST_SUITE
