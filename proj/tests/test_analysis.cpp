#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <vector>

#include "hexagait/analysis.hpp"
#include "support/oracles.hpp"

using namespace hexagait;
using namespace hexagait::analysis;

namespace {

// A history with one individual per generation; gene k of generation g is
// genes[g][k] and its distance is distance[g].
EvolutionHistory synthetic(const std::vector<gait::GaitGenome>& genes, const std::vector<double>& distance) {
  EvolutionHistory h;
  for (std::size_t g = 0; g < genes.size(); ++g) {
    Individual ind{genes[g], distance[g], {}};
    ind.trial.distance = distance[g];
    h.push_back(evolution::summarize(static_cast<int>(g), {ind}));
  }
  return h;
}

}  // namespace

TEST_SUITE("analysis") {

TEST_CASE("covariance hand examples") {
  const std::vector<double> x{1, 2, 3}, y{2, 4, 6}, c{5, 5, 5};
  CHECK(sample_covariance(x, y) == 2.0);
  CHECK(sample_covariance(c, y) == 0.0);
  CHECK_THROWS_AS(sample_covariance(std::vector<double>{1}, std::vector<double>{2}), InsufficientData);
  CHECK_THROWS_AS(sample_covariance(x, std::vector<double>{1, 2}), std::invalid_argument);
}

TEST_CASE("covariance properties against the brute-force oracle") {
  oracle::Gen gen(41);
  for (int i = 0; i < 300; ++i) {
    const auto n = static_cast<std::size_t>(gen.integer(2, 40));
    std::vector<double> x(n), y(n), z(n);
    for (std::size_t k = 0; k < n; ++k) x[k] = gen.real(-5, 5), y[k] = gen.real(0, 8), z[k] = gen.real(-1, 1);
    const double a = gen.real(-3, 3);
    std::vector<double> ax_z(n);
    for (std::size_t k = 0; k < n; ++k) ax_z[k] = a * x[k] + z[k];
    CHECK(std::abs(sample_covariance(x, y) - oracle::covariance(x, y)) <= 1e-9);
    CHECK(sample_covariance(x, y) == doctest::Approx(sample_covariance(y, x)).epsilon(1e-12));
    CHECK(std::abs(sample_covariance(ax_z, y) - (a * sample_covariance(x, y) + sample_covariance(z, y))) <= 1e-9);
  }
}

TEST_CASE("covariance report") {
  oracle::Gen gen(42);
  std::vector<gait::GaitGenome> genes;
  std::vector<double> distance;
  for (int g = 0; g < 8; ++g) genes.push_back(gen.genome()), distance.push_back(gen.real(0, 8));
  const auto report = covariance_with_distance(synthetic(genes, distance));
  CHECK(report.generations == 8);
  REQUIRE(report.entries.size() == 18);
  auto ranking = report.ranking;
  std::sort(ranking.begin(), ranking.end());
  for (std::size_t k = 0; k < 18; ++k) CHECK(ranking[k] == k);
  for (std::size_t r = 1; r < 18; ++r) {
    CHECK(std::abs(report.entries[report.ranking[r - 1]].covariance) >=
          std::abs(report.entries[report.ranking[r]].covariance));
  }
  for (std::size_t k = 0; k < 18; ++k) {
    std::vector<double> series;
    for (const auto& g : genes) series.push_back(g[k]);
    CHECK(std::abs(report.entries[k].covariance - oracle::covariance(series, distance)) <= 1e-9);
  }
}

TEST_CASE("covariance needs two generations") {
  CHECK_THROWS_AS(covariance_with_distance({}), EmptyInput);
  CHECK_THROWS_AS(covariance_with_distance(synthetic({gait::GaitGenome{}}, {1.0})), InsufficientData);
}

TEST_CASE("generation curves") {
  const auto h = synthetic({gait::GaitGenome{}, gait::GaitGenome{}}, {2.5, 2.5});
  const auto rows = generation_curves(h);
  REQUIRE(rows.size() == 2);
  for (const auto& r : rows) {
    CHECK(r.best_distance == 2.5);
    CHECK(r.best_fitness == 2.5);
    CHECK(r.scaled_stability == 1.0);
  }
  CHECK(generation_curves({synthetic({gait::GaitGenome{}}, {1.0})}).size() == 1);
  CHECK_THROWS_AS(generation_curves({}), EmptyInput);
}

TEST_CASE("gait comparison") {
  gait::GaitGenome a, b;
  a[1] = 0.41;
  b[1] = 1.27;
  a[0] = 6.28;
  b[0] = 0.46;
  const Individual ia{a, 3.0, {}}, ib{b, 4.5, {}};
  const auto c = compare_gaits(ia, ib);
  REQUIRE(c.genes.size() == 24);
  CHECK(c.genes[1].diff == doctest::Approx(0.86).epsilon(1e-12));
  CHECK(c.genes[1].percent_range == doctest::Approx(0.86 / 1.7 * 100.0).epsilon(1e-12));
  CHECK(std::round(c.genes[1].percent_range) == 51.0);
  CHECK(c.genes[0].diff == doctest::Approx(0.46 - (6.28 - gait::kTwoPi)).epsilon(1e-12));
  CHECK(c.fitness_delta == 1.5);

  const auto same = compare_gaits(ia, ia);
  for (const auto& g : same.genes) {
    CHECK(g.diff == 0.0);
    CHECK(g.percent_range == 0.0);
  }
  oracle::Gen gen(43);
  for (int i = 0; i < 500; ++i) {
    const auto r = compare_gaits({gen.genome(), 0, {}}, {gen.genome(), 0, {}});
    for (const auto& g : r.genes) {
      CHECK(g.percent_range >= 0.0);
      CHECK(g.percent_range <= 100.0);
    }
  }
}

TEST_CASE("two best picks distinct genomes when possible") {
  gait::GaitGenome a, b;
  b[1] = 0.5;
  const auto h = synthetic({a, a, b}, {3.0, 3.0, 2.0});
  const auto [first, second] = two_best(h);
  CHECK(first.genome == a);
  CHECK(second.genome == b);
  CHECK_THROWS_AS(two_best({}), EmptyInput);
}

TEST_CASE("trajectory table") {
  const auto g = gait::default_seed_genome();
  const auto zero = trajectory_table(g, 0.0, 0.1);
  REQUIRE(zero.size() == 1);
  CHECK(zero[0].t == 0.0);
  const auto rows = trajectory_table(g, 2.0, 0.1);
  CHECK(rows.size() == 21);
  for (const auto& r : rows) {
    for (int leg = 0; leg < 3; ++leg) {
      const std::size_t base = static_cast<std::size_t>(leg) * 6;
      CHECK(r.commands[leg].femur ==
            doctest::Approx(oracle::gamma(g[base + 1], static_cast<int>(g[18 + 2 * leg]), r.t, g[base], g[base + 2])).epsilon(1e-12));
    }
  }
  CHECK_THROWS(trajectory_table(g, 1.0, 0.0));
}

TEST_CASE("tables carry the manifest hash") {
  const auto h = synthetic({gait::GaitGenome{}, gait::GaitGenome{}}, {1.0, 2.0});
  for (const auto& text : {format_curves(generation_curves(h), "abc123"),
                           format_covariance(covariance_with_distance(h), "abc123"),
                           format_trajectory(trajectory_table(gait::GaitGenome{}, 0.0, 1.0), "abc123")}) {
    CHECK(text.find("# manifest_hash abc123\n") != std::string::npos);
  }
}

}  // TEST_SUITE
