#include <doctest.h>

#include <atomic>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "hexagait/harness.hpp"
#include "hexagait/text_io.hpp"

using namespace hexagait;
using namespace hexagait::harness;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  const auto dir = fs::temp_directory_path() / ("hexagait_harness_" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

void write(const fs::path& p, const std::string& text) { std::ofstream(p) << text; }

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

fs::path small_config(const fs::path& dir) {
  const auto p = dir / "small.ini";
  write(p,
        "[run]\nseed = 5\nworkers = 2\n"
        "[sim]\ntrial_duration = 4\n"
        "[evolution]\npopulation_size = 4\ngenerations = 3\n");
  return p;
}

struct Outcome {
  int code;
  std::string out;
  std::string err;
};

template <class F>
Outcome capture(F&& f) {
  std::ostringstream out, err;
  const int code = f(out, err);
  return {code, out.str(), err.str()};
}

Outcome evolve(const CliOptions& o, const std::atomic<bool>* stop = nullptr) {
  return capture([&](auto& out, auto& err) { return cmd_evolve(o, out, err, stop); });
}

}  // namespace

TEST_SUITE("harness") {

TEST_CASE("generation files round trip") {
  const auto dir = scratch("roundtrip");
  CliOptions o;
  o.config = small_config(dir);
  o.out = dir / "run";
  REQUIRE(evolve(o).code == kOk);
  const RunPaths paths{dir / "run"};
  for (int g = 0; g < 3; ++g) {
    const auto text = slurp(paths.generation(g));
    const auto record = parse_generation(text, g, 0.01);
    CHECK(record.population.size() == 4);
    CHECK(format_generation(record) == text);
  }
  const auto manifest = parse_manifest(slurp(paths.manifest()));
  CHECK(manifest.config.evolution.population_size == 4);
  CHECK(manifest.config_hash == config::config_hash(manifest.config));
}

TEST_CASE("evolve writes a complete and reproducible run") {
  const auto dir = scratch("evolve");
  CliOptions o;
  o.config = small_config(dir);
  o.out = dir / "a";
  REQUIRE(evolve(o).code == kOk);
  o.out = dir / "b";
  o.workers = 1;
  REQUIRE(evolve(o).code == kOk);
  const RunPaths a{dir / "a"}, b{dir / "b"};
  CHECK(fs::exists(a.manifest()));
  CHECK(generations_on_disk(a) == std::vector<int>{0, 1, 2});
  CHECK(slurp(a.summary()) == slurp(b.summary()));
  for (int g = 0; g < 3; ++g) CHECK(slurp(a.generation(g)) == slurp(b.generation(g)));

  o.out = dir / "a";
  const auto again = evolve(o);
  CHECK(again.code == kConfigError);
  CHECK(again.err.find("--resume") != std::string::npos);
}

TEST_CASE("interrupted runs resume to the same result") {
  const auto dir = scratch("resume");
  CliOptions o;
  o.config = small_config(dir);
  o.out = dir / "full";
  REQUIRE(evolve(o).code == kOk);

  o.out = dir / "partial";
  const std::atomic<bool> stop{true};
  CHECK(evolve(o, &stop).code == kNeedsResume);
  CHECK(generations_on_disk(RunPaths{dir / "partial"}).empty());
  CHECK(evolve(o).code == kNeedsResume);

  o.resume = true;
  REQUIRE(evolve(o).code == kOk);
  const RunPaths full{dir / "full"}, partial{dir / "partial"};
  for (int g = 0; g < 3; ++g) CHECK(slurp(full.generation(g)) == slurp(partial.generation(g)));
  CHECK(slurp(full.summary()) == slurp(partial.summary()));

  CliOptions other = o;
  other.seed = 99;
  CHECK(evolve(other).code == kConfigError);

  // A run cut off after two generations picks up at the third.
  fs::copy(dir / "full", dir / "cut", fs::copy_options::recursive);
  const RunPaths cut{dir / "cut"};
  fs::remove(cut.generation(2));
  CliOptions c;
  c.out = dir / "cut";
  CHECK(evolve(c).code == kNeedsResume);
  c.resume = true;
  const auto resumed = evolve(c);
  REQUIRE(resumed.code == kOk);
  CHECK(resumed.out.find("from generation 2") != std::string::npos);
  CHECK(slurp(cut.generation(2)) == slurp(full.generation(2)));
  CHECK(slurp(cut.summary()) == slurp(full.summary()));
}

TEST_CASE("analyze") {
  const auto dir = scratch("analyze");
  CliOptions o;
  o.config = small_config(dir);
  o.out = dir / "run";
  REQUIRE(evolve(o).code == kOk);

  CliOptions a;
  a.input = dir / "run";
  REQUIRE(capture([&](auto& out, auto& err) { return cmd_analyze(a, out, err); }).code == kOk);
  const RunPaths paths{dir / "run"};
  std::vector<std::string> first;
  for (const char* f : {"curves.tsv", "covariance.tsv", "comparison.tsv", "trajectory.tsv"}) {
    first.push_back(slurp(paths.analysis_dir() / f));
    CHECK(first.back().find("# manifest_hash") != std::string::npos);
  }
  REQUIRE(capture([&](auto& out, auto& err) { return cmd_analyze(a, out, err); }).code == kOk);
  std::size_t i = 0;
  for (const char* f : {"curves.tsv", "covariance.tsv", "comparison.tsv", "trajectory.tsv"}) {
    CHECK(slurp(paths.analysis_dir() / f) == first[i++]);
  }

  fs::remove(paths.generation(1));
  const auto gap = capture([&](auto& out, auto& err) { return cmd_analyze(a, out, err); });
  CHECK(gap.code == kRuntimeFailure);
  CHECK(gap.err.find('1') != std::string::npos);
  CHECK_THROWS_AS(load_history(paths, 0.01, 3), MissingGenerations);
  try {
    load_history(paths, 0.01, 3);
  } catch (const MissingGenerations& e) {
    CHECK(e.absent() == std::vector<int>{1});
  }
}

TEST_CASE("single generation analysis reports insufficient data") {
  const auto dir = scratch("single");
  const auto cfg = dir / "one.ini";
  write(cfg, "[sim]\ntrial_duration = 2\n[evolution]\npopulation_size = 4\ngenerations = 1\n");
  CliOptions o;
  o.config = cfg;
  o.out = dir / "run";
  REQUIRE(evolve(o).code == kOk);
  CliOptions a;
  a.input = dir / "run";
  const auto r = capture([&](auto& out, auto& err) { return cmd_analyze(a, out, err); });
  CHECK(r.code == kOk);
  CHECK(slurp(dir / "run" / "analysis" / "covariance.tsv").find("insufficient_data") != std::string::npos);
}

TEST_CASE("trial command") {
  const auto dir = scratch("trial");
  CliOptions o;
  o.flat = true;
  o.telemetry = dir / "trace.tsv";
  const auto ok = capture([&](auto& out, auto& err) { return cmd_trial(o, out, err); });
  CHECK(ok.code == kOk);
  CHECK(ok.out.find("termination\tCourseComplete") != std::string::npos);
  CHECK(slurp(dir / "trace.tsv").rfind("t\tx\t", 0) == 0);

  std::string genome;
  for (int k = 0; k < 24; ++k) genome += k == 7 ? "oops " : "1 ";
  write(dir / "bad.genome", genome);
  o.input = dir / "bad.genome";
  const auto bad = capture([&](auto& out, auto& err) { return cmd_trial(o, out, err); });
  CHECK(bad.code == kConfigError);
  CHECK(bad.err.find("gene 7 (middle femur range)") != std::string::npos);
}

TEST_CASE("course command") {
  const auto dir = scratch("course");
  CliOptions o;
  o.out = dir / "course.txt";
  const auto r = capture([&](auto& out, auto& err) { return cmd_course(o, out, err); });
  CHECK(r.code == kOk);
  CHECK(r.out.find("footprint 3 x 8.2 m") != std::string::npos);
  const auto text = slurp(dir / "course.txt");
  CHECK(terrain::import_course(text).length_cells() == 410);
}

TEST_CASE("bad config exits with a config error") {
  const auto dir = scratch("badcfg");
  write(dir / "bad.ini", "[evolution]\npopulation_size = 3\n");
  CliOptions o;
  o.config = dir / "bad.ini";
  o.out = dir / "run";
  const auto r = evolve(o);
  CHECK(r.code == kConfigError);
  CHECK(r.err.find("population_size") != std::string::npos);
  CHECK_FALSE(fs::exists(dir / "run" / "manifest.ini"));
}

}  // TEST_SUITE
