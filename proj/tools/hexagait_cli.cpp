// hexagait: evolve, evaluate and analyze open-loop hexapod gaits.

#include <atomic>
#include <csignal>
#include <iostream>

#include <CLI11.hpp>

#include "hexagait/harness.hpp"

namespace {

std::atomic<bool> g_stop{false};

extern "C" void on_interrupt(int) { g_stop.store(true); }

}  // namespace

int main(int argc, char** argv) {
  using hexagait::harness::CliOptions;

  CLI::App app{"Evolve, evaluate and analyze open-loop hexapod gaits"};
  app.require_subcommand(1);
  app.set_version_flag("--version", HEXAGAIT_VERSION);

  CliOptions opt;
  std::string config, out, telemetry, input;
  std::uint64_t seed = 0;
  int workers = 0;

  auto add_common = [&](CLI::App* cmd) {
    cmd->add_option("--config", config, "INI config file (defaults apply when omitted)");
    cmd->add_option("--seed", seed, "Master seed override");
  };

  auto* evolve = app.add_subcommand("evolve", "Run the evolutionary algorithm into a run directory");
  add_common(evolve);
  evolve->add_option("--out", out, "Run directory (default: run)");
  evolve->add_flag("--resume", opt.resume, "Continue a partial run in --out");
  evolve->add_option("--workers", workers, "Trial worker threads (0: hardware threads)")
      ->check(CLI::NonNegativeNumber);

  auto* trial = app.add_subcommand("trial", "Evaluate one genome on the course");
  add_common(trial);
  trial->add_option("genome", input, "Genome file (default: the config's seed genome)");
  trial->add_flag("--flat", opt.flat, "Use a flat course with the configured footprint");
  trial->add_option("--telemetry", telemetry, "Write the sampled trace to this file");

  auto* course = app.add_subcommand("course", "Generate and export a course grid");
  add_common(course);
  course->add_flag("--flat", opt.flat, "Flat course with the configured footprint");
  course->add_option("--out", out, "Course file (default: course.txt)");

  auto* analyze = app.add_subcommand("analyze", "Write curves, covariance, comparison and trajectory tables");
  analyze->add_option("run", input, "Run directory")->required();
  analyze->add_option("--out", out, "Output directory (default: <run>/analysis)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : hexagait::harness::kConfigError;
  }

  auto given = [](const CLI::App* cmd, const char* name) {
    const auto* o = cmd->get_option_no_throw(name);
    return o && o->count() > 0;
  };
  CLI::App* cmd = app.get_subcommands().front();
  if (given(cmd, "--config")) opt.config = config;
  if (given(cmd, "--seed")) opt.seed = seed;
  if (given(cmd, "--out")) opt.out = out;
  if (given(cmd, "--telemetry")) opt.telemetry = telemetry;
  if (given(cmd, "--workers")) opt.workers = workers;
  if (given(cmd, "genome") || given(cmd, "run")) opt.input = input;

  namespace h = hexagait::harness;
  if (cmd == evolve) {
    std::signal(SIGINT, on_interrupt);
    std::signal(SIGTERM, on_interrupt);
    return h::cmd_evolve(opt, std::cout, std::cerr, &g_stop);
  }
  if (cmd == trial) return h::cmd_trial(opt, std::cout, std::cerr);
  if (cmd == course) return h::cmd_course(opt, std::cout, std::cerr);
  return h::cmd_analyze(opt, std::cout, std::cerr);
}
