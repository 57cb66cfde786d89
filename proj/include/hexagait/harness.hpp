#pragma once

#include <atomic>
#include <filesystem>
#include <optional>
#include <ostream>
#include <stdexcept>
#include <string>
#include <vector>

#include "hexagait/config.hpp"
#include "hexagait/evolution.hpp"

namespace hexagait::harness {

enum ExitCode : int {
  kOk = 0,
  kConfigError = 1,
  kRuntimeFailure = 2,
  kNeedsResume = 3,
};

/// A run directory is missing generation files. `absent` lists exactly
/// which generations are missing.
class MissingGenerations : public std::runtime_error {
 public:
  explicit MissingGenerations(std::vector<int> absent);
  const std::vector<int>& absent() const { return absent_; }

 private:
  std::vector<int> absent_;
};

/// Layout: manifest.ini, summary.tsv, generations/gen_NNN.tsv, analysis/.
struct RunPaths {
  std::filesystem::path root;

  std::filesystem::path manifest() const { return root / "manifest.ini"; }
  std::filesystem::path summary() const { return root / "summary.tsv"; }
  std::filesystem::path generations_dir() const { return root / "generations"; }
  std::filesystem::path generation(int g) const;
  std::filesystem::path analysis_dir() const { return root / "analysis"; }
};

struct Manifest {
  config::RunConfig config;
  std::string version;
  std::string created;      // UTC timestamp, not part of the hash
  std::string config_hash;  // config::config_hash(config)
};

std::string format_manifest(const Manifest& manifest);
Manifest parse_manifest(std::string_view text);

/// Population file: one row per individual with its trial metrics and all
/// 24 genes in genome order.
std::string format_generation(const evolution::GenerationRecord& record);
evolution::GenerationRecord parse_generation(std::string_view text, int generation,
                                             double stability_normalization);

std::string format_summary(const std::vector<evolution::GenerationRecord>& history);

/// Generation indices present on disk, ascending.
std::vector<int> generations_on_disk(const RunPaths& paths);

/// Loads generations 0..n-1 where n is the length of the contiguous prefix
/// on disk. With `expected`, a gap or a missing generation below it throws
/// MissingGenerations.
evolution::EvolutionHistory load_history(const RunPaths& paths, double stability_normalization,
                                         std::optional<int> expected = std::nullopt);

struct CliOptions {
  std::optional<std::filesystem::path> config;
  std::optional<std::uint64_t> seed;
  std::optional<std::filesystem::path> out;
  std::optional<std::filesystem::path> telemetry;
  std::optional<int> workers;
  std::optional<std::filesystem::path> input;  // genome file or run directory
  bool resume = false;
  bool flat = false;
};

/// Config from --config (or built-in defaults) with --seed / --workers applied.
config::RunConfig resolve_config(const CliOptions& options);

int cmd_evolve(const CliOptions& options, std::ostream& out, std::ostream& err,
               const std::atomic<bool>* stop = nullptr);
int cmd_trial(const CliOptions& options, std::ostream& out, std::ostream& err);
int cmd_course(const CliOptions& options, std::ostream& out, std::ostream& err);
int cmd_analyze(const CliOptions& options, std::ostream& out, std::ostream& err);

}  // namespace hexagait::harness
