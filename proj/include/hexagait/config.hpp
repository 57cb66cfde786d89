#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "hexagait/evolution.hpp"
#include "hexagait/gait.hpp"
#include "hexagait/sim.hpp"
#include "hexagait/terrain.hpp"

namespace hexagait::config {

/// Invalid or unreadable configuration. Each message names its
/// "[section] key".
class ConfigError : public std::runtime_error {
 public:
  explicit ConfigError(std::vector<std::string> problems);
  const std::vector<std::string>& problems() const { return problems_; }

 private:
  std::vector<std::string> problems_;
};

/// Everything a run depends on. The master seed is evolution.rng_seed;
/// the course length used for fitness follows sim.course_length.
struct RunConfig {
  int workers = 0;  // 0: one per hardware thread
  std::optional<std::uint64_t> terrain_seed;  // default: derived from the master seed
  gait::GaitGenome seed_genome = gait::default_seed_genome();
  sim::SimConfig sim{};
  evolution::EvolutionConfig evolution{};
  terrain::CourseLayout layout{};

  std::uint64_t master_seed() const { return evolution.rng_seed; }
  std::uint64_t effective_terrain_seed() const;
  int effective_workers() const;

  friend bool operator==(const RunConfig&, const RunConfig&) = default;
};

/// Sections: [run] [gait] [sim] [robot] [evolution] [terrain]. Missing keys
/// keep their defaults; unknown sections or keys are errors. Sections named
/// in `ignored_sections` are skipped.
RunConfig parse_config(std::string_view ini_text,
                       const std::vector<std::string>& ignored_sections = {});
RunConfig load_config(const std::filesystem::path& path);

/// Canonical form: every key, fixed order, shortest round-trip numbers.
std::string serialize_config(const RunConfig& config);

/// Problems across all sections; empty when the config is usable.
std::vector<std::string> validate_config(const RunConfig& config);

/// FNV-1a of the canonical serialization (workers excluded), as 16 hex
/// digits.
std::string config_hash(const RunConfig& config);

}  // namespace hexagait::config
