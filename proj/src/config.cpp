#include "hexagait/config.hpp"

#include <charconv>
#include <functional>
#include <map>
#include <set>
#include <sstream>
#include <thread>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>
#include <fmt/core.h>

#include "hexagait/rng.hpp"
#include "hexagait/text_io.hpp"

namespace hexagait::config {

namespace {

using boost::property_tree::ptree;

std::string join_problems(const std::vector<std::string>& problems) {
  std::string msg = "configuration error";
  for (const auto& p : problems) msg += "\n  " + p;
  return msg;
}

std::uint64_t parse_u64(std::string_view text, std::string_view what) {
  std::uint64_t v = 0;
  const auto* end = text.data() + text.size();
  auto r = std::from_chars(text.data(), end, v);
  if (text.empty() || r.ec != std::errc{} || r.ptr != end) {
    throw ParseError(fmt::format("{}: expected an unsigned integer, got '{}'", what, text));
  }
  return v;
}

bool parse_bool(std::string_view text, std::string_view what) {
  if (text == "true" || text == "1") return true;
  if (text == "false" || text == "0") return false;
  throw ParseError(fmt::format("{}: expected true or false, got '{}'", what, text));
}

// One config key. `get` returns nullopt for an unset optional value.
struct Field {
  std::string section;
  std::string key;
  std::function<std::optional<std::string>(const RunConfig&)> get;
  std::function<void(RunConfig&, std::string_view, const std::string&)> set;
};

template <class Access>
Field real(std::string section, std::string key, Access access) {
  return {std::move(section), std::move(key),
          [access](const RunConfig& c) -> std::optional<std::string> {
            return format_double(access(const_cast<RunConfig&>(c)));
          },
          [access](RunConfig& c, std::string_view v, const std::string& where) {
            access(c) = parse_double(v, where);
          }};
}

template <class Access>
Field integer(std::string section, std::string key, Access access) {
  return {std::move(section), std::move(key),
          [access](const RunConfig& c) -> std::optional<std::string> {
            return std::to_string(access(const_cast<RunConfig&>(c)));
          },
          [access](RunConfig& c, std::string_view v, const std::string& where) {
            const long long x = parse_int(v, where);
            if (x < -1'000'000'000LL || x > 1'000'000'000LL) {
              throw ParseError(fmt::format("{}: value out of range", where));
            }
            access(c) = static_cast<int>(x);
          }};
}

template <class Access>
Field flag(std::string section, std::string key, Access access) {
  return {std::move(section), std::move(key),
          [access](const RunConfig& c) -> std::optional<std::string> {
            return access(const_cast<RunConfig&>(c)) ? "true" : "false";
          },
          [access](RunConfig& c, std::string_view v, const std::string& where) {
            access(c) = parse_bool(v, where);
          }};
}

const std::vector<Field>& fields() {
  static const std::vector<Field> table = [] {
    std::vector<Field> f;
    // [run]
    f.push_back({"run", "seed",
                 [](const RunConfig& c) -> std::optional<std::string> {
                   return std::to_string(c.evolution.rng_seed);
                 },
                 [](RunConfig& c, std::string_view v, const std::string& w) {
                   c.evolution.rng_seed = parse_u64(v, w);
                 }});
    f.push_back(integer("run", "workers", [](RunConfig& c) -> int& { return c.workers; }));
    f.push_back({"run", "terrain_seed",
                 [](const RunConfig& c) -> std::optional<std::string> {
                   if (!c.terrain_seed) return std::nullopt;
                   return std::to_string(*c.terrain_seed);
                 },
                 [](RunConfig& c, std::string_view v, const std::string& w) {
                   c.terrain_seed = parse_u64(v, w);
                 }});
    // [gait]
    f.push_back(real("gait", "omega", [](RunConfig& c) -> double& { return c.sim.clock.omega; }));
    f.push_back(real("gait", "coxa_amplitude",
                     [](RunConfig& c) -> double& { return c.sim.clock.coxa_amplitude; }));
    f.push_back({"gait", "seed_genome",
                 [](const RunConfig& c) -> std::optional<std::string> {
                   return gait::format_genome(c.seed_genome);
                 },
                 [](RunConfig& c, std::string_view v, const std::string& w) {
                   try {
                     c.seed_genome = gait::parse_genome(v);
                   } catch (const std::exception& e) {
                     throw ParseError(fmt::format("{}: {}", w, e.what()));
                   }
                 }});
    // [sim]
    auto sim_real = [&](const char* key, double sim::SimConfig::*m) {
      f.push_back(real("sim", key, [m](RunConfig& c) -> double& { return c.sim.*m; }));
    };
    sim_real("dt", &sim::SimConfig::dt);
    sim_real("trial_duration", &sim::SimConfig::trial_duration);
    sim_real("roll_limit_deg", &sim::SimConfig::roll_limit_deg);
    sim_real("pitch_limit_deg", &sim::SimConfig::pitch_limit_deg);
    sim_real("yaw_limit_deg", &sim::SimConfig::yaw_limit_deg);
    sim_real("reverse_limit", &sim::SimConfig::reverse_limit);
    sim_real("course_length", &sim::SimConfig::course_length);
    sim_real("relaxation", &sim::SimConfig::relaxation);
    sim_real("stability_normalization", &sim::SimConfig::stability_normalization);
    sim_real("contact_tolerance", &sim::SimConfig::contact_tolerance);
    sim_real("climb_tolerance", &sim::SimConfig::climb_tolerance);
    f.push_back(integer("sim", "telemetry_stride",
                        [](RunConfig& c) -> int& { return c.sim.telemetry_stride; }));
    sim_real("start_x", &sim::SimConfig::start_x);
    f.push_back({"sim", "start_y",
                 [](const RunConfig& c) -> std::optional<std::string> {
                   if (!c.sim.start_y) return std::nullopt;
                   return format_double(*c.sim.start_y);
                 },
                 [](RunConfig& c, std::string_view v, const std::string& w) {
                   c.sim.start_y = parse_double(v, w);
                 }});
    // [robot]
    auto robot = [&](const char* key, double sim::RobotGeometry::*m) {
      f.push_back(real("robot", key, [m](RunConfig& c) -> double& { return c.sim.geometry.*m; }));
    };
    robot("thorax_length", &sim::RobotGeometry::thorax_length);
    robot("thorax_width", &sim::RobotGeometry::thorax_width);
    robot("thorax_height", &sim::RobotGeometry::thorax_height);
    robot("mass", &sim::RobotGeometry::mass);
    robot("coxa_length", &sim::RobotGeometry::coxa_length);
    robot("femur_length", &sim::RobotGeometry::femur_length);
    robot("tibia_length", &sim::RobotGeometry::tibia_length);
    robot("front_mount_deg", &sim::RobotGeometry::front_mount_deg);
    robot("middle_mount_deg", &sim::RobotGeometry::middle_mount_deg);
    robot("neutral_clearance", &sim::RobotGeometry::neutral_clearance);
    // [evolution]
    f.push_back(integer("evolution", "population_size",
                        [](RunConfig& c) -> int& { return c.evolution.population_size; }));
    f.push_back(integer("evolution", "generations",
                        [](RunConfig& c) -> int& { return c.evolution.generations; }));
    auto evo = [&](const char* key, double evolution::EvolutionConfig::*m) {
      f.push_back(real("evolution", key, [m](RunConfig& c) -> double& { return c.evolution.*m; }));
    };
    evo("mutate_vs_crossover_prob", &evolution::EvolutionConfig::mutate_vs_crossover_prob);
    evo("per_param_mutation_prob", &evolution::EvolutionConfig::per_param_mutation_prob);
    evo("init_mutation_prob", &evolution::EvolutionConfig::init_mutation_prob);
    auto sigma = [&](const char* key, double evolution::MutationSigma::*m) {
      f.push_back(
          real("evolution", key, [m](RunConfig& c) -> double& { return c.evolution.sigma.*m; }));
    };
    sigma("sigma_phase", &evolution::MutationSigma::phase);
    sigma("sigma_amplitude", &evolution::MutationSigma::amplitude);
    sigma("sigma_shift", &evolution::MutationSigma::shift);
    evo("distance_weight", &evolution::EvolutionConfig::distance_weight);
    evo("stability_weight", &evolution::EvolutionConfig::stability_weight);
    // [terrain]
    auto layout = [&](const char* key, double terrain::CourseLayout::*m) {
      f.push_back(real("terrain", key, [m](RunConfig& c) -> double& { return c.layout.*m; }));
    };
    layout("width", &terrain::CourseLayout::width);
    layout("length", &terrain::CourseLayout::length);
    layout("resolution", &terrain::CourseLayout::resolution);
    layout("wall_thickness", &terrain::CourseLayout::wall_thickness);
    layout("step_cell", &terrain::CourseLayout::step_cell);
    layout("max_step_height", &terrain::CourseLayout::max_step_height);
    f.push_back(flag("terrain", "beams", [](RunConfig& c) -> bool& { return c.layout.beams; }));
    layout("beam_size", &terrain::CourseLayout::beam_size);
    layout("beam_1_start", &terrain::CourseLayout::beam_1_start);
    layout("beam_2a_start", &terrain::CourseLayout::beam_2a_start);
    layout("beam_gap", &terrain::CourseLayout::beam_gap);
    f.push_back(flag("terrain", "incline", [](RunConfig& c) -> bool& { return c.layout.incline; }));
    layout("incline_start", &terrain::CourseLayout::incline_start);
    layout("incline_angle_deg", &terrain::CourseLayout::incline_angle_deg);
    return f;
  }();
  return table;
}

const std::vector<std::string>& section_order() {
  static const std::vector<std::string> order{"run", "gait", "sim", "robot", "evolution", "terrain"};
  return order;
}

}  // namespace

ConfigError::ConfigError(std::vector<std::string> problems)
    : std::runtime_error(join_problems(problems)), problems_(std::move(problems)) {}

std::uint64_t RunConfig::effective_terrain_seed() const {
  return terrain_seed.value_or(derive_seed(evolution.rng_seed, "terrain"));
}

int RunConfig::effective_workers() const {
  if (workers > 0) return workers;
  return std::max(1, static_cast<int>(std::thread::hardware_concurrency()));
}

RunConfig parse_config(std::string_view ini_text, const std::vector<std::string>& ignored_sections) {
  ptree tree;
  try {
    std::istringstream in{std::string(ini_text)};
    boost::property_tree::ini_parser::read_ini(in, tree);
  } catch (const boost::property_tree::ini_parser_error& e) {
    throw ConfigError({fmt::format("line {}: {}", e.line(), e.message())});
  }

  std::map<std::pair<std::string, std::string>, const Field*> index;
  std::set<std::string> sections;
  for (const auto& f : fields()) {
    index[{f.section, f.key}] = &f;
    sections.insert(f.section);
  }

  RunConfig config;
  std::vector<std::string> problems;
  for (const auto& [section, body] : tree) {
    if (std::find(ignored_sections.begin(), ignored_sections.end(), section) !=
        ignored_sections.end()) {
      continue;
    }
    if (!sections.count(section)) {
      problems.push_back(fmt::format("[{}]: unknown section", section));
      continue;
    }
    if (!body.data().empty()) {
      problems.push_back(fmt::format("[{}]: unexpected value outside a key", section));
    }
    for (const auto& [key, value] : body) {
      const auto where = fmt::format("[{}] {}", section, key);
      const auto it = index.find({section, key});
      if (it == index.end()) {
        problems.push_back(where + ": unknown key");
        continue;
      }
      try {
        it->second->set(config, trim(value.data()), where);
      } catch (const std::exception& e) {
        problems.emplace_back(e.what());
      }
    }
  }
  if (problems.empty()) problems = validate_config(config);
  if (!problems.empty()) throw ConfigError(std::move(problems));
  config.evolution.course_length = config.sim.course_length;
  return config;
}

RunConfig load_config(const std::filesystem::path& path) {
  std::string text;
  try {
    text = read_file(path);
  } catch (const std::exception& e) {
    throw ConfigError({fmt::format("{}: {}", path.string(), e.what())});
  }
  return parse_config(text);
}

std::string serialize_config(const RunConfig& config) {
  std::string out;
  for (const auto& section : section_order()) {
    out += fmt::format("[{}]\n", section);
    for (const auto& f : fields()) {
      if (f.section != section) continue;
      if (auto v = f.get(config)) out += fmt::format("{} = {}\n", f.key, *v);
    }
    out += '\n';
  }
  return out;
}

std::vector<std::string> validate_config(const RunConfig& c) {
  std::vector<std::string> problems;
  auto add = [&](std::string_view section, const std::vector<std::string>& list) {
    for (const auto& p : list) problems.push_back(fmt::format("[{}] {}", section, p));
  };
  if (c.workers < 0) problems.emplace_back("[run] workers: must be >= 0");
  add("sim", sim::validate_sim_config(c.sim));
  add("evolution", evolution::validate_evolution_config(c.evolution));
  add("terrain", terrain::validate_layout(c.layout));
  for (const auto& v : gait::validate_genome(c.seed_genome)) {
    problems.push_back("[gait] seed_genome: " + v.message);
  }
  return problems;
}

std::string config_hash(const RunConfig& config) {
  RunConfig canonical = config;
  canonical.workers = 0;  // execution detail, never changes results
  return fmt::format("{:016x}", fnv1a(serialize_config(canonical)));
}

}  // namespace hexagait::config
