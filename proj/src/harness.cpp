#include "hexagait/harness.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <ctime>

#include <fmt/core.h>

#include "hexagait/analysis.hpp"
#include "hexagait/text_io.hpp"

namespace hexagait::harness {

namespace fs = std::filesystem;

namespace {

constexpr std::string_view kMetricColumns = "index\tfitness\tdistance\tstability_raw\ttermination\telapsed";

std::string gene_column(std::size_t k) {
  auto name = gait::gene_name(k);
  std::replace(name.begin(), name.end(), ' ', '_');
  return name;
}

std::string generation_header() {
  std::string h(kMetricColumns);
  for (std::size_t k = 0; k < gait::GaitGenome::kGeneCount; ++k) h += "\t" + gene_column(k);
  return h;
}

std::string utc_timestamp() {
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

std::string join_ints(const std::vector<int>& v) {
  std::string s;
  for (std::size_t i = 0; i < v.size(); ++i) s += (i ? ", " : "") + std::to_string(v[i]);
  return s;
}

terrain::CourseLayout course_layout(const config::RunConfig& cfg, bool flat) {
  if (!flat) return cfg.layout;
  terrain::CourseLayout l = cfg.layout;
  l.max_step_height = 0.0;
  l.beams = false;
  l.incline = false;
  return l;
}

}  // namespace

MissingGenerations::MissingGenerations(std::vector<int> absent)
    : std::runtime_error("missing generation files for generations: " + join_ints(absent)),
      absent_(std::move(absent)) {}

fs::path RunPaths::generation(int g) const {
  return generations_dir() / fmt::format("gen_{:03d}.tsv", g);
}

std::string format_manifest(const Manifest& m) {
  std::string out = "[manifest]\n";
  out += fmt::format("version = {}\ncreated = {}\nconfig_hash = {}\nmaster_seed = {}\n"
                     "terrain_seed = {}\n\n",
                     m.version, m.created, m.config_hash, m.config.master_seed(),
                     m.config.effective_terrain_seed());
  out += config::serialize_config(m.config);
  return out;
}

Manifest parse_manifest(std::string_view text) {
  Manifest m;
  m.config = config::parse_config(text, {"manifest"});
  bool in_section = false;
  for (auto line : split_fields(text, '\n')) {
    line = trim(line);
    if (line.empty() || line[0] == '#' || line[0] == ';') continue;
    if (line.front() == '[') {
      in_section = line == "[manifest]";
      continue;
    }
    if (!in_section) continue;
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) continue;
    const auto key = trim(line.substr(0, eq));
    const auto value = std::string(trim(line.substr(eq + 1)));
    if (key == "version") m.version = value;
    if (key == "created") m.created = value;
    if (key == "config_hash") m.config_hash = value;
  }
  if (m.config_hash.empty()) throw ParseError("manifest: missing [manifest] config_hash");
  return m;
}

std::string format_generation(const evolution::GenerationRecord& record) {
  std::string out = fmt::format("# generation {}\n{}\n", record.generation, generation_header());
  for (std::size_t i = 0; i < record.population.size(); ++i) {
    const auto& ind = record.population[i];
    out += fmt::format("{}\t{}\t{}\t{}\t{}\t{}", i, format_double(ind.fitness),
                       format_double(ind.trial.distance), format_double(ind.trial.stability_raw),
                       sim::termination_name(ind.trial.termination),
                       format_double(ind.trial.elapsed));
    for (std::size_t k = 0; k < gait::GaitGenome::kGeneCount; ++k) {
      out += "\t" + format_double(ind.genome[k]);
    }
    out += '\n';
  }
  return out;
}

evolution::GenerationRecord parse_generation(std::string_view text, int generation,
                                             double stability_normalization) {
  const auto header = generation_header();
  constexpr std::size_t kColumns = 6 + gait::GaitGenome::kGeneCount;
  bool seen_header = false;
  std::vector<evolution::Individual> population;
  std::size_t line_no = 0;
  for (auto line : split_fields(text, '\n')) {
    ++line_no;
    if (trim(line).empty() || line.front() == '#') continue;
    if (!seen_header) {
      if (line != header) throw ParseError(fmt::format("generation {}: unexpected header", generation));
      seen_header = true;
      continue;
    }
    const auto f = split_fields(line, '\t');
    const auto where = [&](std::string_view column) {
      return fmt::format("generation {} line {} {}", generation, line_no, column);
    };
    if (f.size() != kColumns) {
      throw ParseError(fmt::format("generation {} line {}: {} columns, expected {}", generation,
                                   line_no, f.size(), kColumns));
    }
    if (parse_int(f[0], where("index")) != static_cast<long long>(population.size())) {
      throw ParseError(where("index") + ": out of sequence");
    }
    evolution::Individual ind;
    ind.fitness = parse_double(f[1], where("fitness"));
    ind.trial.distance = parse_double(f[2], where("distance"));
    ind.trial.stability_raw = parse_double(f[3], where("stability_raw"));
    const auto term = sim::termination_from_name(f[4]);
    if (!term) throw ParseError(where("termination") + fmt::format(": unknown kind '{}'", f[4]));
    ind.trial.termination = *term;
    ind.trial.elapsed = parse_double(f[5], where("elapsed"));
    for (std::size_t k = 0; k < gait::GaitGenome::kGeneCount; ++k) {
      ind.genome[k] = parse_double(f[6 + k], where(gene_column(k)));
    }
    gait::require_valid(ind.genome);
    population.push_back(std::move(ind));
  }
  if (population.empty()) throw ParseError(fmt::format("generation {}: no individuals", generation));
  return evolution::summarize(generation, std::move(population), stability_normalization);
}

std::string format_summary(const std::vector<evolution::GenerationRecord>& history) {
  std::string out = "generation\tbest_fitness\tmean_fitness\tbest_distance\tbest_stability";
  for (int k = 0; k < sim::kTerminationKinds; ++k) {
    out += fmt::format("\t{}", sim::termination_name(static_cast<sim::Termination>(k)));
  }
  out += '\n';
  for (const auto& r : history) {
    out += fmt::format("{}\t{}\t{}\t{}\t{}", r.generation, format_double(r.best_fitness),
                       format_double(r.mean_fitness), format_double(r.best_distance),
                       format_double(r.best_stability));
    for (int c : r.terminations) out += fmt::format("\t{}", c);
    out += '\n';
  }
  return out;
}

std::vector<int> generations_on_disk(const RunPaths& paths) {
  std::vector<int> found;
  if (!fs::is_directory(paths.generations_dir())) return found;
  for (const auto& entry : fs::directory_iterator(paths.generations_dir())) {
    const auto name = entry.path().filename().string();
    if (name.size() < 9 || name.rfind("gen_", 0) != 0 || name.substr(name.size() - 4) != ".tsv") {
      continue;
    }
    try {
      found.push_back(static_cast<int>(parse_int(name.substr(4, name.size() - 8), "generation")));
    } catch (const ParseError&) {
    }
  }
  std::sort(found.begin(), found.end());
  return found;
}

evolution::EvolutionHistory load_history(const RunPaths& paths, double stability_normalization,
                                         std::optional<int> expected) {
  const auto found = generations_on_disk(paths);
  int prefix = 0;
  while (std::binary_search(found.begin(), found.end(), prefix)) ++prefix;
  if (expected) {
    std::vector<int> absent;
    for (int g = 0; g < *expected; ++g) {
      if (!std::binary_search(found.begin(), found.end(), g)) absent.push_back(g);
    }
    const bool gap = !found.empty() && found.back() >= prefix;
    if (!absent.empty() && (gap || found.empty())) throw MissingGenerations(absent);
  }
  evolution::EvolutionHistory history;
  for (int g = 0; g < prefix; ++g) {
    history.push_back(parse_generation(read_file(paths.generation(g)), g, stability_normalization));
  }
  return history;
}

config::RunConfig resolve_config(const CliOptions& options) {
  config::RunConfig cfg = options.config ? config::load_config(*options.config) : config::RunConfig{};
  if (options.seed) cfg.evolution.rng_seed = *options.seed;
  if (options.workers) cfg.workers = *options.workers;
  if (auto problems = config::validate_config(cfg); !problems.empty()) {
    throw config::ConfigError(std::move(problems));
  }
  return cfg;
}

int cmd_evolve(const CliOptions& options, std::ostream& out, std::ostream& err,
               const std::atomic<bool>* stop) {
  config::RunConfig cfg;
  try {
    cfg = resolve_config(options);
  } catch (const std::exception& e) {
    err << e.what() << '\n';
    return kConfigError;
  }
  const RunPaths paths{options.out.value_or("run")};
  const double norm = cfg.sim.stability_normalization;
  evolution::EvolutionHistory resumed;

  try {
    if (fs::exists(paths.manifest())) {
      const auto manifest = parse_manifest(read_file(paths.manifest()));
      const auto done = generations_on_disk(paths);
      const int planned = manifest.config.evolution.generations;
      if (!options.resume) {
        err << fmt::format("{} already holds a run ({} of {} generations written); ",
                           paths.root.string(), done.size(), planned)
            << "pass --resume to continue it or choose a fresh --out directory\n";
        return static_cast<int>(done.size()) < planned ? kNeedsResume : kConfigError;
      }
      if (options.config || options.seed) {
        if (config::config_hash(cfg) != manifest.config_hash) {
          err << "config differs from the run manifest (hash " << config::config_hash(cfg)
              << " vs " << manifest.config_hash << "); refusing to resume\n";
          return kConfigError;
        }
      }
      const int workers = cfg.workers;
      cfg = manifest.config;
      cfg.workers = options.workers.value_or(workers);
      resumed = load_history(paths, norm);
      out << fmt::format("resuming {} from generation {}\n", paths.root.string(), resumed.size());
    } else {
      if (fs::exists(paths.generations_dir()) && !fs::is_empty(paths.generations_dir())) {
        err << paths.root.string() << ": generation files present without a manifest\n";
        return kRuntimeFailure;
      }
      fs::create_directories(paths.generations_dir());
      Manifest manifest{cfg, HEXAGAIT_VERSION, utc_timestamp(), config::config_hash(cfg)};
      write_file_atomic(paths.manifest(), format_manifest(manifest));
    }
  } catch (const std::exception& e) {
    err << e.what() << '\n';
    return kRuntimeFailure;
  }

  try {
    const auto field = terrain::build_course(cfg.effective_terrain_seed(), cfg.layout);
    std::vector<evolution::GenerationRecord> summaries;
    auto remember = [&](const evolution::GenerationRecord& r) {
      evolution::GenerationRecord copy = r;
      copy.population.clear();
      summaries.push_back(std::move(copy));
    };
    for (const auto& r : resumed) remember(r);

    evolution::EvolveOptions opts;
    opts.workers = cfg.effective_workers();
    opts.resume_from = std::move(resumed);
    opts.stop = stop;
    opts.on_generation = [&](const evolution::GenerationRecord& r) {
      write_file_atomic(paths.generation(r.generation), format_generation(r));
      remember(r);
      write_file_atomic(paths.summary(), format_summary(summaries));
      out << fmt::format("generation {:3d}  best {:.4f}  mean {:.4f}  best distance {:.3f}\n",
                         r.generation, r.best_fitness, r.mean_fitness, r.best_distance);
      out.flush();
    };
    const auto history = evolution::evolve(cfg.seed_genome, field, cfg.sim, cfg.evolution, opts);
    if (!summaries.empty()) write_file_atomic(paths.summary(), format_summary(summaries));
    if (static_cast<int>(history.size()) < cfg.evolution.generations) {
      err << fmt::format("stopped after {} of {} generations; rerun with --resume to continue\n",
                         history.size(), cfg.evolution.generations);
      return kNeedsResume;
    }
    const auto best = std::max_element(history.begin(), history.end(), [](auto& a, auto& b) {
      return a.best_fitness < b.best_fitness;
    });
    out << fmt::format("done: best fitness {} (generation {}, distance {})\n",
                       format_double(best->best_fitness), best->generation,
                       format_double(best->best().trial.distance));
  } catch (const std::exception& e) {
    err << "evolution failed: " << e.what() << '\n';
    return kRuntimeFailure;
  }
  return kOk;
}

int cmd_trial(const CliOptions& options, std::ostream& out, std::ostream& err) {
  config::RunConfig cfg;
  gait::GaitGenome genome;
  try {
    cfg = resolve_config(options);
    genome = options.input ? gait::parse_genome(read_file(*options.input)) : cfg.seed_genome;
  } catch (const std::exception& e) {
    err << e.what() << '\n';
    return kConfigError;
  }
  try {
    const auto field =
        terrain::build_course(cfg.effective_terrain_seed(), course_layout(cfg, options.flat));
    const auto result = sim::run_trial(genome, field, cfg.sim);
    const double fitness = evolution::fitness_fn(result, cfg.evolution, cfg.sim.stability_normalization);
    out << fmt::format("course\t{}\nterrain_seed\t{}\n", options.flat ? "flat" : "default",
                       field.seed());
    out << fmt::format("distance\t{}\nstability_raw\t{}\nstability_score\t{}\n",
                       format_double(result.distance), format_double(result.stability_raw),
                       format_double(sim::stability_score(result.stability_raw,
                                                          cfg.sim.stability_normalization)));
    out << fmt::format("termination\t{}\nelapsed\t{}\nfitness\t{}\n",
                       sim::termination_name(result.termination), format_double(result.elapsed),
                       format_double(fitness));
    if (options.telemetry) write_file_atomic(*options.telemetry, sim::format_trace(result));
  } catch (const std::exception& e) {
    err << "trial failed: " << e.what() << '\n';
    return kRuntimeFailure;
  }
  return kOk;
}

int cmd_course(const CliOptions& options, std::ostream& out, std::ostream& err) {
  config::RunConfig cfg;
  try {
    cfg = resolve_config(options);
  } catch (const std::exception& e) {
    err << e.what() << '\n';
    return kConfigError;
  }
  const auto layout = course_layout(cfg, options.flat);
  try {
    const auto field = terrain::build_course(cfg.effective_terrain_seed(), layout);
    const fs::path path = options.out.value_or("course.txt");
    write_file_atomic(path, terrain::export_course(field));
    out << fmt::format("wrote {}\nfootprint {} x {} m ({} x {} cells at {} m)\nterrain_seed {}\n",
                       path.string(), format_double(field.width()), format_double(field.length()),
                       field.width_cells(), field.length_cells(), format_double(field.resolution()),
                       field.seed());
    for (const auto& s : terrain::segments(layout)) {
      out << fmt::format("  {:<13} {:>7.3f} .. {:.3f}\n", s.name, s.start, s.end);
    }
  } catch (const terrain::LayoutError& e) {
    err << e.what() << '\n';
    return kConfigError;
  } catch (const std::exception& e) {
    err << e.what() << '\n';
    return kRuntimeFailure;
  }
  return kOk;
}

int cmd_analyze(const CliOptions& options, std::ostream& out, std::ostream& err) {
  if (!options.input) {
    err << "analyze needs a run directory\n";
    return kConfigError;
  }
  const RunPaths paths{*options.input};
  try {
    if (!fs::exists(paths.manifest())) {
      err << paths.manifest().string() << ": missing\n";
      return kRuntimeFailure;
    }
    const auto manifest = parse_manifest(read_file(paths.manifest()));
    const auto& cfg = manifest.config;
    const double norm = cfg.sim.stability_normalization;
    const int planned = cfg.evolution.generations;
    const auto history = load_history(paths, norm, planned);
    if (static_cast<int>(history.size()) < planned) {
      std::vector<int> absent;
      for (int g = static_cast<int>(history.size()); g < planned; ++g) absent.push_back(g);
      err << "partial run; absent generations: " << join_ints(absent) << '\n';
    }

    const fs::path dir = options.out.value_or(paths.analysis_dir());
    fs::create_directories(dir);
    const auto& hash = manifest.config_hash;
    write_file_atomic(dir / "curves.tsv",
                      analysis::format_curves(analysis::generation_curves(history, norm), hash));
    try {
      const auto report = analysis::covariance_with_distance(history);
      write_file_atomic(dir / "covariance.tsv", analysis::format_covariance(report, hash));
    } catch (const analysis::InsufficientData& e) {
      write_file_atomic(dir / "covariance.tsv",
                        fmt::format("# table covariance_with_distance\n# manifest_hash {}\n"
                                    "# insufficient_data {}\n",
                                    hash, e.what()));
      out << "covariance: insufficient data (" << e.what() << ")\n";
    }
    const auto [first, second] = analysis::two_best(history);
    write_file_atomic(dir / "comparison.tsv",
                      analysis::format_comparison(analysis::compare_gaits(first, second), hash));
    const double cycle = gait::kTwoPi / cfg.sim.clock.omega;
    write_file_atomic(dir / "trajectory.tsv",
                      analysis::format_trajectory(
                          analysis::trajectory_table(first.genome, cycle, 0.02, cfg.sim.clock),
                          hash));
    out << "wrote curves.tsv, covariance.tsv, comparison.tsv, trajectory.tsv to " << dir.string()
        << '\n';
  } catch (const MissingGenerations& e) {
    err << e.what() << '\n';
    return kRuntimeFailure;
  } catch (const std::exception& e) {
    err << "analysis failed: " << e.what() << '\n';
    return kRuntimeFailure;
  }
  return kOk;
}

}  // namespace hexagait::harness
