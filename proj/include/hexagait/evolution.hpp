#pragma once

#include <array>
#include <atomic>
#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "hexagait/gait.hpp"
#include "hexagait/rng.hpp"
#include "hexagait/sim.hpp"
#include "hexagait/terrain.hpp"

namespace hexagait::evolution {

using gait::GaitGenome;

/// Per-kind Gaussian standard deviations. Period genes are resampled from
/// {1, 2} instead.
struct MutationSigma {
  double phase = 0.63;
  double amplitude = 0.17;
  double shift = 0.2;

  double for_gene(std::size_t index) const;

  friend bool operator==(const MutationSigma&, const MutationSigma&) = default;
};

struct EvolutionConfig {
  int population_size = 200;
  int generations = 23;
  double mutate_vs_crossover_prob = 0.5;  // probability a child is a mutant
  double per_param_mutation_prob = 0.4;
  double init_mutation_prob = 1.0;
  MutationSigma sigma{};
  std::uint64_t rng_seed = 1;
  double distance_weight = 0.95;
  double stability_weight = 0.05;
  double course_length = 8.2;

  friend bool operator==(const EvolutionConfig&, const EvolutionConfig&) = default;
};

/// Empty when valid. Population size must be even and >= 2.
std::vector<std::string> validate_evolution_config(const EvolutionConfig& config);

struct Individual {
  GaitGenome genome;
  double fitness = 0.0;
  sim::TrialResult trial;  // trace dropped after evaluation
};

/// w_d * distance + w_s * stability_score * L; 0 for a diverged trial.
double fitness_fn(const sim::TrialResult& trial, const EvolutionConfig& config,
                  double stability_normalization = 0.01);

/// population_size Gaussian mutants of the seed (the seed itself excluded).
std::vector<GaitGenome> init_population(const GaitGenome& seed, const EvolutionConfig& config,
                                        Rng& rng);

struct ParentPair {
  std::size_t a;  // argmax over the first half
  std::size_t b;  // argmax over the second half
};

/// Ties go to the lowest index within each half.
ParentPair select_parents(std::span<const double> fitness);
ParentPair select_parents(std::span<const Individual> population);

/// child = a[0, i) + b[i, j) + a[j, 24) with cuts 0 <= i < j <= 24.
GaitGenome two_point_crossover_at(const GaitGenome& a, const GaitGenome& b, std::size_t i,
                                  std::size_t j);
GaitGenome two_point_crossover(const GaitGenome& a, const GaitGenome& b, Rng& rng);

/// Which genes a mutation touched and the pre-clamp Gaussian deltas it drew
/// (0 for untouched genes and for resampled periods).
struct MutationTrace {
  std::array<bool, GaitGenome::kGeneCount> mutated{};
  std::array<double, GaitGenome::kGeneCount> delta{};
};

GaitGenome gaussian_mutate(const GaitGenome& genome, double per_param_prob,
                           const MutationSigma& sigma, Rng& rng, MutationTrace* trace = nullptr);

/// Parents are chosen once; every child is independently a mutant of the
/// fitter parent or a crossover of the two. No individual is carried over.
std::vector<GaitGenome> next_generation(std::span<const Individual> population,
                                        const EvolutionConfig& config, Rng& rng);

/// Runs every genome through run_trial on `workers` threads. Results are
/// positional, so the worker count never changes the outcome.
std::vector<Individual> evaluate_population(std::span<const GaitGenome> genomes,
                                            const terrain::HeightField& field,
                                            const sim::SimConfig& sim_config,
                                            const EvolutionConfig& config, int workers);

struct GenerationRecord {
  int generation = 0;
  std::vector<Individual> population;
  std::size_t best_index = 0;
  double best_fitness = 0.0;
  double mean_fitness = 0.0;
  double best_distance = 0.0;   // max over the population
  double best_stability = 0.0;  // max stability score over the population
  std::array<int, sim::kTerminationKinds> terminations{};

  const Individual& best() const { return population[best_index]; }
};

/// Fills the summary fields from the population. Best = highest fitness,
/// lowest index on ties.
GenerationRecord summarize(int generation, std::vector<Individual> population,
                           double stability_normalization = 0.01);

using EvolutionHistory = std::vector<GenerationRecord>;

struct EvolveOptions {
  int workers = 1;
  /// Completed generations to continue from (e.g. loaded from a run directory).
  EvolutionHistory resume_from;
  /// Checked after each generation; set to stop early with a valid prefix.
  const std::atomic<bool>* stop = nullptr;
  std::function<void(const GenerationRecord&)> on_generation;
};

/// Stream seeds used by evolve.
std::uint64_t init_stream_seed(std::uint64_t master);
std::uint64_t reproduction_stream_seed(std::uint64_t master, int generation);

EvolutionHistory evolve(const GaitGenome& seed, const terrain::HeightField& field,
                        const sim::SimConfig& sim_config, const EvolutionConfig& config,
                        const EvolveOptions& options = {});

}  // namespace hexagait::evolution
