#include "hexagait/evolution.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <thread>

namespace hexagait::evolution {

double MutationSigma::for_gene(std::size_t index) const {
  switch (gait::gene_kind(index)) {
    case gait::GeneKind::Phase: return phase;
    case gait::GeneKind::Amplitude: return amplitude;
    case gait::GeneKind::Shift: return shift;
    case gait::GeneKind::Period: return 0.0;
  }
  return 0.0;
}

std::vector<std::string> validate_evolution_config(const EvolutionConfig& c) {
  std::vector<std::string> errors;
  auto probability = [&](double p, const char* name) {
    if (!(p >= 0.0 && p <= 1.0)) errors.push_back(std::string(name) + " must be in [0, 1]");
  };
  if (c.population_size < 2 || c.population_size % 2 != 0) {
    errors.emplace_back("population_size must be even and >= 2");
  }
  if (c.generations < 1) errors.emplace_back("generations must be >= 1");
  probability(c.mutate_vs_crossover_prob, "mutate_vs_crossover_prob");
  probability(c.per_param_mutation_prob, "per_param_mutation_prob");
  probability(c.init_mutation_prob, "init_mutation_prob");
  for (double s : {c.sigma.phase, c.sigma.amplitude, c.sigma.shift}) {
    if (!(s >= 0.0 && std::isfinite(s))) {
      errors.emplace_back("mutation sigmas must be finite and >= 0");
      break;
    }
  }
  if (!(c.distance_weight >= 0.0 && c.stability_weight >= 0.0)) {
    errors.emplace_back("fitness weights must be >= 0");
  }
  if (!(c.course_length > 0.0)) errors.emplace_back("course_length must be > 0");
  return errors;
}

double fitness_fn(const sim::TrialResult& trial, const EvolutionConfig& config,
                  double stability_normalization) {
  if (trial.diverged()) return 0.0;
  const double value =
      config.distance_weight * trial.distance +
      config.stability_weight * sim::stability_score(trial.stability_raw, stability_normalization) *
          config.course_length;
  return std::isfinite(value) ? value : 0.0;
}

std::vector<GaitGenome> init_population(const GaitGenome& seed, const EvolutionConfig& config,
                                        Rng& rng) {
  gait::require_valid(seed);
  std::vector<GaitGenome> out;
  out.reserve(static_cast<std::size_t>(config.population_size));
  for (int i = 0; i < config.population_size; ++i) {
    out.push_back(gaussian_mutate(seed, config.init_mutation_prob, config.sigma, rng));
  }
  return out;
}

ParentPair select_parents(std::span<const double> fitness) {
  const std::size_t half = fitness.size() / 2;
  auto argmax = [&](std::size_t lo, std::size_t hi) {
    std::size_t best = lo;
    for (std::size_t i = lo + 1; i < hi; ++i) {
      if (fitness[i] > fitness[best]) best = i;
    }
    return best;
  };
  return {argmax(0, half), argmax(half, fitness.size())};
}

ParentPair select_parents(std::span<const Individual> population) {
  std::vector<double> f;
  f.reserve(population.size());
  for (const auto& ind : population) f.push_back(ind.fitness);
  return select_parents(f);
}

GaitGenome two_point_crossover_at(const GaitGenome& a, const GaitGenome& b, std::size_t i,
                                  std::size_t j) {
  if (!(i < j && j <= GaitGenome::kGeneCount)) {
    throw std::invalid_argument("crossover cuts must satisfy i < j <= 24");
  }
  GaitGenome child = a;
  for (std::size_t k = i; k < j; ++k) child[k] = b[k];
  return child;
}

GaitGenome two_point_crossover(const GaitGenome& a, const GaitGenome& b, Rng& rng) {
  constexpr auto n = static_cast<std::int64_t>(GaitGenome::kGeneCount);
  // Uniform over the 300 ordered cut pairs.
  const auto i = rng.uniform_int(0, n);
  auto j = rng.uniform_int(0, n - 1);
  if (j >= i) ++j;
  return two_point_crossover_at(a, b, static_cast<std::size_t>(std::min(i, j)),
                                static_cast<std::size_t>(std::max(i, j)));
}

GaitGenome gaussian_mutate(const GaitGenome& genome, double per_param_prob,
                           const MutationSigma& sigma, Rng& rng, MutationTrace* trace) {
  GaitGenome out = genome;
  if (trace) *trace = MutationTrace{};
  for (std::size_t k = 0; k < GaitGenome::kGeneCount; ++k) {
    if (!rng.bernoulli(per_param_prob)) continue;
    if (trace) trace->mutated[k] = true;
    if (gait::gene_kind(k) == gait::GeneKind::Period) {
      out[k] = static_cast<double>(rng.uniform_int(1, 2));
      continue;
    }
    const double delta = sigma.for_gene(k) * rng.normal();
    if (trace) trace->delta[k] = delta;
    const auto b = gait::gene_bounds(k);
    out[k] = std::clamp(genome[k] + delta, b.lo, b.hi);
  }
  return out;
}

std::vector<GaitGenome> next_generation(std::span<const Individual> population,
                                        const EvolutionConfig& config, Rng& rng) {
  const auto parents = select_parents(population);
  const auto& a = population[parents.a];
  const auto& b = population[parents.b];
  const GaitGenome& fitter = b.fitness > a.fitness ? b.genome : a.genome;
  std::vector<GaitGenome> children;
  children.reserve(static_cast<std::size_t>(config.population_size));
  for (int k = 0; k < config.population_size; ++k) {
    if (rng.bernoulli(config.mutate_vs_crossover_prob)) {
      children.push_back(gaussian_mutate(fitter, config.per_param_mutation_prob, config.sigma, rng));
    } else {
      children.push_back(two_point_crossover(a.genome, b.genome, rng));
    }
  }
  return children;
}

std::vector<Individual> evaluate_population(std::span<const GaitGenome> genomes,
                                            const terrain::HeightField& field,
                                            const sim::SimConfig& sim_config,
                                            const EvolutionConfig& config, int workers) {
  std::vector<Individual> out(genomes.size());
  std::atomic<std::size_t> next{0};
  auto work = [&] {
    for (std::size_t i = next++; i < genomes.size(); i = next++) {
      Individual& ind = out[i];
      ind.genome = genomes[i];
      try {
        ind.trial = sim::run_trial(genomes[i], field, sim_config);
      } catch (const std::exception&) {
        ind.trial = sim::TrialResult{};
        ind.trial.termination = sim::Termination::Diverged;
      }
      ind.trial.trace.clear();
      ind.trial.trace.shrink_to_fit();
      ind.fitness = fitness_fn(ind.trial, config, sim_config.stability_normalization);
    }
  };
  const auto n = static_cast<std::size_t>(std::max(1, workers));
  std::vector<std::thread> pool;
  for (std::size_t t = 1; t < std::min(n, genomes.size()); ++t) pool.emplace_back(work);
  work();
  for (auto& t : pool) t.join();
  return out;
}

GenerationRecord summarize(int generation, std::vector<Individual> population,
                           double stability_normalization) {
  if (population.empty()) throw std::invalid_argument("cannot summarize an empty population");
  GenerationRecord r;
  r.generation = generation;
  r.population = std::move(population);
  double sum = 0.0;
  for (std::size_t i = 0; i < r.population.size(); ++i) {
    const auto& ind = r.population[i];
    if (ind.fitness > r.population[r.best_index].fitness) r.best_index = i;
    sum += ind.fitness;
    r.best_distance = std::max(r.best_distance, ind.trial.distance);
    r.best_stability = std::max(
        r.best_stability, sim::stability_score(ind.trial.stability_raw, stability_normalization));
    ++r.terminations[static_cast<std::size_t>(ind.trial.termination)];
  }
  r.best_fitness = r.population[r.best_index].fitness;
  r.mean_fitness = sum / static_cast<double>(r.population.size());
  return r;
}

std::uint64_t init_stream_seed(std::uint64_t master) { return derive_seed(master, "init"); }

std::uint64_t reproduction_stream_seed(std::uint64_t master, int generation) {
  return derive_seed(master, "reproduction", static_cast<std::uint64_t>(generation));
}

EvolutionHistory evolve(const GaitGenome& seed, const terrain::HeightField& field,
                        const sim::SimConfig& sim_config, const EvolutionConfig& config,
                        const EvolveOptions& options) {
  if (auto errors = validate_evolution_config(config); !errors.empty()) {
    throw std::invalid_argument("invalid evolution config: " + errors.front());
  }
  if (auto errors = sim::validate_sim_config(sim_config); !errors.empty()) {
    throw std::invalid_argument("invalid sim config: " + errors.front());
  }
  gait::require_valid(seed);

  EvolutionHistory history = options.resume_from;
  if (static_cast<int>(history.size()) > config.generations) {
    history.resize(static_cast<std::size_t>(config.generations));
  }
  for (int g = static_cast<int>(history.size()); g < config.generations; ++g) {
    if (options.stop && options.stop->load()) break;
    std::vector<GaitGenome> genomes;
    if (g == 0) {
      Rng rng(init_stream_seed(config.rng_seed));
      genomes = init_population(seed, config, rng);
    } else {
      Rng rng(reproduction_stream_seed(config.rng_seed, g));
      genomes = next_generation(history.back().population, config, rng);
    }
    auto population = evaluate_population(genomes, field, sim_config, config, options.workers);
    history.push_back(summarize(g, std::move(population), sim_config.stability_normalization));
    if (options.on_generation) options.on_generation(history.back());
  }
  return history;
}

}  // namespace hexagait::evolution
