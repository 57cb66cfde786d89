#pragma once

#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "hexagait/evolution.hpp"

namespace hexagait::analysis {

class EmptyInput : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

class InsufficientData : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

using evolution::EvolutionHistory;
using evolution::Individual;

struct CurveRow {
  int generation;
  double best_fitness;
  double best_distance;     // max distance in the generation
  double scaled_stability;  // stability score of the best individual
};

std::vector<CurveRow> generation_curves(const EvolutionHistory& history,
                                        double stability_normalization = 0.01);

/// Sample covariance, n - 1 denominator. Needs two or more equal-length series.
double sample_covariance(std::span<const double> x, std::span<const double> y);

struct CovarianceEntry {
  std::size_t gene;
  double covariance;
};

/// Covariance of each non-period gene of the best-of-generation individual
/// with that individual's distance, across generations.
struct CovarianceReport {
  int generations = 0;
  std::vector<CovarianceEntry> entries;  // gene order, 18 entries
  std::vector<std::size_t> ranking;      // gene indices by |covariance| descending
};

CovarianceReport covariance_with_distance(const EvolutionHistory& history);

struct GeneDifference {
  std::size_t gene;
  double a;
  double b;
  double diff;           // phases: circular distance
  double percent_range;  // diff / range width * 100
};

struct GaitComparison {
  gait::GaitGenome a;
  gait::GaitGenome b;
  std::vector<GeneDifference> genes;  // all 24 genes
  double fitness_delta;               // b - a
  double distance_delta;              // b - a
};

/// |a - b|, or min(|a - b|, 2 pi - |a - b|) for phase genes.
double gene_difference(std::size_t gene, double a, double b);

GaitComparison compare_gaits(const Individual& a, const Individual& b);

/// The fittest generation-best individual and the fittest one with a
/// different genome. A single generation uses its whole population.
std::pair<Individual, Individual> two_best(const EvolutionHistory& history);

struct TrajectoryRow {
  double t;
  gait::LegCommands commands;
};

/// Rows at t = 0, stride, 2 stride, ... up to duration.
std::vector<TrajectoryRow> trajectory_table(const gait::GaitGenome& genome, double duration,
                                            double stride, const gait::GaitClock& clock = {});

// Tab-separated tables. Each starts with '#' preamble lines carrying the
// run's manifest hash and the construction used, then a header row.
std::string format_curves(const std::vector<CurveRow>& rows, std::string_view manifest_hash);
std::string format_covariance(const CovarianceReport& report, std::string_view manifest_hash);
std::string format_comparison(const GaitComparison& comparison, std::string_view manifest_hash);
std::string format_trajectory(const std::vector<TrajectoryRow>& rows,
                              std::string_view manifest_hash);

}  // namespace hexagait::analysis
