#include "hexagait/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include <fmt/core.h>

#include "hexagait/text_io.hpp"

namespace hexagait::analysis {

namespace {

constexpr std::size_t kWaveGenes = 18;

void require_history(const EvolutionHistory& history) {
  if (history.empty()) throw EmptyInput("history has no generations");
}

std::string preamble(std::string_view table, std::string_view manifest_hash,
                     std::initializer_list<std::string_view> notes) {
  std::string out = fmt::format("# table {}\n# manifest_hash {}\n", table, manifest_hash);
  for (auto n : notes) out += fmt::format("# {}\n", n);
  return out;
}

}  // namespace

std::vector<CurveRow> generation_curves(const EvolutionHistory& history,
                                        double stability_normalization) {
  require_history(history);
  std::vector<CurveRow> rows;
  rows.reserve(history.size());
  for (const auto& g : history) {
    rows.push_back({g.generation, g.best_fitness, g.best_distance,
                    sim::stability_score(g.best().trial.stability_raw, stability_normalization)});
  }
  return rows;
}

double sample_covariance(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) throw std::invalid_argument("covariance series differ in length");
  if (x.size() < 2) throw InsufficientData("covariance needs at least 2 samples");
  const double n = static_cast<double>(x.size());
  const double mx = std::accumulate(x.begin(), x.end(), 0.0) / n;
  const double my = std::accumulate(y.begin(), y.end(), 0.0) / n;
  double s = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) s += (x[i] - mx) * (y[i] - my);
  return s / (n - 1.0);
}

CovarianceReport covariance_with_distance(const EvolutionHistory& history) {
  require_history(history);
  if (history.size() < 2) {
    throw InsufficientData(
        fmt::format("covariance needs at least 2 generations, history has {}", history.size()));
  }
  std::vector<double> distance;
  for (const auto& g : history) distance.push_back(g.best().trial.distance);

  CovarianceReport report;
  report.generations = static_cast<int>(history.size());
  std::vector<double> series(history.size());
  for (std::size_t gene = 0; gene < kWaveGenes; ++gene) {
    for (std::size_t k = 0; k < history.size(); ++k) series[k] = history[k].best().genome[gene];
    report.entries.push_back({gene, sample_covariance(series, distance)});
  }
  report.ranking.resize(kWaveGenes);
  std::iota(report.ranking.begin(), report.ranking.end(), 0);
  std::stable_sort(report.ranking.begin(), report.ranking.end(), [&](std::size_t a, std::size_t b) {
    return std::abs(report.entries[a].covariance) > std::abs(report.entries[b].covariance);
  });
  return report;
}

double gene_difference(std::size_t gene, double a, double b) {
  const double d = std::abs(a - b);
  if (gait::gene_kind(gene) == gait::GeneKind::Phase) return std::min(d, gait::kTwoPi - d);
  return d;
}

GaitComparison compare_gaits(const Individual& a, const Individual& b) {
  GaitComparison c{a.genome, b.genome, {}, b.fitness - a.fitness,
                   b.trial.distance - a.trial.distance};
  for (std::size_t k = 0; k < gait::GaitGenome::kGeneCount; ++k) {
    const double diff = gene_difference(k, a.genome[k], b.genome[k]);
    c.genes.push_back({k, a.genome[k], b.genome[k], diff, diff / gait::gene_range_width(k) * 100.0});
  }
  return c;
}

std::pair<Individual, Individual> two_best(const EvolutionHistory& history) {
  require_history(history);
  std::vector<const Individual*> pool;
  if (history.size() == 1) {
    for (const auto& ind : history.front().population) pool.push_back(&ind);
  } else {
    for (const auto& g : history) pool.push_back(&g.best());
  }
  if (pool.size() < 2) throw InsufficientData("need two individuals to compare");
  std::stable_sort(pool.begin(), pool.end(),
                   [](const Individual* x, const Individual* y) { return x->fitness > y->fitness; });
  const auto distinct = std::find_if(pool.begin() + 1, pool.end(), [&](const Individual* x) {
    return !(x->genome == pool[0]->genome);
  });
  return {*pool[0], distinct != pool.end() ? **distinct : *pool[1]};
}

std::vector<TrajectoryRow> trajectory_table(const gait::GaitGenome& genome, double duration,
                                            double stride, const gait::GaitClock& clock) {
  if (!(stride > 0.0) || !(duration >= 0.0)) {
    throw std::invalid_argument("trajectory needs stride > 0 and duration >= 0");
  }
  const gait::GaitController controller(genome, clock);
  const auto n = static_cast<long>(std::floor(duration / stride + 1e-9));
  std::vector<TrajectoryRow> rows;
  rows.reserve(static_cast<std::size_t>(n + 1));
  for (long k = 0; k <= n; ++k) {
    const double t = static_cast<double>(k) * stride;
    rows.push_back({t, controller.commands(t)});
  }
  return rows;
}

std::string format_curves(const std::vector<CurveRow>& rows, std::string_view manifest_hash) {
  std::string out = preamble("generation_curves", manifest_hash,
                             {"best_distance: max distance in the generation",
                              "scaled_stability: stability score of the generation's best individual"});
  out += "generation\tbest_fitness\tbest_distance\tscaled_stability\n";
  for (const auto& r : rows) {
    out += fmt::format("{}\t{}\t{}\t{}\n", r.generation, format_double(r.best_fitness),
                       format_double(r.best_distance), format_double(r.scaled_stability));
  }
  return out;
}

std::string format_covariance(const CovarianceReport& report, std::string_view manifest_hash) {
  std::string out = preamble(
      "covariance_with_distance", manifest_hash,
      {"construction: sample covariance (n-1) of each gene of the best-of-generation individual "
       "with that individual's distance",
       "rows ranked by |covariance| descending"});
  out += fmt::format("# generations {}\n", report.generations);
  out += "rank\tgene\tname\tcovariance\n";
  for (std::size_t r = 0; r < report.ranking.size(); ++r) {
    const auto& e = report.entries[report.ranking[r]];
    out += fmt::format("{}\t{}\t{}\t{}\n", r + 1, e.gene, gait::gene_name(e.gene),
                       format_double(e.covariance));
  }
  return out;
}

std::string format_comparison(const GaitComparison& c, std::string_view manifest_hash) {
  std::string out = preamble("gait_comparison", manifest_hash,
                             {"diff: absolute difference; phases use circular distance",
                              "percent_range: diff / gene range width * 100"});
  out += fmt::format("# fitness_delta {}\n# distance_delta {}\n", format_double(c.fitness_delta),
                     format_double(c.distance_delta));
  out += "gene\tname\ta\tb\tdiff\tpercent_range\n";
  for (const auto& g : c.genes) {
    out += fmt::format("{}\t{}\t{}\t{}\t{}\t{}\n", g.gene, gait::gene_name(g.gene),
                       format_double(g.a), format_double(g.b), format_double(g.diff),
                       format_double(g.percent_range));
  }
  return out;
}

std::string format_trajectory(const std::vector<TrajectoryRow>& rows,
                              std::string_view manifest_hash) {
  static constexpr const char* kLegNames[] = {"fl", "ml", "rl", "fr", "mr", "rr"};
  std::string out = preamble("trajectory", manifest_hash, {"joint angles in radians"});
  out += "t";
  for (const char* leg : kLegNames) out += fmt::format("\t{0}_coxa\t{0}_femur\t{0}_tibia", leg);
  out += '\n';
  for (const auto& r : rows) {
    out += format_double(r.t);
    for (const auto& c : r.commands) {
      out += fmt::format("\t{}\t{}\t{}", format_double(c.coxa), format_double(c.femur),
                         format_double(c.tibia));
    }
    out += '\n';
  }
  return out;
}

}  // namespace hexagait::analysis
