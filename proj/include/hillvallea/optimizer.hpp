#pragma once

#include "hillvallea/core_search.hpp"
#include "hillvallea/hillvalley.hpp"
#include "hillvallea/problems.hpp"
#include "hillvallea/types.hpp"

#include <array>
#include <cstdint>
#include <optional>
#include <random>
#include <span>
#include <string_view>
#include <vector>

namespace hillvallea {

/// Which archived optima are added back to the population on restart.
enum class InjectionMode { all_optima, only_global, none };

std::string_view to_string(InjectionMode mode);
std::optional<InjectionMode> parse_injection_mode(std::string_view text);

/// Presumed distinct global optima. Every pair passed a 5-point hill-valley
/// distinctness test when inserted, and their fitness spread is within tol.
struct ElitistArchive {
  std::vector<Solution> elites;

  std::size_t size() const { return elites.size(); }
  bool empty() const { return elites.empty(); }
  double fitness_spread() const;
};

struct OptimizerConfig {
  std::optional<std::int64_t> budget;  // overrides the problem's budget
  double tol = 1e-5;
  InjectionMode injection = InjectionMode::only_global;

  /// Initial population is factor * d.
  double initial_population_factor = 16.0;
  double population_growth = 2.0;
  /// Initial cluster size is factor * recommended size.
  double cluster_size_factor = 1.0;
  double cluster_size_growth = 1.2;
  int postprocess_test_points = 5;
  EdgeLengthMode edge_length = EdgeLengthMode::expected;
  SearcherConstants searcher;
};

struct RestartLog {
  int restart = 0;
  std::int64_t population_size = 0;
  int cluster_size = 0;
  std::size_t selection_size = 0;
  std::size_t clusters = 0;
  std::size_t skipped_clusters = 0;
  std::size_t searchers_run = 0;
  int new_elites = 0;
  int replaced_elites = 0;
  /// Appended without a distinctness test because the budget ran out.
  int unverified_elites = 0;
  std::int64_t evaluations = 0;  // cumulative, at the end of the restart
};

struct TracePoint {
  std::int64_t evaluations = 0;
  std::vector<Solution> elites;
};

struct RunResult {
  ElitistArchive archive;
  std::int64_t budget = 0;
  std::int64_t evaluations_used = 0;
  std::array<std::int64_t, phase_count> phase_evaluations{};
  std::vector<TracePoint> trace;
  int restarts = 0;
  std::vector<RestartLog> per_restart_log;

  double phase_fraction(Phase phase) const;
};

/// The best floor(tau * n) solutions (at least one), ties in input order.
std::vector<Solution> truncation_selection(std::span<const Solution> population, double tau);

struct PostprocessResult {
  int added = 0;
  int replaced = 0;
  int duplicates = 0;
  int discarded = 0;
  int unverified = 0;
  bool emptied = false;
  /// Candidates dropped for being more than tol worse than the best.
  std::vector<Solution> local_optima;
};

/// Merges terminated-searcher bests into the archive: drops candidates more
/// than tol worse than the best known, empties the archive when a candidate
/// beats an elite by more than tol, and keeps one solution per niche using
/// hill-valley tests with `n_test` points.
PostprocessResult postprocess(std::vector<Solution> candidates, ElitistArchive& archive, double tol,
                              BudgetedObjective& objective, int n_test = 5);

/// n points drawn uniformly from the box.
std::vector<Vector> uniform_sample(const SearchDomain& domain, std::size_t n, std::mt19937_64& rng);

/// Runs the full restart scheme on `problem` until the budget is spent.
RunResult run_hillvallea(const BenchmarkProblem& problem, SearcherKind kind, const OptimizerConfig& config,
                         std::uint64_t seed);

}  // namespace hillvallea
