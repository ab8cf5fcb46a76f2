#pragma once

#include "hillvallea/problems.hpp"
#include "hillvallea/types.hpp"

#include <deque>
#include <optional>
#include <random>
#include <span>
#include <string_view>

namespace hillvallea {

/// Gaussian core search algorithms: CMSA and the AMaLGaM family (full,
/// univariate, and their incremental variants).
enum class SearcherKind { cmsa, am, amu, iam, iamu };

std::string_view to_string(SearcherKind kind);
std::optional<SearcherKind> parse_searcher_kind(std::string_view text);

/// Truncation selection fraction: 0.5 for CMSA, 0.35 for the EDAs.
double selection_fraction(SearcherKind kind);
bool is_univariate(SearcherKind kind);
bool is_incremental(SearcherKind kind);

/// Recommended cluster (population) size, rounded up and at least 4.
int recommended_population_size(SearcherKind kind, int d);

/// Tunables of the searchers. Defaults are the values the optimizer uses.
struct SearcherConstants {
  double tol = 1e-5;

  /// Scale of the step-size learning rate; tau_sigma = scale / sqrt(2d).
  double cmsa_tau_sigma_scale = 1.0;
  double cmsa_min_std = 1e-15;
  double max_condition_number = 1e14;

  double ams_fraction = 0.5;  // of tau * N_c
  double ams_delta = 2.0;
  double multiplier_decay = 0.9;
  double multiplier_min = 1e-4;
  double multiplier_max = 1e4;
  double sdr_threshold = 1.0;
  double incremental_eta = 0.7;
  double eda_min_std = 1e-12;
  double eda_min_fitness_std = 1e-12;

  /// Singleton clusters start from Sigma = (scale * eel)^2 * I.
  double singleton_scale = 0.01;
};

struct GaussianInit {
  Vector mean;
  Matrix covariance;
  int population_size = 0;
};

enum class TerminationReason {
  none,
  no_improvement,
  step_size,
  ill_conditioned,
  population_converged,
  fitness_converged,
  degenerate,
  budget_exhausted,
};

std::string_view to_string(TerminationReason reason);

struct TerminationCheck {
  bool terminated = false;
  TerminationReason reason = TerminationReason::none;
};

/// Model and bookkeeping of one core searcher.
///
/// For CMSA `model.covariance` is the shape matrix C and the sampling
/// distribution is N(m, sigma^2 C). For the EDAs it is Sigma and the
/// sampling distribution is N(mu, multiplier^2 Sigma).
struct SearcherState {
  SearcherKind kind = SearcherKind::amu;
  int generation = 0;
  Solution best_ever;
  /// best_ever fitness after each of the most recent generations (front is
  /// oldest); the initial value is included.
  std::deque<double> best_history;
  GaussianInit model;
  double sigma = 1.0;
  double multiplier = 1.0;
  Vector previous_mean;
  bool has_previous_mean = false;
  /// Offspring of the latest generation (after repair).
  std::vector<Solution> population;
  bool budget_exhausted = false;
  bool degenerate = false;

  int dimension() const { return static_cast<int>(model.mean.size()); }
  /// 10 + floor(30 d / N_c) generations.
  int improvement_window() const;
};

/// Fits a searcher to a cluster (`members` founder first).
SearcherState init_from_cluster(std::span<const Solution> members, int d, double eel, SearcherKind kind,
                                int n_c, const SearcherConstants& constants = {});

/// One CMSA generation with self-adaptive step sizes, rank-mu shape update
/// and best-ever elitism.
void cmsa_generation(SearcherState& state, BudgetedObjective& objective, const SearchDomain& domain,
                     std::mt19937_64& rng, const SearcherConstants& constants = {});

/// One AMaLGaM-style generation: sample (with anticipated mean shift),
/// adapt the distribution multiplier, truncation-select, refit.
void eda_generation(SearcherState& state, BudgetedObjective& objective, const SearchDomain& domain,
                    std::mt19937_64& rng, const SearcherConstants& constants = {});

TerminationCheck check_termination(const SearcherState& state, double tol, const SearcherConstants& constants = {});

/// Runs generations of the matching kind until a termination criterion
/// fires. Returns the reason.
TerminationReason run_core_search(SearcherState& state, BudgetedObjective& objective, const SearchDomain& domain,
                                  std::mt19937_64& rng, const SearcherConstants& constants = {});

/// Largest over smallest eigenvalue of a symmetric matrix; infinity when the
/// smallest is not positive.
double condition_number(const Matrix& symmetric);

namespace detail {
/// Bookkeeping shared by all kinds after a generation's offspring are known.
void record_generation(SearcherState& state, std::size_t history_length);
/// Keeps the first `count` indices of `pool` sorted best first (stable).
std::vector<std::size_t> best_indices(std::span<const Solution> pool, std::size_t count);
}  // namespace detail

}  // namespace hillvallea
