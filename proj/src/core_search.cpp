#include "hillvallea/core_search.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

namespace hillvallea {

std::string_view to_string(SearcherKind kind) {
  switch (kind) {
    case SearcherKind::cmsa: return "cmsa";
    case SearcherKind::am: return "am";
    case SearcherKind::amu: return "amu";
    case SearcherKind::iam: return "iam";
    case SearcherKind::iamu: return "iamu";
  }
  return "unknown";
}

std::optional<SearcherKind> parse_searcher_kind(std::string_view text) {
  for (auto kind : {SearcherKind::cmsa, SearcherKind::am, SearcherKind::amu, SearcherKind::iam, SearcherKind::iamu}) {
    if (text == to_string(kind)) return kind;
  }
  return std::nullopt;
}

std::string_view to_string(TerminationReason reason) {
  switch (reason) {
    case TerminationReason::none: return "none";
    case TerminationReason::no_improvement: return "no-improvement";
    case TerminationReason::step_size: return "step-size";
    case TerminationReason::ill_conditioned: return "ill-conditioned";
    case TerminationReason::population_converged: return "population-converged";
    case TerminationReason::fitness_converged: return "fitness-converged";
    case TerminationReason::degenerate: return "degenerate";
    case TerminationReason::budget_exhausted: return "budget-exhausted";
  }
  return "unknown";
}

double selection_fraction(SearcherKind kind) { return kind == SearcherKind::cmsa ? 0.5 : 0.35; }

bool is_univariate(SearcherKind kind) { return kind == SearcherKind::amu || kind == SearcherKind::iamu; }

bool is_incremental(SearcherKind kind) { return kind == SearcherKind::iam || kind == SearcherKind::iamu; }

int recommended_population_size(SearcherKind kind, int d) {
  if (d < 1) {
    throw std::invalid_argument("dimension must be positive");
  }
  const double dd = d;
  double size = 0.0;
  switch (kind) {
    // 3 ln d is 0 at d = 1; the +4 keeps CMSA's population usable.
    case SearcherKind::cmsa: size = std::ceil(3.0 * std::log(dd)) + 4.0; break;
    case SearcherKind::am: size = std::ceil(17.0 + 3.0 * dd * std::sqrt(dd)); break;
    case SearcherKind::amu: size = std::ceil(10.0 * std::sqrt(dd)); break;
    case SearcherKind::iam: size = std::ceil(10.0 * std::sqrt(dd)); break;
    case SearcherKind::iamu: size = std::ceil(4.0 * std::sqrt(dd)); break;
  }
  return std::max(4, static_cast<int>(size));
}

int SearcherState::improvement_window() const {
  return 10 + (30 * dimension()) / std::max(1, model.population_size);
}

double condition_number(const Matrix& symmetric) {
  Eigen::SelfAdjointEigenSolver<Matrix> solver(symmetric, Eigen::EigenvaluesOnly);
  const auto& values = solver.eigenvalues();
  const double smallest = values.minCoeff();
  if (!(smallest > 0.0)) {
    return std::numeric_limits<double>::infinity();
  }
  return values.maxCoeff() / smallest;
}

SearcherState init_from_cluster(std::span<const Solution> members, int d, double eel, SearcherKind kind, int n_c,
                                const SearcherConstants& constants) {
  if (members.empty()) {
    throw std::invalid_argument("cannot initialize a searcher from an empty cluster");
  }
  const auto n = members.size();
  SearcherState state;
  state.kind = kind;
  state.model.population_size = n_c;

  Vector mean = Vector::Zero(d);
  for (const auto& s : members) mean += s.position;
  mean /= static_cast<double>(n);

  const double fallback_variance = std::pow(constants.singleton_scale * eel, 2.0);
  Matrix covariance = Matrix::Zero(d, d);
  if (n == 1) {
    covariance.diagonal().setConstant(fallback_variance);
  } else {
    for (const auto& s : members) {
      const Vector delta = s.position - mean;
      covariance.noalias() += delta * delta.transpose();
    }
    covariance /= static_cast<double>(n - 1);
    if (n < static_cast<std::size_t>(d) + 1) {
      covariance = Matrix(covariance.diagonal().asDiagonal());
    }
    // Coinciding coordinates would freeze the search in that direction.
    for (int i = 0; i < d; ++i) {
      if (!(covariance(i, i) > 0.0)) covariance(i, i) = fallback_variance;
    }
  }

  const auto best = std::min_element(members.begin(), members.end(),
                                     [](const Solution& a, const Solution& b) { return a.fitness < b.fitness; });
  state.best_ever = *best;
  state.best_ever.origin = Origin::sample;
  state.best_history.push_back(state.best_ever.fitness);

  if (kind == SearcherKind::cmsa) {
    state.sigma = std::sqrt(covariance.diagonal().mean());
    state.model.covariance = covariance / (state.sigma * state.sigma);
  } else {
    state.model.covariance = covariance;
    state.multiplier = 1.0;
  }
  state.model.mean = std::move(mean);
  return state;
}

TerminationCheck check_termination(const SearcherState& state, double tol, const SearcherConstants& constants) {
  if (state.budget_exhausted) return {true, TerminationReason::budget_exhausted};
  if (state.degenerate) return {true, TerminationReason::degenerate};

  if (state.kind == SearcherKind::cmsa) {
    const auto window = static_cast<std::size_t>(state.improvement_window());
    if (state.best_history.size() > window) {
      const double then = state.best_history[state.best_history.size() - 1 - window];
      if (then - state.best_history.back() < tol) return {true, TerminationReason::no_improvement};
    }
    const double max_std = state.sigma * std::sqrt(state.model.covariance.diagonal().maxCoeff());
    if (max_std <= constants.cmsa_min_std) return {true, TerminationReason::step_size};
    if (condition_number(state.model.covariance) > constants.max_condition_number) {
      return {true, TerminationReason::ill_conditioned};
    }
    return {};
  }

  if (state.population.empty()) return {};
  const auto n = static_cast<double>(state.population.size());
  const int d = static_cast<int>(state.population.front().position.size());
  Vector mean = Vector::Zero(d);
  double fitness_mean = 0.0;
  for (const auto& s : state.population) {
    mean += s.position;
    fitness_mean += s.fitness;
  }
  mean /= n;
  fitness_mean /= n;
  Vector variance = Vector::Zero(d);
  double fitness_variance = 0.0;
  for (const auto& s : state.population) {
    variance.array() += (s.position - mean).array().square();
    fitness_variance += (s.fitness - fitness_mean) * (s.fitness - fitness_mean);
  }
  if (std::sqrt(variance.maxCoeff() / n) < constants.eda_min_std) {
    return {true, TerminationReason::population_converged};
  }
  if (std::sqrt(fitness_variance / n) < constants.eda_min_fitness_std) {
    return {true, TerminationReason::fitness_converged};
  }
  return {};
}

TerminationReason run_core_search(SearcherState& state, BudgetedObjective& objective, const SearchDomain& domain,
                                  std::mt19937_64& rng, const SearcherConstants& constants) {
  while (true) {
    const auto check = check_termination(state, constants.tol, constants);
    if (check.terminated) return check.reason;
    if (state.kind == SearcherKind::cmsa) {
      cmsa_generation(state, objective, domain, rng, constants);
    } else {
      eda_generation(state, objective, domain, rng, constants);
    }
  }
}

namespace detail {

void record_generation(SearcherState& state, std::size_t history_length) {
  ++state.generation;
  state.best_history.push_back(state.best_ever.fitness);
  while (state.best_history.size() > history_length) state.best_history.pop_front();
}

std::vector<std::size_t> best_indices(std::span<const Solution> pool, std::size_t count) {
  std::vector<std::size_t> order(pool.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return pool[a].fitness < pool[b].fitness; });
  order.resize(std::min(count, order.size()));
  return order;
}

}  // namespace detail

}  // namespace hillvallea
