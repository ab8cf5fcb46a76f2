#include "hillvallea/optimizer.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

namespace hillvallea {

std::string_view to_string(InjectionMode mode) {
  switch (mode) {
    case InjectionMode::all_optima: return "all";
    case InjectionMode::only_global: return "global";
    case InjectionMode::none: return "none";
  }
  return "unknown";
}

std::optional<InjectionMode> parse_injection_mode(std::string_view text) {
  for (auto mode : {InjectionMode::all_optima, InjectionMode::only_global, InjectionMode::none}) {
    if (text == to_string(mode)) return mode;
  }
  return std::nullopt;
}

double ElitistArchive::fitness_spread() const {
  if (elites.empty()) return 0.0;
  const auto [lo, hi] = std::minmax_element(elites.begin(), elites.end(), [](const Solution& a, const Solution& b) {
    return a.fitness < b.fitness;
  });
  return hi->fitness - lo->fitness;
}

double RunResult::phase_fraction(Phase phase) const {
  if (evaluations_used == 0) return 0.0;
  return static_cast<double>(phase_evaluations[static_cast<std::size_t>(phase)]) /
         static_cast<double>(evaluations_used);
}

std::vector<Solution> truncation_selection(std::span<const Solution> population, double tau) {
  if (population.empty()) {
    throw std::invalid_argument("cannot select from an empty population");
  }
  if (!(tau > 0.0 && tau <= 1.0)) {
    throw std::invalid_argument("selection fraction must lie in (0, 1]");
  }
  const auto count = std::max<std::size_t>(
      1, static_cast<std::size_t>(std::floor(tau * static_cast<double>(population.size()))));
  const auto order = fitness_order(population);
  std::vector<Solution> selection;
  selection.reserve(count);
  for (std::size_t i = 0; i < count; ++i) selection.push_back(population[order[i]]);
  return selection;
}

PostprocessResult postprocess(std::vector<Solution> candidates, ElitistArchive& archive, double tol,
                              BudgetedObjective& objective, int n_test) {
  PostprocessResult result;
  if (candidates.empty()) return result;

  double best = std::numeric_limits<double>::infinity();
  for (const auto& c : candidates) best = std::min(best, c.fitness);
  for (const auto& e : archive.elites) best = std::min(best, e.fitness);

  std::vector<Solution> survivors;
  for (auto& c : candidates) {
    if (c.fitness > best + tol) {
      ++result.discarded;
      result.local_optima.push_back(std::move(c));
    } else {
      survivors.push_back(std::move(c));
    }
  }
  std::stable_sort(survivors.begin(), survivors.end(),
                   [](const Solution& a, const Solution& b) { return a.fitness < b.fitness; });

  const bool beats_an_elite = std::any_of(survivors.begin(), survivors.end(), [&](const Solution& s) {
    return std::any_of(archive.elites.begin(), archive.elites.end(),
                       [&](const Solution& e) { return s.fitness + tol < e.fitness; });
  });
  if (beats_an_elite) {
    archive.elites.clear();
    result.emptied = true;
  }

  std::vector<std::size_t> order;
  for (auto& s : survivors) {
    s.origin = Origin::elite;
    if (objective.exhausted()) {
      ++result.unverified;
      archive.elites.push_back(std::move(s));
      continue;
    }

    // Nearest elites are the likeliest niche mates; test them first.
    order.resize(archive.elites.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
      return (archive.elites[a].position - s.position).squaredNorm() <
             (archive.elites[b].position - s.position).squaredNorm();
    });

    bool shares_niche = false;
    for (auto idx : order) {
      auto& elite = archive.elites[idx];
      if (!hill_valley_test(elite, s, n_test, objective).same_niche) continue;
      shares_niche = true;
      if (s.fitness < elite.fitness) {
        elite = std::move(s);
        ++result.replaced;
      } else {
        ++result.duplicates;
      }
      break;
    }
    if (!shares_niche) {
      archive.elites.push_back(std::move(s));
      ++result.added;
    }
  }
  return result;
}

std::vector<Vector> uniform_sample(const SearchDomain& domain, std::size_t n, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const Vector width = domain.upper() - domain.lower();
  std::vector<Vector> points;
  points.reserve(n);
  for (std::size_t k = 0; k < n; ++k) {
    Vector x(domain.dimension());
    for (int i = 0; i < domain.dimension(); ++i) x[i] = domain.lower()[i] + unit(rng) * width[i];
    points.push_back(domain.clamp(x));
  }
  return points;
}

namespace {

std::mt19937_64 make_stream(std::uint64_t seed, std::uint32_t stream) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32), stream};
  return std::mt19937_64(seq);
}

constexpr std::uint32_t sampling_stream = 1;
constexpr std::uint32_t searcher_stream = 2;

}  // namespace

RunResult run_hillvallea(const BenchmarkProblem& problem, SearcherKind kind, const OptimizerConfig& config,
                         std::uint64_t seed) {
  const std::int64_t budget = config.budget.value_or(problem.budget);
  if (budget <= 0) {
    throw std::invalid_argument("run needs a positive evaluation budget");
  }
  const int d = problem.dimension();
  const auto& domain = problem.domain;
  const double volume = domain.volume();
  const double tau = selection_fraction(kind);

  EvaluationCounter counter(budget);
  auto objective = problem.budgeted(counter, Phase::init);
  auto sampling_rng = make_stream(seed, sampling_stream);
  auto searcher_rng = make_stream(seed, searcher_stream);

  auto population_size = std::max<std::int64_t>(1, std::llround(config.initial_population_factor * d));
  auto cluster_size = std::max(
      1, static_cast<int>(std::ceil(config.cluster_size_factor * recommended_population_size(kind, d))));

  RunResult result;
  result.budget = budget;
  ElitistArchive local_archive;

  while (!counter.exhausted()) {
    RestartLog log;
    log.restart = result.restarts;
    log.population_size = population_size;
    log.cluster_size = cluster_size;

    objective.set_phase(Phase::init);
    const auto draw = static_cast<std::size_t>(std::min(population_size, counter.remaining()));
    std::vector<Solution> population;
    population.reserve(draw + result.archive.size() + local_archive.size());
    for (auto& x : uniform_sample(domain, draw, sampling_rng)) {
      const auto value = objective(x);
      if (!value) break;
      population.push_back(Solution{std::move(x), *value, Origin::sample});
    }
    if (config.injection != InjectionMode::none) {
      population.insert(population.end(), result.archive.elites.begin(), result.archive.elites.end());
    }
    if (config.injection == InjectionMode::all_optima) {
      population.insert(population.end(), local_archive.elites.begin(), local_archive.elites.end());
    }

    const auto selection = truncation_selection(population, tau);
    log.selection_size = selection.size();

    objective.set_phase(Phase::clustering);
    const auto clusters = hill_valley_clustering(selection, volume, d, objective, config.edge_length);
    log.clusters = clusters.size();

    objective.set_phase(Phase::local_opt);
    std::vector<Solution> candidates;
    std::vector<Solution> members;
    for (const auto& cluster : clusters.clusters) {
      const auto& founder = selection[cluster.founder()];
      if (founder.origin != Origin::sample) {
        ++log.skipped_clusters;
        continue;
      }
      if (counter.exhausted()) {
        // Raw founders only stand in while nothing better is archived.
        if (result.archive.empty()) candidates.push_back(founder);
        continue;
      }
      members.clear();
      for (auto idx : cluster.members) members.push_back(selection[idx]);
      auto state = init_from_cluster(members, d, clusters.edge_length, kind, cluster_size, config.searcher);
      run_core_search(state, objective, domain, searcher_rng, config.searcher);
      candidates.push_back(state.best_ever);
      ++log.searchers_run;
    }

    objective.set_phase(Phase::postprocess);
    auto outcome = postprocess(std::move(candidates), result.archive, config.tol, objective,
                               config.postprocess_test_points);
    if (outcome.emptied) {
      local_archive.elites.clear();
    }
    if (config.injection == InjectionMode::all_optima) {
      for (auto& s : outcome.local_optima) {
        s.origin = Origin::local_optimum;
        local_archive.elites.push_back(std::move(s));
      }
    }

    log.new_elites = outcome.added;
    log.replaced_elites = outcome.replaced;
    log.unverified_elites = outcome.unverified;
    log.evaluations = counter.used();
    result.per_restart_log.push_back(log);
    result.trace.push_back(TracePoint{counter.used(), result.archive.elites});
    ++result.restarts;

    if (outcome.added == 0) {
      population_size = std::llround(static_cast<double>(population_size) * config.population_growth);
      cluster_size = static_cast<int>(std::ceil(cluster_size * config.cluster_size_growth));
    }
  }

  result.evaluations_used = counter.used();
  result.phase_evaluations = counter.phases();
  return result;
}

}  // namespace hillvallea
