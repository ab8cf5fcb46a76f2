#include "hillvallea/core_search.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace hillvallea {

namespace {

struct Offspring {
  Solution solution;
  Vector z;
  double sigma;
};

}  // namespace

void cmsa_generation(SearcherState& state, BudgetedObjective& objective, const SearchDomain& domain,
                     std::mt19937_64& rng, const SearcherConstants& constants) {
  if (state.kind != SearcherKind::cmsa) {
    throw std::invalid_argument("cmsa_generation called on a non-CMSA searcher");
  }
  const int d = state.dimension();
  const int lambda = state.model.population_size;
  const int mu = std::max(1, lambda / 2);
  const double tau_sigma = constants.cmsa_tau_sigma_scale / std::sqrt(2.0 * d);
  const double tau_c = 1.0 + d * (d + 1.0) / (2.0 * mu);

  Eigen::SelfAdjointEigenSolver<Matrix> eigen(state.model.covariance);
  const Matrix basis = eigen.eigenvectors();
  const Vector scales = eigen.eigenvalues().cwiseMax(0.0).cwiseSqrt();

  std::normal_distribution<double> normal(0.0, 1.0);
  const Solution previous_best = state.best_ever;

  std::vector<Offspring> offspring;
  offspring.reserve(static_cast<std::size_t>(lambda));
  for (int l = 0; l < lambda; ++l) {
    const double sigma_l = state.sigma * std::exp(tau_sigma * normal(rng));
    Vector n(d);
    for (int i = 0; i < d; ++i) n[i] = normal(rng);
    Vector z = basis * scales.cwiseProduct(n);
    Vector x = domain.clamp(state.model.mean + sigma_l * z);
    const auto value = objective(x);
    if (!value) {
      state.budget_exhausted = true;
      break;
    }
    offspring.push_back({Solution{std::move(x), *value, Origin::sample}, std::move(z), sigma_l});
    if (offspring.back().solution.fitness < state.best_ever.fitness) {
      state.best_ever = offspring.back().solution;
    }
  }

  const std::size_t history = static_cast<std::size_t>(state.improvement_window()) + 1;
  if (state.budget_exhausted) {
    detail::record_generation(state, history);
    return;
  }

  // Elitism: the previous best takes the place of the worst offspring.
  auto worst = std::max_element(offspring.begin(), offspring.end(), [](const Offspring& a, const Offspring& b) {
    return a.solution.fitness < b.solution.fitness;
  });
  if (previous_best.fitness < worst->solution.fitness) {
    *worst = Offspring{previous_best, (previous_best.position - state.model.mean) / state.sigma, state.sigma};
  }

  std::vector<Solution> pool;
  pool.reserve(offspring.size());
  for (const auto& o : offspring) pool.push_back(o.solution);
  const auto selected = detail::best_indices(pool, static_cast<std::size_t>(mu));

  Vector mean = Vector::Zero(d);
  double sigma = 0.0;
  Matrix rank_mu = Matrix::Zero(d, d);
  for (auto idx : selected) {
    mean += offspring[idx].solution.position;
    sigma += offspring[idx].sigma;
    rank_mu.noalias() += offspring[idx].z * offspring[idx].z.transpose();
  }
  const auto count = static_cast<double>(selected.size());
  state.model.mean = mean / count;
  state.sigma = sigma / count;
  Matrix c = (1.0 - 1.0 / tau_c) * state.model.covariance + (1.0 / tau_c) * (rank_mu / count);
  state.model.covariance = 0.5 * (c + c.transpose());

  state.population = std::move(pool);
  detail::record_generation(state, history);
}

}  // namespace hillvallea
