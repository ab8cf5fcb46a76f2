#include "hillvallea/core_search.hpp"

#include <Eigen/Cholesky>

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace hillvallea {

namespace {

// Lower-triangular factor of the covariance, or nullopt if it is not
// positive definite.
std::optional<Matrix> cholesky_factor(const Matrix& covariance) {
  Eigen::LLT<Matrix> llt(covariance);
  if (llt.info() != Eigen::Success) return std::nullopt;
  Matrix l = llt.matrixL();
  if (!l.allFinite()) return std::nullopt;
  return l;
}

// Mahalanobis length of `delta` under factor `l` (lower triangular). Zero
// rows of a diagonal factor are ignored.
double mahalanobis(const Matrix& l, const Vector& delta, bool diagonal) {
  if (diagonal) {
    double sum = 0.0;
    for (Eigen::Index i = 0; i < delta.size(); ++i) {
      if (l(i, i) > 0.0) sum += std::pow(delta[i] / l(i, i), 2.0);
    }
    return std::sqrt(sum);
  }
  return l.triangularView<Eigen::Lower>().solve(delta).norm();
}

}  // namespace

void eda_generation(SearcherState& state, BudgetedObjective& objective, const SearchDomain& domain,
                    std::mt19937_64& rng, const SearcherConstants& constants) {
  if (state.kind == SearcherKind::cmsa) {
    throw std::invalid_argument("eda_generation called on a CMSA searcher");
  }
  const int d = state.dimension();
  const int n = state.model.population_size;
  const double tau = selection_fraction(state.kind);
  const auto n_selected = static_cast<std::size_t>(std::max(1, static_cast<int>(std::floor(tau * n))));
  const int n_ams = static_cast<int>(std::floor(constants.ams_fraction * tau * n));
  const double c = state.multiplier;

  bool diagonal = is_univariate(state.kind);
  Matrix factor;
  if (!diagonal) {
    if (auto l = cholesky_factor(state.model.covariance)) {
      factor = std::move(*l);
    } else {
      diagonal = true;
    }
  }
  if (diagonal) {
    factor = Matrix(state.model.covariance.diagonal().cwiseMax(0.0).cwiseSqrt().asDiagonal());
  }

  Vector shift = Vector::Zero(d);
  if (state.has_previous_mean) {
    shift = constants.ams_delta * c * (state.model.mean - state.previous_mean);
  }

  std::normal_distribution<double> normal(0.0, 1.0);
  const Solution previous_best = state.best_ever;
  std::vector<Solution> offspring;
  offspring.reserve(static_cast<std::size_t>(n));
  for (int l = 0; l < n; ++l) {
    Vector z(d);
    for (int i = 0; i < d; ++i) z[i] = normal(rng);
    Vector x = state.model.mean + c * (factor * z);
    if (l < n_ams && state.has_previous_mean) x += shift;
    x = domain.clamp(x);
    const auto value = objective(x);
    if (!value) {
      state.budget_exhausted = true;
      break;
    }
    offspring.push_back(Solution{std::move(x), *value, Origin::sample});
  }

  const std::size_t history = static_cast<std::size_t>(state.improvement_window()) + 1;

  // Distribution multiplier: grow on improvements far from the mean, decay
  // while nothing improves.
  if (!offspring.empty()) {
    const auto best = std::min_element(offspring.begin(), offspring.end(),
                                       [](const Solution& a, const Solution& b) { return a.fitness < b.fitness; });
    if (best->fitness < previous_best.fitness) {
      state.best_ever = *best;
      const double distance = c > 0.0 ? mahalanobis(factor, (best->position - state.model.mean) / c, diagonal) : 0.0;
      if (distance > constants.sdr_threshold) {
        state.multiplier = std::min(c / constants.multiplier_decay, constants.multiplier_max);
      }
    } else {
      state.multiplier = std::max(c * constants.multiplier_decay, constants.multiplier_min);
    }
  }

  if (state.budget_exhausted) {
    detail::record_generation(state, history);
    return;
  }

  std::vector<Solution> pool = offspring;
  pool.push_back(previous_best);
  const auto selected = detail::best_indices(pool, n_selected);

  Vector mean = Vector::Zero(d);
  for (auto idx : selected) mean += pool[idx].position;
  mean /= static_cast<double>(selected.size());

  Matrix fitted = Matrix::Zero(d, d);
  for (auto idx : selected) {
    const Vector delta = pool[idx].position - mean;
    fitted.noalias() += delta * delta.transpose();
  }
  fitted /= static_cast<double>(selected.size());
  if (is_univariate(state.kind) || !cholesky_factor(fitted)) {
    fitted = Matrix(fitted.diagonal().asDiagonal());
  }

  Matrix covariance = fitted;
  if (is_incremental(state.kind)) {
    covariance = (1.0 - constants.incremental_eta) * state.model.covariance + constants.incremental_eta * fitted;
  }
  if (!(covariance.diagonal().maxCoeff() > 0.0)) {
    state.degenerate = true;
  }

  state.previous_mean = state.model.mean;
  state.has_previous_mean = true;
  state.model.mean = std::move(mean);
  state.model.covariance = 0.5 * (covariance + covariance.transpose());
  state.population = std::move(offspring);
  detail::record_generation(state, history);
}

}  // namespace hillvallea
