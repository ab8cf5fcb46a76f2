#include "hillvallea/hillvalley.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <unordered_map>

namespace hillvallea {

HillValleyOutcome hill_valley_test(const Solution& left, const Solution& right, int n_test,
                                   BudgetedObjective& objective) {
  if (left.position.size() != right.position.size()) {
    throw std::invalid_argument("hill-valley test endpoints differ in dimension");
  }
  if (n_test < 1) {
    throw std::invalid_argument("hill-valley test needs at least one test point");
  }
  const double worst_end = std::max(left.fitness, right.fitness);
  const Vector direction = left.position - right.position;

  HillValleyOutcome outcome;
  for (int k = 1; k <= n_test; ++k) {
    const Vector test = right.position + (static_cast<double>(k) / (n_test + 1)) * direction;
    const auto value = objective(test);
    if (!value) {
      outcome.budget_exhausted = true;
      return outcome;
    }
    ++outcome.evaluations;
    if (worst_end < *value) {
      outcome.same_niche = false;
      return outcome;
    }
  }
  return outcome;
}

double expected_edge_length(double volume, std::size_t n, int d) {
  if (!(volume > 0.0) || n == 0 || d < 1) {
    throw std::invalid_argument("expected edge length needs positive volume, count and dimension");
  }
  return std::pow(volume / static_cast<double>(n), 1.0 / d);
}

int test_point_count(double edge_length, double eel) {
  if (!(eel > 0.0)) {
    throw std::invalid_argument("edge length scale must be positive");
  }
  return 1 + static_cast<int>(std::floor(edge_length / eel));
}

std::vector<std::size_t> fitness_order(std::span<const Solution> solutions) {
  std::vector<std::size_t> order(solutions.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return solutions[a].fitness < solutions[b].fitness; });
  return order;
}

namespace {

// Points arrive in fitness order; each query returns the k nearest earlier
// points as (distance, rank) pairs, lexicographically smallest first, exactly
// as a full scan would.
class NeighbourIndex {
 public:
  NeighbourIndex(std::span<const Solution> selection, const std::vector<std::size_t>& order, int d)
      : selection_(selection), order_(order), d_(d) {
    use_grid_ = d <= max_grid_dimension && order.size() >= min_grid_size;
    if (!use_grid_) return;
    lower_ = selection[order[0]].position;
    Vector upper = lower_;
    for (auto idx : order) {
      lower_ = lower_.cwiseMin(selection[idx].position);
      upper = upper.cwiseMax(selection[idx].position);
    }
    double volume = 1.0;
    int spread_axes = 0;
    for (int k = 0; k < d; ++k) {
      if (upper[k] > lower_[k]) {
        volume *= upper[k] - lower_[k];
        ++spread_axes;
      }
    }
    if (spread_axes == 0) {
      use_grid_ = false;
      return;
    }
    cell_ = std::pow(volume / static_cast<double>(order.size()), 1.0 / spread_axes);
    for (int k = 0; k < d; ++k) cell_ = std::max(cell_, (upper[k] - lower_[k]) / max_cells_per_axis);
  }

  void insert(std::size_t rank) {
    if (use_grid_) cells_[key(cell_of(position(rank)))].push_back(rank);
    ++inserted_;
  }

  void nearest(std::size_t rank, std::size_t k, std::vector<std::pair<double, std::size_t>>& out) const {
    out.clear();
    const Vector& x = position(rank);
    auto consider = [&](std::size_t j) { out.emplace_back((x - position(j)).norm(), j); };
    auto finish = [&] {
      std::partial_sort(out.begin(), out.begin() + static_cast<std::ptrdiff_t>(k), out.end());
      out.resize(k);
    };
    if (use_grid_) {
      const auto home = cell_of(x);
      std::array<std::int64_t, max_grid_dimension> offset{};
      for (std::int64_t ring = 0;; ++ring) {
        if (ring_cells(ring) > inserted_) break;
        visit_ring(home, ring, 0, false, offset, [&](const std::vector<std::size_t>& members) {
          for (auto j : members) consider(j);
        });
        // Unvisited points lie at least ring * cell_ away, up to rounding in cell_of.
        if (out.size() >= k) {
          std::nth_element(out.begin(), out.begin() + static_cast<std::ptrdiff_t>(k - 1), out.end());
          if (out[k - 1].first < (static_cast<double>(ring) - 1e-6) * cell_) return finish();
        }
      }
      out.clear();
    }
    for (std::size_t j = 0; j < inserted_; ++j) consider(j);
    finish();
  }

 private:
  static constexpr int max_grid_dimension = 4;
  static constexpr std::size_t min_grid_size = 256;
  static constexpr double max_cells_per_axis = 1 << 12;

  using CellCoord = std::array<std::int64_t, max_grid_dimension>;

  const Vector& position(std::size_t rank) const { return selection_[order_[rank]].position; }

  CellCoord cell_of(const Vector& x) const {
    CellCoord c{};
    for (int k = 0; k < d_; ++k) c[k] = static_cast<std::int64_t>(std::floor((x[k] - lower_[k]) / cell_));
    return c;
  }

  static constexpr std::int64_t axis_cells = static_cast<std::int64_t>(max_cells_per_axis) + 1;

  static std::uint64_t key(const CellCoord& c) {
    std::uint64_t packed = 0;
    for (auto v : c) packed = packed * axis_cells + static_cast<std::uint64_t>(v);
    return packed;
  }

  std::size_t ring_cells(std::int64_t ring) const {
    double cells = 1.0;
    for (int k = 0; k < d_; ++k) cells *= static_cast<double>(2 * ring + 1);
    return cells > 1e18 ? std::numeric_limits<std::size_t>::max() : static_cast<std::size_t>(cells);
  }

  // Cells whose Chebyshev offset from `home` is exactly `ring`.
  template <typename F>
  void visit_ring(const CellCoord& home, std::int64_t ring, int axis, bool on_shell, CellCoord& offset,
                  F&& visit) const {
    if (axis == d_) {
      if (!on_shell && ring > 0) return;
      CellCoord c = home;
      for (int k = 0; k < d_; ++k) {
        c[k] += offset[k];
        if (c[k] < 0 || c[k] >= axis_cells) return;
      }
      if (auto it = cells_.find(key(c)); it != cells_.end()) visit(it->second);
      return;
    }
    for (std::int64_t o = -ring; o <= ring; ++o) {
      offset[axis] = o;
      visit_ring(home, ring, axis + 1, on_shell || o == -ring || o == ring, offset, visit);
    }
  }

  std::span<const Solution> selection_;
  const std::vector<std::size_t>& order_;
  int d_;
  bool use_grid_ = false;
  Vector lower_;
  double cell_ = 0.0;
  std::size_t inserted_ = 0;
  std::unordered_map<std::uint64_t, std::vector<std::size_t>> cells_;
};

}  // namespace

double average_edge_length(std::span<const Solution> sorted) {
  if (sorted.size() < 2) {
    return 0.0;
  }
  std::vector<std::size_t> identity(sorted.size());
  std::iota(identity.begin(), identity.end(), std::size_t{0});
  NeighbourIndex index(sorted, identity, static_cast<int>(sorted[0].position.size()));
  index.insert(0);
  std::vector<std::pair<double, std::size_t>> nearest;
  double total = 0.0;
  for (std::size_t i = 1; i < sorted.size(); ++i) {
    index.nearest(i, 1, nearest);
    index.insert(i);
    total += nearest[0].first;
  }
  return total / static_cast<double>(sorted.size() - 1);
}

ClusterSet hill_valley_clustering(std::span<const Solution> selection, double volume, int d,
                                  BudgetedObjective& objective, EdgeLengthMode mode) {
  if (selection.empty()) {
    throw std::invalid_argument("cannot cluster an empty selection");
  }
  const auto order = fitness_order(selection);
  const auto n = order.size();

  ClusterSet result;
  if (mode == EdgeLengthMode::average) {
    std::vector<Solution> sorted;
    sorted.reserve(n);
    for (auto idx : order) sorted.push_back(selection[idx]);
    result.edge_length = average_edge_length(sorted);
  }
  if (!(result.edge_length > 0.0)) {
    // Also the fallback when every solution coincides under `average`.
    result.edge_length = expected_edge_length(volume, n, d);
  }

  // cluster_of[r] is the cluster of the r-th best solution.
  std::vector<std::size_t> cluster_of(n);
  result.clusters.push_back(Cluster{{order[0]}});
  cluster_of[0] = 0;

  std::vector<std::pair<double, std::size_t>> distances;
  std::vector<std::size_t> checked;
  const auto max_neighbours = static_cast<std::size_t>(d) + 1;
  NeighbourIndex index(selection, order, d);
  index.insert(0);

  for (std::size_t i = 1; i < n; ++i) {
    const auto& candidate = selection[order[i]];

    if (objective.exhausted()) {
      index.insert(i);
      result.complete = false;
      cluster_of[i] = result.clusters.size();
      result.clusters.push_back(Cluster{{order[i]}});
      continue;
    }

    // Ties in distance fall back to fitness rank.
    const auto neighbours = std::min(i, max_neighbours);
    index.nearest(i, neighbours, distances);
    index.insert(i);

    checked.clear();
    bool joined = false;
    for (std::size_t k = 0; k < neighbours; ++k) {
      const auto [distance, rank] = distances[k];
      const auto cluster = cluster_of[rank];
      if (std::find(checked.begin(), checked.end(), cluster) != checked.end()) {
        continue;
      }
      checked.push_back(cluster);

      const int n_test = test_point_count(distance, result.edge_length);
      const auto outcome = hill_valley_test(selection[order[rank]], candidate, n_test, objective);
      if (outcome.same_niche) {
        result.clusters[cluster].members.push_back(order[i]);
        cluster_of[i] = cluster;
        joined = true;
        break;
      }
    }
    if (!joined) {
      cluster_of[i] = result.clusters.size();
      result.clusters.push_back(Cluster{{order[i]}});
    }
  }
  return result;
}

}  // namespace hillvallea
