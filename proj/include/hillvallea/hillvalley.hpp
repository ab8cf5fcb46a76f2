#pragma once

#include "hillvallea/types.hpp"

#include <cstddef>
#include <span>
#include <vector>

namespace hillvallea {

struct HillValleyOutcome {
  bool same_niche = true;
  int evaluations = 0;
  bool budget_exhausted = false;
};

/// Evaluates up to `n_test` equidistant interior points of the segment from
/// `right` to `left` and reports a hill (different niches) at the first point
/// strictly worse than both endpoints. Running out of budget mid-test counts
/// as "same niche".
HillValleyOutcome hill_valley_test(const Solution& left, const Solution& right, int n_test,
                                   BudgetedObjective& objective);

/// (volume / n)^(1/d): the spacing of n points spread evenly over the domain.
double expected_edge_length(double volume, std::size_t n, int d);

/// 1 + floor(edge_length / eel).
int test_point_count(double edge_length, double eel);

/// How the clustering scales its test-point count. `expected` needs the
/// domain volume; `average` uses the mean nearest-better distance instead.
enum class EdgeLengthMode { expected, average };

struct Cluster {
  /// Indices into the clustered selection, founder (fittest) first.
  std::vector<std::size_t> members;

  std::size_t founder() const { return members.front(); }
  std::size_t size() const { return members.size(); }
};

struct ClusterSet {
  /// Ordered by founder fitness, best first.
  std::vector<Cluster> clusters;
  /// Edge length the test-point counts were scaled by.
  double edge_length = 0.0;
  /// False when the budget ran out and the tail was split into singletons.
  bool complete = true;

  std::size_t size() const { return clusters.size(); }
};

/// Mean distance of every solution (except the best) to its nearest better
/// solution. `sorted` must be ordered best first.
double average_edge_length(std::span<const Solution> sorted);

/// Partitions `selection` into presumed niches. Member indices refer to
/// positions in `selection`.
ClusterSet hill_valley_clustering(std::span<const Solution> selection, double volume, int d,
                                  BudgetedObjective& objective,
                                  EdgeLengthMode mode = EdgeLengthMode::expected);

/// Indices of `solutions` sorted best first; ties keep input order.
std::vector<std::size_t> fitness_order(std::span<const Solution> solutions);

}  // namespace hillvallea
