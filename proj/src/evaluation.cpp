#include "hillvallea/evaluation.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

namespace hillvallea {

PeakRatioReport peak_ratio(std::span<const Solution> reported, const BenchmarkProblem& problem, double epsilon) {
  if (!(epsilon > 0.0)) {
    throw std::invalid_argument("peak ratio accuracy must be positive");
  }
  const auto& optima = problem.known_global_optima;
  PeakRatioReport report;
  report.total = static_cast<int>(optima.size());
  if (optima.empty()) return report;

  std::vector<std::size_t> order(reported.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  // Ties are broken by position so the result does not depend on list order.
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    const auto& sa = reported[a];
    const auto& sb = reported[b];
    if (sa.fitness != sb.fitness) return sa.fitness < sb.fitness;
    return std::lexicographical_compare(sa.position.begin(), sa.position.end(), sb.position.begin(),
                                        sb.position.end());
  });

  std::vector<bool> taken(optima.size(), false);
  for (auto r : order) {
    const auto& s = reported[r];
    std::size_t nearest = optima.size();
    double nearest_distance = std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k < optima.size(); ++k) {
      if (taken[k] || std::abs(s.fitness - optima[k].fitness) > epsilon) continue;
      const double distance = (s.position - optima[k].position).norm();
      if (distance <= problem.niche_radius && distance < nearest_distance) {
        nearest = k;
        nearest_distance = distance;
      }
    }
    if (nearest < optima.size()) {
      taken[nearest] = true;
      report.matched_pairs.push_back({s, nearest, nearest_distance});
    }
  }
  report.found = static_cast<int>(report.matched_pairs.size());
  report.ratio = static_cast<double>(report.found) / static_cast<double>(report.total);
  return report;
}

SweepSummary aggregate(std::span<const RunResult> results, std::span<const PeakRatioReport> reports) {
  if (results.empty() || results.size() != reports.size()) {
    throw std::invalid_argument("aggregate needs a nonempty, paired list of runs and reports");
  }
  SweepSummary summary;
  summary.runs = results.size();
  summary.min_ratio = std::numeric_limits<double>::infinity();
  summary.max_ratio = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < results.size(); ++i) {
    summary.mean_ratio += reports[i].ratio;
    summary.min_ratio = std::min(summary.min_ratio, reports[i].ratio);
    summary.max_ratio = std::max(summary.max_ratio, reports[i].ratio);
    summary.mean_evaluations += static_cast<double>(results[i].evaluations_used);
    for (std::size_t p = 0; p < phase_count; ++p) {
      summary.mean_phase_fractions[p] += results[i].phase_fraction(static_cast<Phase>(p));
    }
  }
  const auto n = static_cast<double>(results.size());
  summary.mean_ratio /= n;
  summary.mean_evaluations /= n;
  for (auto& f : summary.mean_phase_fractions) f /= n;
  return summary;
}

}  // namespace hillvallea
