#pragma once

#include "hillvallea/optimizer.hpp"
#include "hillvallea/problems.hpp"

#include <array>
#include <span>
#include <vector>

namespace hillvallea {

struct MatchedPair {
  Solution reported;
  std::size_t optimum_index = 0;
  double distance = 0.0;
};

struct PeakRatioReport {
  int found = 0;
  int total = 0;
  double ratio = 0.0;
  std::vector<MatchedPair> matched_pairs;
};

/// Fraction of the problem's known global optima that are matched by a
/// reported solution within `epsilon` in fitness and within the problem's
/// niche radius in position. Matching is greedy and injective: reported
/// solutions best first, each to its nearest unmatched qualifying optimum.
PeakRatioReport peak_ratio(std::span<const Solution> reported, const BenchmarkProblem& problem, double epsilon);

struct SweepSummary {
  std::size_t runs = 0;
  double mean_ratio = 0.0;
  double min_ratio = 0.0;
  double max_ratio = 0.0;
  double mean_evaluations = 0.0;
  std::array<double, phase_count> mean_phase_fractions{};
};

/// Arithmetic aggregation over paired run results and peak-ratio reports.
SweepSummary aggregate(std::span<const RunResult> results, std::span<const PeakRatioReport> reports);

}  // namespace hillvallea
