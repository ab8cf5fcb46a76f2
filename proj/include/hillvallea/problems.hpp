#pragma once

#include "hillvallea/types.hpp"

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace hillvallea {

/// Axis-aligned box. Invariant: lower[i] < upper[i] for every coordinate.
class SearchDomain {
 public:
  SearchDomain(Vector lower, Vector upper);
  static SearchDomain cube(int dimension, double lower, double upper);

  int dimension() const { return static_cast<int>(lower_.size()); }
  const Vector& lower() const { return lower_; }
  const Vector& upper() const { return upper_; }
  double volume() const;
  double diagonal() const;
  bool contains(const Vector& x) const;
  Vector clamp(const Vector& x) const;

 private:
  Vector lower_;
  Vector upper_;
};

struct KnownOptimum {
  Vector position;
  double fitness = 0.0;  // internal (minimized) value
};

/// A bounded test problem. `objective` is always minimized; problems that are
/// naturally maximized set `maximization` and store the negated function.
struct BenchmarkProblem {
  int id = 0;
  std::string name;
  std::string key;
  SearchDomain domain;
  Objective objective;
  std::vector<KnownOptimum> known_global_optima;
  std::int64_t budget = 0;
  double niche_radius = 0.0;
  bool maximization = false;

  int dimension() const { return domain.dimension(); }
  /// Converts an internal fitness value to the problem's own sign convention.
  double reported_fitness(double internal) const { return maximization ? -internal : internal; }
  BudgetedObjective budgeted(EvaluationCounter& counter, Phase phase) const;
};

/// Raised for benchmark ids that exist in the suite but are not built in.
class UnsupportedProblemError : public std::invalid_argument {
 public:
  explicit UnsupportedProblemError(int id);
  int id() const { return id_; }

 private:
  int id_;
};

/// Evaluates `problem` at `x`, charging `counter` under `phase`.
/// Returns std::nullopt once the budget is exhausted.
std::optional<double> evaluate(const BenchmarkProblem& problem, const Vector& x,
                               EvaluationCounter& counter, Phase phase);

/// Builds benchmark problem `id` in 1..10. Ids 11..20 throw UnsupportedProblemError.
BenchmarkProblem make_problem(int id);

/// Resolves a problem id from a decimal id, a key such as "vincent-2d" or
/// the display name (case-insensitive). Returns std::nullopt if unknown.
std::optional<int> problem_id_from_name(std::string_view name);

/// Half the smallest pairwise distance between optima, or 1% of the domain
/// diagonal when fewer than two optima are known.
double default_niche_radius(const std::vector<KnownOptimum>& optima, const SearchDomain& domain);

inline constexpr int builtin_problem_count = 10;

/// The suite's functions in their native (maximization) form.
namespace functions {
double five_uneven_peak_trap(const Vector& x);
double equal_maxima(const Vector& x);
double uneven_decreasing_maxima(const Vector& x);
double himmelblau(const Vector& x);
double six_hump_camel_back(const Vector& x);
double shubert(const Vector& x);
double vincent(const Vector& x);
double modified_rastrigin(const Vector& x);
}  // namespace functions

}  // namespace hillvallea
