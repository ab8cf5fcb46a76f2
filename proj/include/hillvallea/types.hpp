#pragma once

#include <Eigen/Dense>

#include <array>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <string_view>

namespace hillvallea {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

/// Where a solution in a population came from. Elites and archived local
/// optima are re-injected on restart and must not be optimized again.
enum class Origin { sample, elite, local_optimum };

/// A point in the search space paired with its (minimized) fitness.
struct Solution {
  Vector position;
  double fitness = 0.0;
  Origin origin = Origin::sample;
};

/// Objective in the internal minimization convention.
using Objective = std::function<double(const Vector&)>;

enum class Phase : std::size_t { init = 0, clustering = 1, local_opt = 2, postprocess = 3 };
inline constexpr std::size_t phase_count = 4;

std::string_view to_string(Phase phase);

/// Hard evaluation budget with per-phase bookkeeping.
/// Invariant: used() <= budget() and used() == sum of phase_used().
class EvaluationCounter {
 public:
  explicit EvaluationCounter(std::int64_t budget);

  std::int64_t budget() const { return budget_; }
  std::int64_t used() const { return used_; }
  std::int64_t remaining() const { return budget_ - used_; }
  bool exhausted() const { return used_ >= budget_; }
  std::int64_t phase_used(Phase phase) const { return phase_used_[static_cast<std::size_t>(phase)]; }
  const std::array<std::int64_t, phase_count>& phases() const { return phase_used_; }

  /// Books one evaluation against `phase`. Returns false, booking nothing,
  /// when the budget is already spent.
  bool try_charge(Phase phase);

 private:
  std::int64_t budget_;
  std::int64_t used_ = 0;
  std::array<std::int64_t, phase_count> phase_used_{};
};

/// An objective bound to a counter and the phase its evaluations are booked
/// under. Returns std::nullopt instead of evaluating once the budget is spent.
class BudgetedObjective {
 public:
  BudgetedObjective(Objective objective, int dimension, EvaluationCounter& counter, Phase phase);

  /// Throws std::invalid_argument on dimension mismatch.
  std::optional<double> operator()(const Vector& x);

  void set_phase(Phase phase) { phase_ = phase; }
  Phase phase() const { return phase_; }
  int dimension() const { return dimension_; }
  bool exhausted() const { return counter_->exhausted(); }
  EvaluationCounter& counter() { return *counter_; }
  const EvaluationCounter& counter() const { return *counter_; }

 private:
  Objective objective_;
  int dimension_;
  EvaluationCounter* counter_;
  Phase phase_;
};

}  // namespace hillvallea
