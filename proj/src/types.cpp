#include "hillvallea/types.hpp"

#include <stdexcept>
#include <string>

namespace hillvallea {

std::string_view to_string(Phase phase) {
  switch (phase) {
    case Phase::init: return "init";
    case Phase::clustering: return "clustering";
    case Phase::local_opt: return "local_opt";
    case Phase::postprocess: return "postprocess";
  }
  return "unknown";
}

EvaluationCounter::EvaluationCounter(std::int64_t budget) : budget_(budget) {
  if (budget < 0) {
    throw std::invalid_argument("evaluation budget must be nonnegative");
  }
}

bool EvaluationCounter::try_charge(Phase phase) {
  if (exhausted()) {
    return false;
  }
  ++used_;
  ++phase_used_[static_cast<std::size_t>(phase)];
  return true;
}

BudgetedObjective::BudgetedObjective(Objective objective, int dimension, EvaluationCounter& counter,
                                     Phase phase)
    : objective_(std::move(objective)), dimension_(dimension), counter_(&counter), phase_(phase) {}

std::optional<double> BudgetedObjective::operator()(const Vector& x) {
  if (x.size() != dimension_) {
    throw std::invalid_argument("point has dimension " + std::to_string(x.size()) + ", expected " +
                                std::to_string(dimension_));
  }
  if (!counter_->try_charge(phase_)) {
    return std::nullopt;
  }
  return objective_(x);
}

}  // namespace hillvallea
