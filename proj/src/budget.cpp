#include "seqsandbox/budget.hpp"

#include <string>

namespace seqsandbox {

void ExplorationBudget::validate() const {
  if (batch_size < 1) throw std::invalid_argument("batch size must be at least 1");
  if (virtual_ratio < 1) throw std::invalid_argument("virtual screening ratio must be at least 1");
  if (rounds < 1) throw std::invalid_argument("rounds must be at least 1");
}

void MeteredModel::charge() {
  const auto before = used_.fetch_add(1);
  if (before >= cap_) {
    used_.fetch_sub(1);
    throw BudgetViolation("surrogate query cap of " + std::to_string(cap_) + " exceeded");
  }
}

double MeteredModel::predict(const Sequence& x) {
  charge();
  return model_.predict(x);
}

std::vector<double> MeteredModel::member_predictions(const Sequence& x) {
  charge();
  return model_.member_predictions(x);
}

}  // namespace seqsandbox
