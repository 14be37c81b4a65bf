#pragma once

#include <atomic>
#include <cstddef>
#include <stdexcept>
#include <vector>

#include "seqsandbox/surrogate.hpp"

namespace seqsandbox {

// Thrown when a round exceeds its oracle or surrogate query allowance, or an
// explorer breaks its proposal contract.
class BudgetViolation : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct ExplorationBudget {
  std::size_t batch_size = 100;     // B: ground-truth queries per round
  std::size_t virtual_ratio = 20;   // v: surrogate queries per proposed sequence
  std::size_t rounds = 10;          // T

  std::size_t model_query_cap() const { return batch_size * virtual_ratio; }
  void validate() const;
};

// Surrogate access for one round. Every call is charged; a call beyond the cap
// throws BudgetViolation instead of reaching the model.
class MeteredModel {
 public:
  MeteredModel(const SurrogateModel& model, std::size_t cap) : model_(model), cap_(cap) {}

  double predict(const Sequence& x);
  std::vector<double> member_predictions(const Sequence& x);
  std::vector<double> member_weights() const { return model_.member_weights(); }

  std::size_t cap() const { return cap_; }
  std::size_t used() const { return used_.load(); }
  std::size_t remaining() const {
    const auto u = used();
    return u >= cap_ ? 0 : cap_ - u;
  }

 private:
  void charge();

  const SurrogateModel& model_;
  std::size_t cap_;
  std::atomic<std::size_t> used_{0};
};

}  // namespace seqsandbox
