#pragma once

#include <optional>
#include <unordered_map>
#include <vector>

#include "seqsandbox/sequence.hpp"

namespace seqsandbox {

struct Measurement {
  Sequence sequence;
  double fitness = 0.0;
  std::size_t round = 0;
};

// Ground-truth labels accumulated over rounds. A repeated sequence overwrites
// the earlier entry in place and bumps overwrite_count().
class MeasuredData {
 public:
  // Returns false when the sequence was already present.
  bool add(const Sequence& x, double fitness, std::size_t round);

  std::size_t size() const { return entries_.size(); }
  bool empty() const { return entries_.empty(); }
  const std::vector<Measurement>& entries() const { return entries_; }
  const Measurement& operator[](std::size_t i) const { return entries_[i]; }
  bool contains(const Sequence& x) const { return index_.count(x) != 0; }
  std::optional<double> fitness_of(const Sequence& x) const;
  std::size_t overwrite_count() const { return overwrites_; }

  // Highest round index present; 0 when empty.
  std::size_t last_round() const;
  std::vector<Measurement> round_batch(std::size_t round) const;
  double mean_fitness() const;
  double max_fitness() const;

  // Index of the first entry (in insertion order) at minimum Hamming distance.
  struct Nearest {
    std::size_t index = 0;
    std::size_t distance = 0;
  };
  Nearest nearest(const Sequence& x) const;

 private:
  std::vector<Measurement> entries_;
  std::unordered_map<Sequence, std::size_t, SequenceHash> index_;
  std::vector<std::uint8_t> packed_;  // entries' symbols, back to back
  std::size_t length_ = 0;
  std::size_t overwrites_ = 0;
};

}  // namespace seqsandbox
