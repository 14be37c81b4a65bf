#include "seqsandbox/measured.hpp"

#include <algorithm>
#include <limits>

namespace seqsandbox {

bool MeasuredData::add(const Sequence& x, double fitness, std::size_t round) {
  if (fitness < 0.0 || fitness > 1.0) throw std::invalid_argument("measured fitness outside [0, 1]");
  if (entries_.empty()) {
    length_ = x.size();
  } else if (x.size() != length_) {
    throw SequenceError("measured sequences must share one length");
  }
  auto [it, inserted] = index_.emplace(x, entries_.size());
  if (!inserted) {
    auto& e = entries_[it->second];
    e.fitness = fitness;
    e.round = round;
    ++overwrites_;
    return false;
  }
  entries_.push_back({x, fitness, round});
  packed_.insert(packed_.end(), x.indices().begin(), x.indices().end());
  return true;
}

std::optional<double> MeasuredData::fitness_of(const Sequence& x) const {
  auto it = index_.find(x);
  if (it == index_.end()) return std::nullopt;
  return entries_[it->second].fitness;
}

std::size_t MeasuredData::last_round() const {
  std::size_t r = 0;
  for (const auto& e : entries_) r = std::max(r, e.round);
  return r;
}

std::vector<Measurement> MeasuredData::round_batch(std::size_t round) const {
  std::vector<Measurement> out;
  for (const auto& e : entries_) {
    if (e.round == round) out.push_back(e);
  }
  return out;
}

double MeasuredData::mean_fitness() const {
  if (entries_.empty()) return 0.0;
  double s = 0.0;
  for (const auto& e : entries_) s += e.fitness;
  return s / static_cast<double>(entries_.size());
}

double MeasuredData::max_fitness() const {
  double m = 0.0;
  for (const auto& e : entries_) m = std::max(m, e.fitness);
  return m;
}

MeasuredData::Nearest MeasuredData::nearest(const Sequence& x) const {
  if (entries_.empty()) throw std::logic_error("nearest neighbor of an empty measured set");
  if (x.size() != length_) throw SequenceError("query length does not match measured sequences");
  auto it = index_.find(x);
  if (it != index_.end()) return {it->second, 0};
  Nearest best{0, std::numeric_limits<std::size_t>::max()};
  const auto* query = x.indices().data();
  for (std::size_t i = 0; i < entries_.size(); ++i) {
    const auto* row = packed_.data() + i * length_;
    std::size_t d = 0;
    for (std::size_t p = 0; p < length_ && d < best.distance; ++p) d += row[p] != query[p];
    if (d < best.distance) {
      best = {i, d};
      if (d == 1) break;
    }
  }
  return best;
}

}  // namespace seqsandbox
