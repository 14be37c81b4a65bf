#include <algorithm>
#include <unordered_set>

#include "seqsandbox/explorer.hpp"

namespace seqsandbox {

double CachedScorer::score(const Sequence& x) {
  if (auto it = scores_.find(x); it != scores_.end()) return it->second;
  const double s = model_.predict(x);
  scores_.emplace(x, s);
  return s;
}

bool CandidatePool::add(const Sequence& x, double score) {
  if (!index_.emplace(x, items_.size()).second) return false;
  items_.push_back({x, score});
  return true;
}

void sort_by_score(std::vector<ScoredSequence>& items) {
  std::stable_sort(items.begin(), items.end(), [](const ScoredSequence& a, const ScoredSequence& b) {
    if (a.score != b.score) return a.score > b.score;
    return a.sequence < b.sequence;
  });
}

std::vector<Sequence> select_top_unmeasured(std::vector<ScoredSequence> candidates, const MeasuredData& history,
                                            std::size_t count) {
  sort_by_score(candidates);
  std::vector<Sequence> out;
  std::unordered_set<Sequence, SequenceHash> taken;
  for (auto& c : candidates) {
    if (out.size() >= count) break;
    if (history.contains(c.sequence) || !taken.insert(c.sequence).second) continue;
    out.push_back(std::move(c.sequence));
  }
  return out;
}

std::size_t backfill(std::vector<Sequence>& batch, const std::vector<Sequence>& parents, const MeasuredData& history,
                     std::size_t count, double mutation_rate, Rng& rng) {
  std::unordered_set<Sequence, SequenceHash> taken(batch.begin(), batch.end());
  std::size_t added = 0;
  const std::size_t attempts = 200 * count + 10000;
  if (!parents.empty()) {
    std::uniform_int_distribution<std::size_t> pick(0, parents.size() - 1);
    for (std::size_t i = 0; i < attempts && batch.size() < count; ++i) {
      auto child = mutate_at_least_once(parents[pick(rng)], mutation_rate, rng);
      if (history.contains(child) || !taken.insert(child).second) continue;
      batch.push_back(std::move(child));
      ++added;
    }
  }
  // Tiny or exhausted neighborhoods: fall back to uniform random sequences.
  if (batch.size() < count && (!parents.empty() || !history.empty())) {
    const auto& proto = parents.empty() ? history[0].sequence : parents.front();
    for (std::size_t i = 0; i < attempts && batch.size() < count; ++i) {
      auto x = random_sequence(proto.size(), proto.alphabet_ptr(), rng);
      if (history.contains(x) || !taken.insert(x).second) continue;
      batch.push_back(std::move(x));
      ++added;
    }
  }
  if (batch.size() < count) throw BudgetViolation("cannot assemble a batch of distinct unmeasured sequences");
  return added;
}

}  // namespace seqsandbox
