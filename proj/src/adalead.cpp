#include <algorithm>

#include "seqsandbox/explorer.hpp"

namespace seqsandbox {

void AdaLeadConfig::validate() const {
  if (!(kappa >= 0.0 && kappa < 1.0)) throw std::invalid_argument("kappa must lie in [0, 1)");
  if (!(recombination_rate >= 0.0 && recombination_rate <= 1.0)) {
    throw std::invalid_argument("recombination rate must lie in [0, 1]");
  }
  if (mutation_rate && !(*mutation_rate >= 0.0 && *mutation_rate <= 1.0)) {
    throw std::invalid_argument("mutation rate must lie in [0, 1]");
  }
  if (rollouts_per_parent < 1) throw std::invalid_argument("rollouts per parent must be at least 1");
}

std::vector<Measurement> adalead_seeds(const std::vector<Measurement>& batch, double kappa) {
  if (batch.empty()) return {};
  double top = batch.front().fitness;
  for (const auto& m : batch) top = std::max(top, m.fitness);
  const double cutoff = top * (1.0 - kappa);
  std::vector<Measurement> seeds;
  for (const auto& m : batch) {
    if (m.fitness >= cutoff) seeds.push_back(m);
  }
  return seeds;
}

std::vector<ScoredSequence> rollout(const Sequence& parent, CachedScorer& scorer, double mutation_rate, Rng& rng) {
  std::vector<ScoredSequence> children;
  if (!scorer.can_score(parent)) return children;
  const double root = scorer.score(parent);
  // Cached children are free, so bound the walk by the meter size as well.
  const std::size_t max_steps = scorer.remaining() + 64;
  Sequence current = parent;
  for (std::size_t step = 0; step < max_steps; ++step) {
    auto child = mutate(current, mutation_rate, rng);
    if (!scorer.can_score(child)) break;
    const double s = scorer.score(child);
    children.push_back({child, s});
    if (s < root) break;
    current = std::move(child);
  }
  return children;
}

std::vector<Sequence> recombine_seeds(const std::vector<Sequence>& seeds, double rate, Rng& rng) {
  std::vector<Sequence> shuffled = seeds;
  std::shuffle(shuffled.begin(), shuffled.end(), rng);
  std::vector<Sequence> offspring;
  const std::size_t n = shuffled.size();
  for (std::size_t i = 0; i < n; i += 2) {
    const Sequence& a = shuffled[i];
    const Sequence* b = nullptr;
    if (i + 1 < n) {
      b = &shuffled[i + 1];
    } else if (n == 1) {
      b = &shuffled[0];
    } else {
      // Odd one out pairs with a random earlier seed.
      std::uniform_int_distribution<std::size_t> pick(0, n - 2);
      b = &shuffled[pick(rng)];
    }
    auto [left, right] = recombine(a, *b, rate, rng);
    offspring.push_back(std::move(left));
    offspring.push_back(std::move(right));
  }
  return offspring;
}

AdaLeadExplorer::AdaLeadExplorer(AdaLeadConfig config) : config_(config) { config_.validate(); }

Proposal AdaLeadExplorer::propose_batch(MeteredModel& model, const MeasuredData& history,
                                        const ExplorationBudget& budget, Rng& rng) {
  if (history.empty()) throw std::logic_error("AdaLead needs at least one measured round");
  const auto last = history.round_batch(history.last_round());
  const auto seeds = adalead_seeds(last, config_.kappa);
  std::vector<Sequence> seed_sequences;
  for (const auto& s : seeds) seed_sequences.push_back(s.sequence);
  const auto length = seed_sequences.front().size();
  const double mu = config_.mutation_rate.value_or(1.0 / static_cast<double>(length));

  Proposal proposal;
  proposal.diagnostics.seed_set_size = seeds.size();

  CachedScorer scorer(model);
  CandidatePool pool;
  const std::size_t target = budget.model_query_cap();
  // Passes that only revisit cached sequences add nothing; give up after a
  // run of them (tiny domains, zero mutation rate).
  constexpr std::size_t kMaxStalls = 256;
  std::size_t stalls = 0;
  while (pool.size() < target && model.remaining() > 0 && stalls < kMaxStalls) {
    const auto used_before = model.used();
    const auto pool_before = pool.size();
    const auto parents = recombine_seeds(seed_sequences, config_.recombination_rate, rng);
    for (const auto& parent : parents) {
      for (std::size_t r = 0; r < config_.rollouts_per_parent; ++r) {
        for (auto& child : rollout(parent, scorer, mu, rng)) pool.add(child.sequence, child.score);
      }
      if (model.remaining() == 0) break;
    }
    stalls = (model.used() == used_before && pool.size() == pool_before) ? stalls + 1 : 0;
  }
  proposal.diagnostics.candidates = pool.size();

  proposal.sequences = select_top_unmeasured(pool.items(), history, budget.batch_size);
  proposal.diagnostics.backfilled =
      backfill(proposal.sequences, seed_sequences, history, budget.batch_size, mu, rng);
  return proposal;
}

}  // namespace seqsandbox
