#include <algorithm>
#include <numeric>

#include "seqsandbox/explorer.hpp"

namespace seqsandbox {

std::vector<std::size_t> fitness_proportional_sample(const std::vector<double>& fitness, std::size_t count, Rng& rng) {
  std::vector<std::size_t> out(count);
  if (fitness.empty()) return {};
  const double total = std::accumulate(fitness.begin(), fitness.end(), 0.0);
  if (!(total > 0.0)) {
    std::uniform_int_distribution<std::size_t> pick(0, fitness.size() - 1);
    for (auto& i : out) i = pick(rng);
    return out;
  }
  std::discrete_distribution<std::size_t> pick(fitness.begin(), fitness.end());
  for (auto& i : out) i = pick(rng);
  return out;
}

WrightFisherExplorer::WrightFisherExplorer(bool model_guided, std::optional<double> mutation_rate)
    : model_guided_(model_guided), mutation_rate_(mutation_rate) {
  if (mutation_rate && !(*mutation_rate >= 0.0 && *mutation_rate <= 1.0)) {
    throw std::invalid_argument("mutation rate must lie in [0, 1]");
  }
}

Proposal WrightFisherExplorer::propose_batch(MeteredModel& model, const MeasuredData& history,
                                             const ExplorationBudget& budget, Rng& rng) {
  if (history.empty()) throw std::logic_error("Wright-Fisher needs at least one measured round");
  const auto last = history.round_batch(history.last_round());
  std::vector<Sequence> population;
  std::vector<double> fitness;
  for (const auto& m : last) {
    population.push_back(m.sequence);
    fitness.push_back(m.fitness);
  }
  const double mu = mutation_rate_.value_or(1.0 / static_cast<double>(population.front().size()));
  const std::size_t B = budget.batch_size;

  auto next_generation = [&](const std::vector<Sequence>& pop, const std::vector<double>& weights) {
    std::vector<Sequence> children;
    children.reserve(B);
    for (auto i : fitness_proportional_sample(weights, B, rng)) children.push_back(mutate(pop[i], mu, rng));
    return children;
  };

  Proposal proposal;
  std::vector<Sequence> final_generation;
  std::vector<ScoredSequence> scored_final;
  CandidatePool pool;

  if (!model_guided_) {
    final_generation = next_generation(population, fitness);
    for (const auto& c : final_generation) scored_final.push_back({c, 0.0});
  } else {
    // In-silico generations: the surrogate stands in for the assay until the
    // meter runs dry; the last scored generation is proposed.
    CachedScorer scorer(model);
    while (model.remaining() > 0) {
      auto children = next_generation(population, fitness);
      std::vector<Sequence> kept;
      std::vector<double> scores;
      for (auto& c : children) {
        if (!scorer.can_score(c)) break;
        const double s = scorer.score(c);
        pool.add(c, s);
        kept.push_back(std::move(c));
        scores.push_back(std::max(s, 0.0));
      }
      if (kept.empty()) break;
      scored_final.clear();
      for (std::size_t i = 0; i < kept.size(); ++i) scored_final.push_back({kept[i], scores[i]});
      population = std::move(kept);
      fitness = std::move(scores);
    }
  }
  proposal.diagnostics.candidates = model_guided_ ? pool.size() : scored_final.size();

  // Final generation first (by score), then the best of the remaining pool.
  proposal.sequences = select_top_unmeasured(scored_final, history, B);
  if (proposal.sequences.size() < B && pool.size() > 0) {
    std::vector<ScoredSequence> rest;
    for (const auto& item : pool.items()) {
      if (std::find(proposal.sequences.begin(), proposal.sequences.end(), item.sequence) == proposal.sequences.end()) {
        rest.push_back(item);
      }
    }
    for (auto& s : select_top_unmeasured(std::move(rest), history, B - proposal.sequences.size())) {
      proposal.sequences.push_back(std::move(s));
    }
  }
  std::vector<Sequence> parents;
  for (const auto& m : last) parents.push_back(m.sequence);
  proposal.diagnostics.backfilled = backfill(proposal.sequences, parents, history, B, mu, rng);
  return proposal;
}

}  // namespace seqsandbox
