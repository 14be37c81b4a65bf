#include <algorithm>
#include <cmath>
#include <numbers>
#include <unordered_map>

#include "seqsandbox/explorer.hpp"

namespace seqsandbox {

double acquisition_ei(double mean, double sd, double best) {
  const double gap = mean - best;
  if (!(sd > 0.0)) return std::max(gap, 0.0);
  const double z = gap / sd;
  const double pdf = std::exp(-0.5 * z * z) / std::sqrt(2.0 * std::numbers::pi);
  const double cdf = 0.5 * std::erfc(-z / std::numbers::sqrt2);
  return gap * cdf + sd * pdf;
}

namespace {

struct Posterior {
  std::vector<double> members;
  double mean = 0.0;
  double variance = 0.0;
};

class PosteriorCache {
 public:
  explicit PosteriorCache(MeteredModel& model) : model_(model), weights_(model.member_weights()) {}

  bool can_query(const Sequence& x) const { return cache_.count(x) != 0 || model_.remaining() > 0; }

  const Posterior& get(const Sequence& x) {
    if (auto it = cache_.find(x); it != cache_.end()) return it->second;
    Posterior p;
    p.members = model_.member_predictions(x);
    if (weights_.size() == p.members.size()) {
      const auto e = weighted_mean_sd(p.members, weights_);
      p.mean = e.estimate;
      p.variance = e.uncertainty * e.uncertainty;
    } else {
      p.mean = p.members.empty() ? 0.0 : p.members.front();
    }
    return cache_.emplace(x, std::move(p)).first->second;
  }

  const std::vector<double>& weights() const { return weights_; }

 private:
  MeteredModel& model_;
  std::vector<double> weights_;
  std::unordered_map<Sequence, Posterior, SequenceHash> cache_;
};

}  // namespace

Proposal BoEvoExplorer::propose_batch(MeteredModel& model, const MeasuredData& history,
                                      const ExplorationBudget& budget, Rng& rng) {
  if (history.empty()) throw std::logic_error("evolutionary BO needs at least one measured round");
  const auto last = history.round_batch(history.last_round());
  const auto length = last.front().sequence.size();
  const double mu = config_.mutation_rate.value_or(1.0 / static_cast<double>(length));
  const double best = history.max_fitness();

  PosteriorCache posterior(model);
  auto acquire = [&](const Posterior& p) {
    const double sd = std::sqrt(std::max(p.variance, 0.0));
    return config_.acquisition == Acquisition::kEi ? acquisition_ei(p.mean, sd, best) : p.mean + config_.ucb_beta * sd;
  };

  Proposal proposal;
  CandidatePool pool;  // scored by acquisition

  // Start from the previous batch member the model ranks highest.
  std::optional<Sequence> state;
  double state_acq = -std::numeric_limits<double>::infinity();
  for (const auto& m : last) {
    if (!posterior.can_query(m.sequence)) break;
    const double a = acquire(posterior.get(m.sequence));
    if (!state || a > state_acq) {
      state = m.sequence;
      state_acq = a;
    }
  }
  if (!state) state = last.front().sequence;

  std::size_t stalls = 0;
  while (model.remaining() > 0 && stalls < 64) {
    const auto before = pool.size();
    const double var0 = posterior.can_query(*state) ? posterior.get(*state).variance : 0.0;
    const double var_cap = var0 > 0.0 ? 2.0 * var0 : config_.variance_floor;
    // One chain: keep extending while the acquisition improves and the
    // posterior stays within the variance allowance around the state.
    Sequence current = *state;
    double current_acq = state_acq;
    for (std::size_t step = 0; step < length * 4 + 8; ++step) {
      auto child = mutate_at_least_once(current, mu, rng);
      if (!posterior.can_query(child)) break;
      const auto& p = posterior.get(child);
      const double a = acquire(p);
      pool.add(child, a);
      if (!(a > current_acq) || p.variance > var_cap) break;
      current = std::move(child);
      current_acq = a;
    }
    if (current_acq > state_acq) {
      state = current;
      state_acq = current_acq;
    }
    stalls = pool.size() == before ? stalls + 1 : 0;
  }
  proposal.diagnostics.candidates = pool.size();

  // Thompson-style final ranking: each candidate is scored by one ensemble
  // member drawn by weight. Member predictions are already cached.
  const auto& w = posterior.weights();
  std::vector<ScoredSequence> ranked;
  ranked.reserve(pool.size());
  for (const auto& item : pool.items()) {
    const auto& p = posterior.get(item.sequence);
    double score = p.mean;
    if (p.members.size() > 1 && w.size() == p.members.size()) {
      std::discrete_distribution<std::size_t> pick(w.begin(), w.end());
      score = p.members[pick(rng)];
    }
    ranked.push_back({item.sequence, score});
  }
  proposal.sequences = select_top_unmeasured(std::move(ranked), history, budget.batch_size);

  std::vector<Sequence> parents;
  for (const auto& m : last) parents.push_back(m.sequence);
  proposal.diagnostics.backfilled = backfill(proposal.sequences, parents, history, budget.batch_size, mu, rng);
  return proposal;
}

}  // namespace seqsandbox
