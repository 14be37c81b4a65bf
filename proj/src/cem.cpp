#include <algorithm>
#include <cmath>
#include <numeric>

#include "seqsandbox/explorer.hpp"

namespace seqsandbox {

PwmGenerator::PwmGenerator(std::shared_ptr<const Alphabet> alphabet, std::vector<std::vector<double>> probabilities)
    : alphabet_(std::move(alphabet)), probs_(std::move(probabilities)) {
  if (probs_.empty()) throw std::invalid_argument("PWM needs at least one position");
  for (auto& row : probs_) {
    if (row.size() != alphabet_->size()) throw std::invalid_argument("PWM row size differs from alphabet size");
    const double total = std::accumulate(row.begin(), row.end(), 0.0);
    if (!(total > 0.0)) throw std::invalid_argument("PWM row has no mass");
    for (double& p : row) {
      if (p < 0.0) throw std::invalid_argument("negative PWM probability");
      p /= total;
    }
  }
}

Sequence PwmGenerator::sample(Rng& rng) const {
  std::vector<std::uint8_t> symbols(probs_.size());
  for (std::size_t i = 0; i < probs_.size(); ++i) {
    std::discrete_distribution<std::size_t> pick(probs_[i].begin(), probs_[i].end());
    symbols[i] = static_cast<std::uint8_t>(pick(rng));
  }
  return Sequence(alphabet_, std::move(symbols));
}

double PwmGenerator::log_probability(const Sequence& x) const {
  if (x.size() != probs_.size()) throw std::invalid_argument("sequence length differs from PWM length");
  double lp = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) lp += std::log(probs_[i][x[i]]);
  return lp;
}

PwmGenerator fit_pwm(const std::vector<Sequence>& samples, const std::vector<double>& weights, double pseudocount) {
  if (samples.empty()) throw std::invalid_argument("cannot fit a PWM to no samples");
  if (samples.size() != weights.size()) throw std::invalid_argument("sample and weight counts differ");
  if (pseudocount < 0.0) throw std::invalid_argument("pseudocount must be non-negative");
  const auto length = samples.front().size();
  const auto alphabet = samples.front().alphabet_ptr();
  std::vector<std::vector<double>> counts(length, std::vector<double>(alphabet->size(), pseudocount));
  double total = 0.0;
  for (std::size_t s = 0; s < samples.size(); ++s) {
    if (weights[s] < 0.0) throw std::invalid_argument("negative sample weight");
    if (samples[s].size() != length) throw std::invalid_argument("mixed sample lengths");
    total += weights[s];
    for (std::size_t i = 0; i < length; ++i) counts[i][samples[s][i]] += weights[s];
  }
  if (!(total > 0.0)) throw std::invalid_argument("all sample weights are zero");
  return PwmGenerator(alphabet, std::move(counts));
}

std::vector<double> cbas_weights(const std::vector<Sequence>& samples, const PwmGenerator& g0, const PwmGenerator& gt,
                                 double w_max) {
  std::vector<double> out;
  out.reserve(samples.size());
  const double log_cap = std::log(w_max);
  for (const auto& x : samples) {
    const double lw = g0.log_probability(x) - gt.log_probability(x);
    out.push_back(lw >= log_cap ? w_max : std::exp(lw));
  }
  return out;
}

std::vector<ScoredSequence> select_elite(std::vector<ScoredSequence> scored, double fraction, double& threshold) {
  if (scored.empty()) return {};
  sort_by_score(scored);
  const auto keep = std::clamp<std::size_t>(
      static_cast<std::size_t>(std::llround(fraction * static_cast<double>(scored.size()))), 1, scored.size());
  threshold = std::max(threshold, scored[keep - 1].score);
  std::vector<ScoredSequence> elite;
  for (std::size_t i = 0; i < keep; ++i) {
    if (scored[i].score >= threshold) elite.push_back(scored[i]);
  }
  return elite;
}

Proposal CemExplorer::propose_batch(MeteredModel& model, const MeasuredData& history,
                                    const ExplorationBudget& budget, Rng& rng) {
  if (history.empty()) throw std::logic_error("cross-entropy sampling needs at least one measured round");
  const std::size_t B = budget.batch_size;
  thresholds_.clear();

  // Prior: PWM over the top fifth of everything measured so far.
  std::vector<ScoredSequence> measured;
  for (const auto& m : history.entries()) measured.push_back({m.sequence, m.fitness});
  sort_by_score(measured);
  auto top_of_history = [&](std::size_t n) {
    std::vector<Sequence> out;
    for (std::size_t i = 0; i < std::min(n, measured.size()); ++i) out.push_back(measured[i].sequence);
    return out;
  };
  const auto prior_samples =
      top_of_history(std::max<std::size_t>(1, static_cast<std::size_t>(0.2 * static_cast<double>(measured.size()))));
  const PwmGenerator g0 = fit_pwm(prior_samples, std::vector<double>(prior_samples.size(), 1.0), config_.pseudocount);
  PwmGenerator gt = g0;

  CachedScorer scorer(model);
  CandidatePool pool;
  double threshold = -std::numeric_limits<double>::infinity();
  double best = -std::numeric_limits<double>::infinity();
  std::size_t idle = 0;

  while (model.remaining() > 0 && idle < config_.patience) {
    std::vector<ScoredSequence> drawn;
    for (std::size_t i = 0; i < B; ++i) {
      auto x = gt.sample(rng);
      if (!scorer.can_score(x)) break;
      const double s = scorer.score(x);
      pool.add(x, s);
      drawn.push_back({std::move(x), s});
    }
    if (drawn.empty()) break;

    const double prev_best = best;
    for (const auto& d : drawn) best = std::max(best, d.score);
    idle = best > prev_best ? 0 : idle + 1;

    const auto elite = select_elite(drawn, config_.elite_fraction, threshold);
    thresholds_.push_back(threshold);

    std::vector<Sequence> elite_seqs;
    for (const auto& e : elite) elite_seqs.push_back(e.sequence);
    std::sort(elite_seqs.begin(), elite_seqs.end());
    const auto distinct = std::unique(elite_seqs.begin(), elite_seqs.end()) - elite_seqs.begin();
    if (distinct < 2) {
      // Collapsed elite: restart the generator from the measured leaders.
      const auto reseed = top_of_history(B);
      gt = fit_pwm(reseed, std::vector<double>(reseed.size(), 1.0), config_.pseudocount);
      continue;
    }
    elite_seqs.clear();
    for (const auto& e : elite) elite_seqs.push_back(e.sequence);
    std::vector<double> weights(elite_seqs.size(), 1.0);
    if (config_.conditioned) weights = cbas_weights(elite_seqs, g0, gt, config_.weight_cap);
    if (std::accumulate(weights.begin(), weights.end(), 0.0) > 0.0) {
      gt = fit_pwm(elite_seqs, weights, config_.pseudocount);
    }
  }

  Proposal proposal;
  proposal.diagnostics.candidates = pool.size();
  proposal.sequences = select_top_unmeasured(pool.items(), history, B);
  const auto last = history.round_batch(history.last_round());
  std::vector<Sequence> parents;
  for (const auto& m : last) parents.push_back(m.sequence);
  const double mu = 1.0 / static_cast<double>(parents.front().size());
  proposal.diagnostics.backfilled = backfill(proposal.sequences, parents, history, B, mu, rng);
  return proposal;
}

}  // namespace seqsandbox
