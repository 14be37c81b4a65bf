#pragma once

#include <memory>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include <Eigen/Dense>

#include "seqsandbox/budget.hpp"
#include "seqsandbox/measured.hpp"

namespace seqsandbox {

struct ProposalDiagnostics {
  std::size_t seed_set_size = 0;
  std::size_t candidates = 0;
  std::size_t backfilled = 0;
};

struct Proposal {
  std::vector<Sequence> sequences;
  ProposalDiagnostics diagnostics;
};

// Batch-proposal policy. Implementations see measured fitness values and the
// metered surrogate, never landscape internals.
class Explorer {
 public:
  virtual ~Explorer() = default;

  // Returns budget.batch_size distinct sequences absent from `history`.
  virtual Proposal propose_batch(MeteredModel& model, const MeasuredData& history,
                                 const ExplorationBudget& budget, Rng& rng) = 0;
  virtual std::string name() const = 0;
  virtual bool uses_model() const { return true; }
};

using ExplorerPtr = std::unique_ptr<Explorer>;

// ---------------------------------------------------------------------------
// Shared machinery

struct ScoredSequence {
  Sequence sequence;
  double score = 0.0;
};

// Per-round memo in front of the meter: each distinct sequence is charged once.
class CachedScorer {
 public:
  explicit CachedScorer(MeteredModel& model) : model_(model) {}

  bool cached(const Sequence& x) const { return scores_.count(x) != 0; }
  // True when scoring x would not exceed the cap.
  bool can_score(const Sequence& x) const { return cached(x) || model_.remaining() > 0; }
  double score(const Sequence& x);
  std::size_t remaining() const { return model_.remaining(); }

 private:
  MeteredModel& model_;
  std::unordered_map<Sequence, double, SequenceHash> scores_;
};

// Insertion-ordered set of scored candidates.
class CandidatePool {
 public:
  bool add(const Sequence& x, double score);
  std::size_t size() const { return items_.size(); }
  const std::vector<ScoredSequence>& items() const { return items_; }

 private:
  std::vector<ScoredSequence> items_;
  std::unordered_map<Sequence, std::size_t, SequenceHash> index_;
};

// Stable ordering by score descending, then canonical sequence order.
void sort_by_score(std::vector<ScoredSequence>& items);

// Top `count` distinct candidates that are not in `history`.
std::vector<Sequence> select_top_unmeasured(std::vector<ScoredSequence> candidates, const MeasuredData& history,
                                            std::size_t count);

// Extends `batch` to `count` distinct unmeasured sequences with random
// mutants of `parents` (at least one substitution each). Returns the number
// added. Throws BudgetViolation if the domain cannot supply enough sequences.
std::size_t backfill(std::vector<Sequence>& batch, const std::vector<Sequence>& parents,
                     const MeasuredData& history, std::size_t count, double mutation_rate, Rng& rng);

// ---------------------------------------------------------------------------
// AdaLead

struct AdaLeadConfig {
  double kappa = 0.05;
  double recombination_rate = 0.2;
  std::optional<double> mutation_rate;  // defaults to 1/L
  std::size_t rollouts_per_parent = 1;

  void validate() const;
};

// Measured members of the batch within (1 - kappa) of its maximum.
std::vector<Measurement> adalead_seeds(const std::vector<Measurement>& batch, double kappa);

// Mutation chain from `parent`, stopping at the first child the model scores
// below the parent or when the meter runs dry. Returns every child generated.
std::vector<ScoredSequence> rollout(const Sequence& parent, CachedScorer& scorer, double mutation_rate, Rng& rng);

// ceil(|seeds|/2) random disjoint pairs, both offspring of each kept.
std::vector<Sequence> recombine_seeds(const std::vector<Sequence>& seeds, double rate, Rng& rng);

class AdaLeadExplorer : public Explorer {
 public:
  explicit AdaLeadExplorer(AdaLeadConfig config);
  Proposal propose_batch(MeteredModel& model, const MeasuredData& history, const ExplorationBudget& budget,
                         Rng& rng) override;
  std::string name() const override { return "adalead"; }
  const AdaLeadConfig& config() const { return config_; }

 private:
  AdaLeadConfig config_;
};

// ---------------------------------------------------------------------------
// Wright-Fisher

// Indices drawn proportionally to `fitness`; uniform when all are zero.
std::vector<std::size_t> fitness_proportional_sample(const std::vector<double>& fitness, std::size_t count, Rng& rng);

class WrightFisherExplorer : public Explorer {
 public:
  WrightFisherExplorer(bool model_guided, std::optional<double> mutation_rate);
  Proposal propose_batch(MeteredModel& model, const MeasuredData& history, const ExplorationBudget& budget,
                         Rng& rng) override;
  std::string name() const override { return model_guided_ ? "wf" : "wf_model_free"; }
  bool uses_model() const override { return model_guided_; }

 private:
  bool model_guided_;
  std::optional<double> mutation_rate_;
};

// ---------------------------------------------------------------------------
// CMA-ES over one-hot relaxations

struct CmaesConfig {
  double initial_sigma = 0.2;
  double eigenvalue_floor = 1e-10;
};

struct CmaesState {
  Eigen::VectorXd mean;
  Eigen::MatrixXd covariance;
  Eigen::VectorXd path_sigma;
  Eigen::VectorXd path_c;
  double sigma = 0.0;
  std::size_t generation = 0;
  std::size_t length = 0;
  std::size_t alphabet_size = 0;
};

// Per-position argmax over the alphabet-sized blocks of a continuous vector.
Sequence decode_argmax(const Eigen::VectorXd& v, std::size_t length, const std::shared_ptr<const Alphabet>& alphabet);

class CmaesExplorer : public Explorer {
 public:
  explicit CmaesExplorer(CmaesConfig config = {}) : config_(config) {}
  Proposal propose_batch(MeteredModel& model, const MeasuredData& history, const ExplorationBudget& budget,
                         Rng& rng) override;
  std::string name() const override { return "cmaes"; }
  const std::optional<CmaesState>& state() const { return state_; }

 private:
  void initialize(std::size_t length, std::size_t alphabet_size, Rng& rng);
  void update(const std::vector<Eigen::VectorXd>& ranked_samples, std::size_t parents);

  CmaesConfig config_;
  std::optional<CmaesState> state_;
};

// ---------------------------------------------------------------------------
// Evolutionary Bayesian optimization

// Expected improvement of a Gaussian posterior over `best`.
double acquisition_ei(double mean, double sd, double best);

enum class Acquisition { kEi, kUcb };

struct BoEvoConfig {
  Acquisition acquisition = Acquisition::kEi;
  double ucb_beta = 1.0;
  double variance_floor = 1e-6;
  std::optional<double> mutation_rate;
};

class BoEvoExplorer : public Explorer {
 public:
  explicit BoEvoExplorer(BoEvoConfig config = {}) : config_(config) {}
  Proposal propose_batch(MeteredModel& model, const MeasuredData& history, const ExplorationBudget& budget,
                         Rng& rng) override;
  std::string name() const override { return "bo_evo"; }

 private:
  BoEvoConfig config_;
};

// ---------------------------------------------------------------------------
// Cross-entropy sampling with a position weight matrix generator

class PwmGenerator {
 public:
  PwmGenerator(std::shared_ptr<const Alphabet> alphabet, std::vector<std::vector<double>> probabilities);

  Sequence sample(Rng& rng) const;
  double log_probability(const Sequence& x) const;
  double probability(std::size_t position, std::size_t symbol) const { return probs_[position][symbol]; }
  std::size_t length() const { return probs_.size(); }

 private:
  std::shared_ptr<const Alphabet> alphabet_;
  std::vector<std::vector<double>> probs_;
};

PwmGenerator fit_pwm(const std::vector<Sequence>& samples, const std::vector<double>& weights, double pseudocount);

// P(x | g0) / P(x | gt), clipped to [0, w_max].
std::vector<double> cbas_weights(const std::vector<Sequence>& samples, const PwmGenerator& g0, const PwmGenerator& gt,
                                 double w_max = 10.0);

struct CemConfig {
  bool conditioned = false;  // CbAS reweighting
  double elite_fraction = 0.2;
  double pseudocount = 0.5;
  std::size_t patience = 10;
  double weight_cap = 10.0;
};

// Elite selection for one inner iteration: the top fraction of `scored` by
// score, restricted to those at or above the running threshold, which is
// raised to the top fraction's cutoff.
std::vector<ScoredSequence> select_elite(std::vector<ScoredSequence> scored, double fraction, double& threshold);

class CemExplorer : public Explorer {
 public:
  explicit CemExplorer(CemConfig config = {}) : config_(config) {}
  Proposal propose_batch(MeteredModel& model, const MeasuredData& history, const ExplorationBudget& budget,
                         Rng& rng) override;
  std::string name() const override { return config_.conditioned ? "cbas" : "dbas"; }
  // Running thresholds of the last proposal's inner iterations.
  const std::vector<double>& threshold_trace() const { return thresholds_; }

 private:
  CemConfig config_;
  std::vector<double> thresholds_;
};

}  // namespace seqsandbox
