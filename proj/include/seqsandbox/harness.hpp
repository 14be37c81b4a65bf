#pragma once

#include <functional>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "seqsandbox/config.hpp"
#include "seqsandbox/optima.hpp"

namespace seqsandbox {

// An explorer broke its proposal contract (wrong count, duplicates, or
// previously measured sequences).
class ContractViolation : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct LabeledSequence {
  std::string sequence;
  double fitness = 0.0;
};

struct RoundRecord {
  std::size_t round = 0;
  std::vector<LabeledSequence> batch;
  std::size_t model_queries = 0;
  std::size_t oracle_queries = 0;
  ProposalDiagnostics diagnostics;
  double wall_seconds = 0.0;  // not serialized
};

struct MetricSeries {
  std::string name;
  std::vector<double> values;  // one per round, round 0 first
};

struct RunLog {
  nlohmann::json config;
  std::string landscape_name;
  std::uint64_t seed = 0;
  std::vector<RoundRecord> rounds;
  std::vector<MetricSeries> metrics;
  // Enumerated optima passing each threshold, keyed by threshold label.
  std::optional<std::map<std::string, std::size_t>> optima_available;

  const MetricSeries* metric(const std::string& name) const;
  double final_value(const std::string& name) const;
  std::size_t oracle_queries_total() const;
  std::size_t model_queries_total() const;
};

// Measured data reconstructed from a log.
MeasuredData measured_from_log(const RunLog& log, const std::shared_ptr<const Alphabet>& alphabet);

std::vector<double> metric_cummax(const RunLog& log);
// Distinct measured sequences passing `threshold`, cumulative per round.
std::vector<double> metric_count_above(const RunLog& log, const Threshold& threshold);
// Distinct measured members of `optima` passing `threshold`, cumulative per round.
std::vector<double> metric_optima_found(const RunLog& log, const LocalOptimaSet& optima, const Threshold& threshold);

// Round 0: the starting sequences plus seeded single and double mutants of
// them, up to the batch size. Depends only on the config, never the explorer.
std::vector<Sequence> initial_batch(const RunConfig& config, const Landscape& landscape, std::uint64_t seed);

// Shared, lazily computed per-landscape data for a group of runs.
struct LandscapeContext {
  LandscapePtr landscape;
  std::optional<LocalOptimaSet> optima;  // all strict optima when enumerated
};

LandscapeContext prepare_landscape(const RunConfig& config);

RunLog run_experiment(const RunConfig& config, std::uint64_t seed, const LandscapeContext& context);
RunLog run_experiment(const RunConfig& config, std::uint64_t seed);

nlohmann::json runlog_to_json(const RunLog& log);
RunLog runlog_from_json(const nlohmann::json& j);
void write_metrics_csv(std::ostream& out, const RunLog& log);

struct SweepRow {
  double alpha = 0.0;
  std::uint64_t seed = 0;
  double final_cummax = 0.0;
  std::optional<double> optima_found;
  std::vector<double> count_above;  // one per threshold
};

// One run per (alpha, seed) cell with everything else fixed. Cells run on up
// to `jobs` threads; rows come back in (alpha, seed) grid order.
std::vector<SweepRow> sweep_alpha(const RunConfig& config, const std::vector<double>& alphas, std::size_t jobs = 1);
void write_sweep_csv(std::ostream& out, const RunConfig& config, const std::vector<SweepRow>& rows);

// Runs fn(i) for i in [0, n) on up to `jobs` threads. The first exception is
// rethrown after all workers stop.
void parallel_for(std::size_t n, std::size_t jobs, const std::function<void(std::size_t)>& fn);

}  // namespace seqsandbox
