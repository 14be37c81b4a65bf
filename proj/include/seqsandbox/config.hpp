#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "json.hpp"
#include "seqsandbox/budget.hpp"
#include "seqsandbox/explorer.hpp"
#include "seqsandbox/landscape.hpp"

namespace seqsandbox {

inline constexpr int kSchemaVersion = 1;

// Invalid run configuration. The message names the offending field.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Unreadable input or unwritable output.
class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct LandscapeSpec {
  std::string type = "rna";  // rna | tf | tf_synth | constant | additive
  std::size_t length = 0;    // 0: type default (rna 14, tf inferred, others 8)
  std::string alphabet;      // empty: the type's natural alphabet
  std::uint64_t seed = 0;
  std::size_t targets = 1;   // rna
  std::size_t target_length = 0;  // rna; 0 means max(length, 50) capped at 100
  std::string path;          // tf
  double value = 0.5;        // constant
  bool swampland = false;
  std::string wildtype;      // swampland; empty means a seeded random sequence
};

struct ModelSpec {
  std::string type = "abstract";  // abstract | null | ridge | knn | ensemble
  double alpha = 1.0;
  std::string noise = "exp_mean";  // exp_mean | exp_rate | empirical
  double l2 = 1e-3;
  std::size_t k = 5;
  double bandwidth = 1.0;
  std::vector<ModelSpec> members;
  std::string weighting = "adaptive";  // adaptive | uniform
  bool bootstrap = false;
};

struct ExplorerSpec {
  std::string type = "adalead";  // adalead | wf | wf_model_free | cmaes | bo_evo | dbas | cbas
  AdaLeadConfig adalead;
  std::optional<double> mutation_rate;
  CmaesConfig cmaes;
  BoEvoConfig bo;
  CemConfig cem;
};

// A y_tau threshold. Strict `fitness > value` unless inclusive, which counts
// fitness >= value - 1e-9 (global-optimum rows).
struct Threshold {
  double value = 0.0;
  bool inclusive = false;

  bool passes(double fitness) const { return inclusive ? fitness >= value - 1e-9 : fitness > value; }
  std::string label() const;
};

Threshold parse_threshold(const nlohmann::json& j);

struct RunConfig {
  int schema_version = kSchemaVersion;
  std::string name = "run";
  LandscapeSpec landscape;
  ModelSpec model;
  ExplorerSpec explorer;
  ExplorationBudget budget;
  std::vector<std::string> start_sequences;
  std::size_t random_starts = 0;   // extra random starting sequences
  std::uint64_t start_seed = 0;
  std::vector<std::uint64_t> seeds = {0};
  std::vector<Threshold> thresholds;
  std::string optima = "auto";     // auto | always | never
  std::vector<double> alphas;      // sweep grid

  nlohmann::json to_json() const;
};

RunConfig parse_config(const nlohmann::json& j);
RunConfig load_config(const std::filesystem::path& path);

LandscapeSpec parse_landscape_spec(const nlohmann::json& j);
nlohmann::json to_json(const LandscapeSpec& spec);

LandscapePtr build_landscape(const LandscapeSpec& spec);
ModelPtr build_model(const ModelSpec& spec, const LandscapePtr& landscape, std::uint64_t seed);
ExplorerPtr build_explorer(const ExplorerSpec& spec);

// Starting sequences after validation against the landscape.
std::vector<Sequence> starting_sequences(const RunConfig& config, const Landscape& landscape);

}  // namespace seqsandbox
