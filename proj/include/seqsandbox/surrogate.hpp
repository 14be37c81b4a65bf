#pragma once

#include <memory>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "seqsandbox/landscape.hpp"
#include "seqsandbox/measured.hpp"

namespace seqsandbox {

class ModelError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Cheap approximation of the oracle. fit() is exclusive; predict() and the
// other queries are const and safe to share between fits.
class SurrogateModel {
 public:
  virtual ~SurrogateModel() = default;

  virtual void fit(const MeasuredData& data) = 0;
  virtual double predict(const Sequence& x) const = 0;
  virtual double uncertainty(const Sequence&) const { return 0.0; }
  // Per-member estimates for ensembles; single models return one entry.
  virtual std::vector<double> member_predictions(const Sequence& x) const { return {predict(x)}; }
  virtual std::vector<double> member_weights() const { return {1.0}; }
  // Hook called with the batch measured in the previous round, before refit.
  virtual void observe_batch(const std::vector<Measurement>&) {}
  virtual std::string name() const = 0;
};

using ModelPtr = std::unique_ptr<SurrogateModel>;

// alpha^d * phi + (1 - alpha^d) * eps.
double noisy_blend(double alpha, std::size_t distance, double phi, double eps);

enum class NoiseSource {
  kExponentialMean,  // eps ~ Exp with mean phi(nearest measured)
  kExponentialRate,  // eps ~ Exp with rate phi(nearest measured)
  kEmpiricalMutants  // eps = fitness of a random measured sequence
};

// Noise-corrupted ground truth. The noise draw for a query is a pure function
// of (seed, fit epoch, sequence), so repeated and concurrent queries agree.
class NoisyAbstractModel : public SurrogateModel {
 public:
  NoisyAbstractModel(LandscapePtr landscape, double alpha, std::uint64_t seed,
                     NoiseSource source = NoiseSource::kExponentialMean);

  void fit(const MeasuredData& data) override;
  double predict(const Sequence& x) const override;
  std::string name() const override;

  double alpha() const { return alpha_; }
  std::uint64_t epoch() const { return epoch_; }
  // The frozen noise value used for x in the current epoch.
  double noise(const Sequence& x, std::size_t nearest_index) const;

 private:
  LandscapePtr landscape_;
  double alpha_;
  std::uint64_t seed_;
  NoiseSource source_;
  MeasuredData measured_;
  std::uint64_t epoch_ = 0;
};

// Exponential noise with mean equal to the average measured fitness.
class NullModel : public SurrogateModel {
 public:
  explicit NullModel(std::uint64_t seed) : seed_(seed) {}

  void fit(const MeasuredData& data) override;
  double predict(const Sequence& x) const override;
  std::string name() const override { return "null"; }

 private:
  std::uint64_t seed_;
  double mean_ = 0.0;
  bool fitted_ = false;
  std::uint64_t epoch_ = 0;
};

// Exponential draw with the given mean, from a uniform in [0, 1), capped at 1.
double capped_exponential(double mean, double uniform);
// Uniform in [0, 1) keyed by (seed, epoch, sequence).
double noise_uniform(std::uint64_t seed, std::uint64_t epoch, const Sequence& x);

// Ridge regression on one-hot position x symbol features with an unpenalized
// intercept.
class RidgeModel : public SurrogateModel {
 public:
  explicit RidgeModel(double l2 = 1e-3);

  void fit(const MeasuredData& data) override;
  double predict(const Sequence& x) const override;
  std::string name() const override { return "ridge"; }

 private:
  double l2_;
  double intercept_ = 0.0;
  Eigen::VectorXd weights_;
  std::size_t alphabet_size_ = 0;
  bool fitted_ = false;
};

// Distance-kernel regressor over the k nearest measured sequences, weights
// exp(-d / bandwidth). A measured query returns its measured fitness.
class KnnModel : public SurrogateModel {
 public:
  KnnModel(std::size_t k, double bandwidth);

  void fit(const MeasuredData& data) override;
  double predict(const Sequence& x) const override;
  std::string name() const override { return "knn"; }

 private:
  std::size_t k_;
  double bandwidth_;
  MeasuredData data_;
};

double r2_score(std::span<const double> predictions, std::span<const double> truths);

// weight_i proportional to max(r2_i, 0), uniform when every entry clamps to 0.
std::vector<double> weights_from_r2(std::span<const double> r2);

enum class EnsembleWeighting { kUniform, kAdaptive };

struct EnsemblePrediction {
  double estimate = 0.0;
  double uncertainty = 0.0;
};

EnsemblePrediction weighted_mean_sd(std::span<const double> values, std::span<const double> weights);

class AdaptiveEnsemble : public SurrogateModel {
 public:
  // With `bootstrap`, member i is fit on a seeded resample of the data.
  AdaptiveEnsemble(std::vector<ModelPtr> members, EnsembleWeighting weighting, bool bootstrap = false,
                   std::uint64_t seed = 0);

  void fit(const MeasuredData& data) override;
  double predict(const Sequence& x) const override { return ensemble_predict(x).estimate; }
  double uncertainty(const Sequence& x) const override { return ensemble_predict(x).uncertainty; }
  std::vector<double> member_predictions(const Sequence& x) const override;
  std::vector<double> member_weights() const override { return weights_; }
  void observe_batch(const std::vector<Measurement>& previous_batch) override;
  std::string name() const override { return "ensemble"; }

  EnsemblePrediction ensemble_predict(const Sequence& x) const;
  // Recomputes weights from each member's R^2 on `previous_batch`; falls back
  // to uniform for batches with fewer than two samples or constant truth.
  void reweight(const std::vector<Measurement>& previous_batch);
  void set_weights(std::vector<double> weights);
  std::size_t size() const { return members_.size(); }

 private:
  std::vector<ModelPtr> members_;
  std::vector<double> weights_;
  EnsembleWeighting weighting_;
  bool bootstrap_;
  std::uint64_t seed_;
  std::uint64_t epoch_ = 0;
};

}  // namespace seqsandbox
