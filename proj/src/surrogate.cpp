#include "seqsandbox/surrogate.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include "seqsandbox/random.hpp"

namespace seqsandbox {

double noisy_blend(double alpha, std::size_t distance, double phi, double eps) {
  const double keep = std::pow(alpha, static_cast<double>(distance));
  return keep * phi + (1.0 - keep) * eps;
}

double capped_exponential(double mean, double uniform) {
  if (!(mean > 0.0)) return 0.0;
  return std::min(1.0, -mean * std::log1p(-uniform));
}

double noise_uniform(std::uint64_t seed, std::uint64_t epoch, const Sequence& x) {
  return unit_from_hash(hash_symbols(x.indices(), hash_combine(seed, epoch)));
}

// ---------------------------------------------------------------------------

NoisyAbstractModel::NoisyAbstractModel(LandscapePtr landscape, double alpha, std::uint64_t seed, NoiseSource source)
    : landscape_(std::move(landscape)), alpha_(alpha), seed_(seed), source_(source) {
  if (!landscape_) throw ModelError("abstract model needs a landscape");
  if (!(alpha >= 0.0 && alpha <= 1.0)) throw ModelError("alpha must lie in [0, 1]");
}

void NoisyAbstractModel::fit(const MeasuredData& data) {
  measured_ = data;
  ++epoch_;
}

double NoisyAbstractModel::noise(const Sequence& x, std::size_t nearest_index) const {
  const double u = noise_uniform(seed_, epoch_, x);
  const double neighbor = measured_[nearest_index].fitness;
  switch (source_) {
    case NoiseSource::kExponentialMean:
      return capped_exponential(neighbor, u);
    case NoiseSource::kExponentialRate:
      return neighbor > 0.0 ? capped_exponential(1.0 / neighbor, u) : 1.0;
    case NoiseSource::kEmpiricalMutants: {
      const auto i = std::min(measured_.size() - 1, static_cast<std::size_t>(u * static_cast<double>(measured_.size())));
      return measured_[i].fitness;
    }
  }
  return 0.0;
}

double NoisyAbstractModel::predict(const Sequence& x) const {
  if (measured_.empty()) throw ModelError("abstract model queried before any measurement");
  const double phi = landscape_->evaluate(x);
  if (alpha_ == 1.0) return phi;
  const auto nearest = measured_.nearest(x);
  if (nearest.distance == 0) return phi;
  return noisy_blend(alpha_, nearest.distance, phi, noise(x, nearest.index));
}

std::string NoisyAbstractModel::name() const {
  std::ostringstream out;
  out << "abstract(alpha=" << alpha_ << ")";
  return out.str();
}

void NullModel::fit(const MeasuredData& data) {
  if (data.empty()) throw ModelError("null model needs measured data");
  mean_ = data.mean_fitness();
  fitted_ = true;
  ++epoch_;
}

double NullModel::predict(const Sequence& x) const {
  if (!fitted_) throw ModelError("null model queried before any measurement");
  return capped_exponential(mean_, noise_uniform(seed_, epoch_, x));
}

// ---------------------------------------------------------------------------

RidgeModel::RidgeModel(double l2) : l2_(l2) {
  if (!(l2 > 0.0)) throw ModelError("ridge regularizer must be positive");
}

void RidgeModel::fit(const MeasuredData& data) {
  if (data.empty()) throw ModelError("ridge fit needs at least one sample");
  const auto n = static_cast<Eigen::Index>(data.size());
  const auto& first = data[0].sequence;
  alphabet_size_ = first.alphabet().size();
  const auto p = static_cast<Eigen::Index>(first.size() * alphabet_size_);
  Eigen::MatrixXd features = Eigen::MatrixXd::Zero(n, p);
  Eigen::VectorXd target(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const auto& e = data[static_cast<std::size_t>(i)];
    for (std::size_t pos = 0; pos < e.sequence.size(); ++pos) {
      features(i, static_cast<Eigen::Index>(pos * alphabet_size_ + e.sequence[pos])) = 1.0;
    }
    target(i) = e.fitness;
  }
  const Eigen::RowVectorXd feature_mean = features.colwise().mean();
  const double target_mean = target.mean();
  features.rowwise() -= feature_mean;
  target.array() -= target_mean;
  Eigen::MatrixXd gram = features.transpose() * features;
  gram.diagonal().array() += l2_;
  weights_ = gram.ldlt().solve(features.transpose() * target);
  intercept_ = target_mean - feature_mean.dot(weights_);
  fitted_ = true;
}

double RidgeModel::predict(const Sequence& x) const {
  if (!fitted_) throw ModelError("ridge model queried before fit");
  double s = intercept_;
  for (std::size_t pos = 0; pos < x.size(); ++pos) {
    s += weights_(static_cast<Eigen::Index>(pos * alphabet_size_ + x[pos]));
  }
  return s;
}

KnnModel::KnnModel(std::size_t k, double bandwidth) : k_(k), bandwidth_(bandwidth) {
  if (k == 0) throw ModelError("k must be at least 1");
  if (!(bandwidth > 0.0)) throw ModelError("bandwidth must be positive");
}

void KnnModel::fit(const MeasuredData& data) {
  if (data.empty()) throw ModelError("knn fit needs at least one sample");
  data_ = data;
}

double KnnModel::predict(const Sequence& x) const {
  if (data_.empty()) throw ModelError("knn model queried before fit");
  if (auto exact = data_.fitness_of(x)) return *exact;
  std::vector<std::pair<std::size_t, std::size_t>> by_distance;  // (distance, insertion index)
  by_distance.reserve(data_.size());
  for (std::size_t i = 0; i < data_.size(); ++i) by_distance.emplace_back(hamming_distance(x, data_[i].sequence), i);
  const auto k = std::min(k_, by_distance.size());
  std::partial_sort(by_distance.begin(), by_distance.begin() + static_cast<std::ptrdiff_t>(k), by_distance.end());
  // Weights relative to the nearest distance avoid underflow for tiny bandwidths.
  const auto nearest = static_cast<double>(by_distance.front().first);
  double num = 0.0;
  double den = 0.0;
  for (std::size_t i = 0; i < k; ++i) {
    const double w = std::exp(-(static_cast<double>(by_distance[i].first) - nearest) / bandwidth_);
    num += w * data_[by_distance[i].second].fitness;
    den += w;
  }
  return num / den;
}

// ---------------------------------------------------------------------------

double r2_score(std::span<const double> predictions, std::span<const double> truths) {
  if (predictions.size() != truths.size()) throw ModelError("r2: size mismatch");
  if (truths.size() < 2) throw ModelError("r2 needs at least two samples");
  const double mean = std::accumulate(truths.begin(), truths.end(), 0.0) / static_cast<double>(truths.size());
  double ss_res = 0.0;
  double ss_tot = 0.0;
  for (std::size_t i = 0; i < truths.size(); ++i) {
    ss_res += (truths[i] - predictions[i]) * (truths[i] - predictions[i]);
    ss_tot += (truths[i] - mean) * (truths[i] - mean);
  }
  if (!(ss_tot > 0.0)) throw ModelError("r2 is undefined for constant truths");
  return 1.0 - ss_res / ss_tot;
}

std::vector<double> weights_from_r2(std::span<const double> r2) {
  std::vector<double> w(r2.size());
  double total = 0.0;
  for (std::size_t i = 0; i < r2.size(); ++i) {
    w[i] = std::isfinite(r2[i]) ? std::max(r2[i], 0.0) : 0.0;
    total += w[i];
  }
  if (!(total > 0.0)) return std::vector<double>(r2.size(), 1.0 / static_cast<double>(r2.size()));
  for (auto& x : w) x /= total;
  return w;
}

EnsemblePrediction weighted_mean_sd(std::span<const double> values, std::span<const double> weights) {
  double mean = 0.0;
  for (std::size_t i = 0; i < values.size(); ++i) mean += weights[i] * values[i];
  double var = 0.0;
  for (std::size_t i = 0; i < values.size(); ++i) var += weights[i] * (values[i] - mean) * (values[i] - mean);
  return {mean, std::sqrt(std::max(var, 0.0))};
}

AdaptiveEnsemble::AdaptiveEnsemble(std::vector<ModelPtr> members, EnsembleWeighting weighting, bool bootstrap,
                                   std::uint64_t seed)
    : members_(std::move(members)), weighting_(weighting), bootstrap_(bootstrap), seed_(seed) {
  if (members_.empty()) throw ModelError("ensemble needs at least one member");
  weights_.assign(members_.size(), 1.0 / static_cast<double>(members_.size()));
}

void AdaptiveEnsemble::fit(const MeasuredData& data) {
  ++epoch_;
  for (std::size_t m = 0; m < members_.size(); ++m) {
    if (!bootstrap_ || members_.size() == 1) {
      members_[m]->fit(data);
      continue;
    }
    Rng rng = make_rng(seed_, hash_combine(epoch_, m));
    std::uniform_int_distribution<std::size_t> pick(0, data.size() - 1);
    MeasuredData resample;
    for (std::size_t i = 0; i < data.size(); ++i) {
      const auto& e = data[pick(rng)];
      resample.add(e.sequence, e.fitness, e.round);
    }
    members_[m]->fit(resample);
  }
}

std::vector<double> AdaptiveEnsemble::member_predictions(const Sequence& x) const {
  std::vector<double> out;
  out.reserve(members_.size());
  for (const auto& m : members_) out.push_back(m->predict(x));
  return out;
}

EnsemblePrediction AdaptiveEnsemble::ensemble_predict(const Sequence& x) const {
  const auto values = member_predictions(x);
  return weighted_mean_sd(values, weights_);
}

void AdaptiveEnsemble::observe_batch(const std::vector<Measurement>& previous_batch) {
  if (weighting_ == EnsembleWeighting::kAdaptive && epoch_ > 0) reweight(previous_batch);
}

void AdaptiveEnsemble::reweight(const std::vector<Measurement>& previous_batch) {
  const auto uniform = std::vector<double>(members_.size(), 1.0 / static_cast<double>(members_.size()));
  std::vector<double> truths;
  for (const auto& e : previous_batch) truths.push_back(e.fitness);
  const bool constant =
      truths.size() < 2 || std::all_of(truths.begin(), truths.end(), [&](double t) { return t == truths.front(); });
  if (constant) {
    weights_ = uniform;
    return;
  }
  std::vector<double> r2;
  for (const auto& m : members_) {
    std::vector<double> predictions;
    for (const auto& e : previous_batch) predictions.push_back(m->predict(e.sequence));
    r2.push_back(r2_score(predictions, truths));
  }
  weights_ = weights_from_r2(r2);
}

void AdaptiveEnsemble::set_weights(std::vector<double> weights) {
  if (weights.size() != members_.size()) throw ModelError("weight count does not match members");
  double total = 0.0;
  for (double w : weights) {
    if (w < 0.0) throw ModelError("ensemble weights must be nonnegative");
    total += w;
  }
  if (!(total > 0.0)) throw ModelError("ensemble weights must not all be zero");
  for (auto& w : weights) w /= total;
  weights_ = std::move(weights);
}

}  // namespace seqsandbox
