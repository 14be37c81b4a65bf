#include <algorithm>
#include <cmath>
#include <numeric>

#include "seqsandbox/explorer.hpp"

namespace seqsandbox {

Sequence decode_argmax(const Eigen::VectorXd& v, std::size_t length, const std::shared_ptr<const Alphabet>& alphabet) {
  const auto a = alphabet->size();
  if (static_cast<std::size_t>(v.size()) != length * a) throw std::invalid_argument("vector size is not A*L");
  std::vector<std::uint8_t> symbols(length);
  for (std::size_t p = 0; p < length; ++p) {
    Eigen::Index best = 0;
    v.segment(static_cast<Eigen::Index>(p * a), static_cast<Eigen::Index>(a)).maxCoeff(&best);
    symbols[p] = static_cast<std::uint8_t>(best);
  }
  return Sequence(alphabet, std::move(symbols));
}

void CmaesExplorer::initialize(std::size_t length, std::size_t alphabet_size, Rng& rng) {
  const auto n = static_cast<Eigen::Index>(length * alphabet_size);
  CmaesState s;
  // A zero mean cannot carry unit norm; start from a tiny random perturbation.
  std::normal_distribution<double> normal(0.0, 1.0);
  s.mean = Eigen::VectorXd(n);
  for (Eigen::Index i = 0; i < n; ++i) s.mean(i) = 1e-3 * normal(rng);
  s.mean.normalize();
  s.covariance = Eigen::MatrixXd::Identity(n, n);
  s.path_sigma = Eigen::VectorXd::Zero(n);
  s.path_c = Eigen::VectorXd::Zero(n);
  s.sigma = config_.initial_sigma;
  s.length = length;
  s.alphabet_size = alphabet_size;
  state_ = std::move(s);
}

void CmaesExplorer::update(const std::vector<Eigen::VectorXd>& ranked, std::size_t parents) {
  auto& s = *state_;
  const auto n = static_cast<double>(s.mean.size());
  const auto mu = std::max<std::size_t>(1, std::min(parents, ranked.size()));

  // Standard rank-based recombination weights and learning rates.
  std::vector<double> w(mu);
  for (std::size_t i = 0; i < mu; ++i) w[i] = std::log(static_cast<double>(mu) + 0.5) - std::log(static_cast<double>(i + 1));
  const double wsum = std::accumulate(w.begin(), w.end(), 0.0);
  for (auto& x : w) x /= wsum;
  double wsq = 0.0;
  for (double x : w) wsq += x * x;
  const double mueff = 1.0 / wsq;
  const double cc = (4.0 + mueff / n) / (n + 4.0 + 2.0 * mueff / n);
  const double cs = (mueff + 2.0) / (n + mueff + 5.0);
  const double c1 = 2.0 / ((n + 1.3) * (n + 1.3) + mueff);
  const double cmu = std::min(1.0 - c1, 2.0 * (mueff - 2.0 + 1.0 / mueff) / ((n + 2.0) * (n + 2.0) + mueff));
  const double damps = 1.0 + 2.0 * std::max(0.0, std::sqrt((mueff - 1.0) / (n + 1.0)) - 1.0) + cs;
  const double chi_n = std::sqrt(n) * (1.0 - 1.0 / (4.0 * n) + 1.0 / (21.0 * n * n));

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(s.covariance);
  const Eigen::MatrixXd basis = eig.eigenvectors();
  const Eigen::VectorXd inv_sqrt = eig.eigenvalues().cwiseMax(config_.eigenvalue_floor).cwiseSqrt().cwiseInverse();
  const Eigen::MatrixXd inv_sqrt_c = basis * inv_sqrt.asDiagonal() * basis.transpose();

  const Eigen::VectorXd old_mean = s.mean;
  Eigen::VectorXd step = Eigen::VectorXd::Zero(s.mean.size());
  std::vector<Eigen::VectorXd> ys;
  ys.reserve(mu);
  for (std::size_t i = 0; i < mu; ++i) {
    ys.push_back((ranked[i] - old_mean) / s.sigma);
    step += w[i] * ys.back();
  }
  s.mean = old_mean + s.sigma * step;

  s.path_sigma = (1.0 - cs) * s.path_sigma + std::sqrt(cs * (2.0 - cs) * mueff) * (inv_sqrt_c * step);
  ++s.generation;
  const double ps_norm = s.path_sigma.norm();
  const double decay = 1.0 - std::pow(1.0 - cs, 2.0 * static_cast<double>(s.generation));
  const bool hsig = ps_norm / std::sqrt(decay) / chi_n < 1.4 + 2.0 / (n + 1.0);
  s.path_c = (1.0 - cc) * s.path_c + (hsig ? std::sqrt(cc * (2.0 - cc) * mueff) : 0.0) * step;

  Eigen::MatrixXd rank_mu = Eigen::MatrixXd::Zero(s.mean.size(), s.mean.size());
  for (std::size_t i = 0; i < mu; ++i) rank_mu += w[i] * ys[i] * ys[i].transpose();
  const double correction = hsig ? 0.0 : cc * (2.0 - cc);
  s.covariance = (1.0 - c1 - cmu) * s.covariance + c1 * (s.path_c * s.path_c.transpose() + correction * s.covariance) +
                 cmu * rank_mu;
  s.sigma *= std::exp((cs / damps) * (ps_norm / chi_n - 1.0));

  // Keep C symmetric positive definite with a floored spectrum.
  s.covariance = (0.5 * (s.covariance + s.covariance.transpose())).eval();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> fix(s.covariance);
  if (fix.eigenvalues().minCoeff() < config_.eigenvalue_floor) {
    const Eigen::VectorXd clamped = fix.eigenvalues().cwiseMax(config_.eigenvalue_floor);
    s.covariance = fix.eigenvectors() * clamped.asDiagonal() * fix.eigenvectors().transpose();
    s.covariance = (0.5 * (s.covariance + s.covariance.transpose())).eval();
  }

  // Unit-norm mean keeps the relaxed one-hot vectors from drifting off.
  const double norm = s.mean.norm();
  if (norm > 0.0) s.mean /= norm;
}

Proposal CmaesExplorer::propose_batch(MeteredModel& model, const MeasuredData& history,
                                      const ExplorationBudget& budget, Rng& rng) {
  if (history.empty()) throw std::logic_error("CMA-ES needs at least one measured round");
  const auto& proto = history[0].sequence;
  const auto alphabet = proto.alphabet_ptr();
  if (!state_) initialize(proto.size(), alphabet->size(), rng);
  auto& s = *state_;
  const auto n = s.mean.size();

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(s.covariance);
  const Eigen::MatrixXd transform =
      eig.eigenvectors() * eig.eigenvalues().cwiseMax(config_.eigenvalue_floor).cwiseSqrt().asDiagonal();

  struct Sample {
    Eigen::VectorXd x;
    double score;
    std::size_t order;
  };
  std::vector<Sample> samples;
  const std::size_t total = budget.model_query_cap();
  samples.reserve(total);
  CachedScorer scorer(model);
  std::normal_distribution<double> normal(0.0, 1.0);
  for (std::size_t i = 0; i < total; ++i) {
    Eigen::VectorXd z(n);
    for (Eigen::Index j = 0; j < n; ++j) z(j) = normal(rng);
    Eigen::VectorXd x = s.mean + s.sigma * (transform * z);
    const auto seq = decode_argmax(x, s.length, alphabet);
    if (!scorer.can_score(seq)) break;
    samples.push_back({std::move(x), scorer.score(seq), i});
  }

  std::stable_sort(samples.begin(), samples.end(), [](const Sample& a, const Sample& b) { return a.score > b.score; });

  std::vector<ScoredSequence> decoded;
  decoded.reserve(samples.size());
  for (const auto& smp : samples) decoded.push_back({decode_argmax(smp.x, s.length, alphabet), smp.score});

  Proposal proposal;
  proposal.diagnostics.candidates = decoded.size();
  proposal.sequences = select_top_unmeasured(decoded, history, budget.batch_size);

  std::vector<Eigen::VectorXd> ranked;
  ranked.reserve(samples.size());
  for (auto& smp : samples) ranked.push_back(std::move(smp.x));
  if (!ranked.empty()) update(ranked, std::max<std::size_t>(1, ranked.size() / 4));

  std::vector<Sequence> parents;
  for (const auto& m : history.round_batch(history.last_round())) parents.push_back(m.sequence);
  proposal.diagnostics.backfilled =
      backfill(proposal.sequences, parents, history, budget.batch_size, 1.0 / static_cast<double>(s.length), rng);
  return proposal;
}

}  // namespace seqsandbox
