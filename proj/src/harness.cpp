#include "seqsandbox/harness.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cstdio>
#include <mutex>
#include <ostream>
#include <thread>
#include <unordered_set>

#include "seqsandbox/random.hpp"

namespace seqsandbox {

using nlohmann::json;

namespace {

constexpr std::uint64_t kAutoEnumerationLimit = 1ULL << 24;  // 4^12

std::string fmt(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

Sequence mutate_exactly(const Sequence& x, std::size_t k, Rng& rng) {
  std::vector<std::size_t> positions(x.size());
  for (std::size_t i = 0; i < positions.size(); ++i) positions[i] = i;
  std::shuffle(positions.begin(), positions.end(), rng);
  const auto a = x.alphabet().size();
  std::uniform_int_distribution<std::size_t> other(1, a - 1);
  Sequence out = x;
  for (std::size_t i = 0; i < std::min(k, positions.size()); ++i) {
    const auto p = positions[i];
    out = out.with(p, static_cast<std::uint8_t>((out[p] + other(rng)) % a));
  }
  return out;
}

}  // namespace

const MetricSeries* RunLog::metric(const std::string& name) const {
  for (const auto& m : metrics) {
    if (m.name == name) return &m;
  }
  return nullptr;
}

double RunLog::final_value(const std::string& name) const {
  const auto* m = metric(name);
  if (!m || m->values.empty()) throw std::out_of_range("no metric " + name);
  return m->values.back();
}

std::size_t RunLog::oracle_queries_total() const {
  std::size_t n = 0;
  for (const auto& r : rounds) n += r.oracle_queries;
  return n;
}

std::size_t RunLog::model_queries_total() const {
  std::size_t n = 0;
  for (const auto& r : rounds) n += r.model_queries;
  return n;
}

MeasuredData measured_from_log(const RunLog& log, const std::shared_ptr<const Alphabet>& alphabet) {
  MeasuredData data;
  for (const auto& r : log.rounds) {
    for (const auto& m : r.batch) data.add(Sequence::parse(m.sequence, alphabet), m.fitness, r.round);
  }
  return data;
}

std::vector<double> metric_cummax(const RunLog& log) {
  std::vector<double> out;
  double best = 0.0;
  bool any = false;
  for (const auto& r : log.rounds) {
    for (const auto& m : r.batch) {
      best = any ? std::max(best, m.fitness) : m.fitness;
      any = true;
    }
    out.push_back(best);
  }
  return out;
}

std::vector<double> metric_count_above(const RunLog& log, const Threshold& threshold) {
  std::vector<double> out;
  std::unordered_set<std::string> seen;
  for (const auto& r : log.rounds) {
    for (const auto& m : r.batch) {
      if (threshold.passes(m.fitness)) seen.insert(m.sequence);
    }
    out.push_back(static_cast<double>(seen.size()));
  }
  return out;
}

std::vector<double> metric_optima_found(const RunLog& log, const LocalOptimaSet& optima, const Threshold& threshold) {
  std::unordered_set<std::string> members;
  for (const auto& o : optima.optima) {
    if (threshold.passes(o.fitness)) members.insert(o.sequence.str());
  }
  std::vector<double> out;
  std::unordered_set<std::string> found;
  for (const auto& r : log.rounds) {
    for (const auto& m : r.batch) {
      if (members.count(m.sequence)) found.insert(m.sequence);
    }
    out.push_back(static_cast<double>(found.size()));
  }
  return out;
}

std::vector<Sequence> initial_batch(const RunConfig& config, const Landscape& landscape, std::uint64_t seed) {
  auto batch = starting_sequences(config, landscape);
  const std::size_t B = config.budget.batch_size;
  std::unordered_set<Sequence, SequenceHash> seen(batch.begin(), batch.end());
  Rng rng = make_rng(seed, 0x0);
  const std::size_t starts = batch.size();
  std::uniform_int_distribution<std::size_t> pick(0, starts - 1);
  std::uniform_int_distribution<std::size_t> k(1, 2);
  for (std::size_t attempt = 0; batch.size() < B && attempt < 200 * B + 10000; ++attempt) {
    auto x = mutate_exactly(batch[pick(rng)], k(rng), rng);
    if (seen.insert(x).second) batch.push_back(std::move(x));
  }
  while (batch.size() < B) {
    if (seen.size() >= landscape.domain_size()) throw ConfigError("budget.batch_size: exceeds the sequence domain");
    auto x = random_sequence(landscape.length(), landscape.alphabet(), rng);
    if (seen.insert(x).second) batch.push_back(std::move(x));
  }
  return batch;
}

LandscapeContext prepare_landscape(const RunConfig& config) {
  LandscapeContext ctx;
  ctx.landscape = build_landscape(config.landscape);
  const bool want = config.optima == "always" ||
                    (config.optima == "auto" && !config.thresholds.empty() &&
                     ctx.landscape->domain_size() <= kAutoEnumerationLimit);
  if (want) {
    if (!ctx.landscape->enumerable()) throw ConfigError("optima: landscape is too large to enumerate");
    ctx.optima = enumerate_local_optima(*ctx.landscape, -1.0);
  }
  return ctx;
}

RunLog run_experiment(const RunConfig& config, std::uint64_t seed) {
  return run_experiment(config, seed, prepare_landscape(config));
}

RunLog run_experiment(const RunConfig& config, std::uint64_t seed, const LandscapeContext& context) {
  using Clock = std::chrono::steady_clock;
  const auto& landscape = *context.landscape;
  const auto& budget = config.budget;
  auto model = build_model(config.model, context.landscape, derive_seed(seed, 1));
  auto explorer = build_explorer(config.explorer);
  Rng rng = make_rng(seed, 2);

  RunLog log;
  log.config = config.to_json();
  log.landscape_name = landscape.name();
  log.seed = seed;

  MeasuredData data;
  auto label = [&](const std::vector<Sequence>& batch, std::size_t round, RoundRecord& record) {
    for (const auto& x : batch) {
      const double y = landscape.evaluate(x);
      data.add(x, y, round);
      record.batch.push_back({x.str(), y});
    }
    record.oracle_queries = batch.size();
  };

  {
    const auto start = Clock::now();
    RoundRecord r0;
    r0.round = 0;
    label(initial_batch(config, landscape, seed), 0, r0);
    r0.wall_seconds = std::chrono::duration<double>(Clock::now() - start).count();
    log.rounds.push_back(std::move(r0));
  }

  for (std::size_t t = 1; t <= budget.rounds; ++t) {
    const auto start = Clock::now();
    model->observe_batch(data.round_batch(t - 1));
    model->fit(data);
    MeteredModel meter(*model, budget.model_query_cap());
    auto proposal = explorer->propose_batch(meter, data, budget, rng);

    const auto& seqs = proposal.sequences;
    const std::string where = explorer->name() + " round " + std::to_string(t) + ": ";
    if (seqs.size() != budget.batch_size) {
      throw ContractViolation(where + "proposed " + std::to_string(seqs.size()) + " sequences, expected " +
                              std::to_string(budget.batch_size));
    }
    std::unordered_set<Sequence, SequenceHash> distinct;
    for (const auto& x : seqs) {
      if (x.size() != landscape.length()) throw ContractViolation(where + "proposed a sequence of the wrong length");
      if (!distinct.insert(x).second) throw ContractViolation(where + "duplicate proposal " + x.str());
      if (data.contains(x)) throw ContractViolation(where + "re-proposed measured sequence " + x.str());
    }
    if (meter.used() > meter.cap()) throw BudgetViolation(where + "model query cap exceeded");

    RoundRecord record;
    record.round = t;
    record.model_queries = meter.used();
    record.diagnostics = proposal.diagnostics;
    label(seqs, t, record);
    record.wall_seconds = std::chrono::duration<double>(Clock::now() - start).count();
    log.rounds.push_back(std::move(record));
  }

  log.metrics.push_back({"cummax", metric_cummax(log)});
  for (const auto& th : config.thresholds) log.metrics.push_back({"count_above_" + th.label(), metric_count_above(log, th)});
  if (context.optima) {
    log.optima_available.emplace();
    for (const auto& th : config.thresholds) {
      log.metrics.push_back({"optima_found_" + th.label(), metric_optima_found(log, *context.optima, th)});
      std::size_t n = 0;
      for (const auto& o : context.optima->optima) n += th.passes(o.fitness) ? 1 : 0;
      (*log.optima_available)[th.label()] = n;
    }
  }
  MetricSeries mq{"model_queries", {}}, oq{"oracle_queries", {}};
  for (const auto& r : log.rounds) {
    mq.values.push_back(static_cast<double>(r.model_queries));
    oq.values.push_back(static_cast<double>(r.oracle_queries));
  }
  log.metrics.push_back(std::move(mq));
  log.metrics.push_back(std::move(oq));
  return log;
}

json runlog_to_json(const RunLog& log) {
  json j;
  j["config"] = log.config;
  j["seed"] = log.seed;
  j["landscape"] = log.landscape_name;
  j["rounds"] = json::array();
  for (const auto& r : log.rounds) {
    json batch = json::array();
    for (const auto& m : r.batch) batch.push_back(json::array({m.sequence, m.fitness}));
    j["rounds"].push_back({{"round", r.round},
                           {"model_queries", r.model_queries},
                           {"oracle_queries", r.oracle_queries},
                           {"diagnostics",
                            {{"seed_set_size", r.diagnostics.seed_set_size},
                             {"candidates", r.diagnostics.candidates},
                             {"backfilled", r.diagnostics.backfilled}}},
                           {"batch", std::move(batch)}});
  }
  j["metrics"] = json::array();
  for (const auto& m : log.metrics) j["metrics"].push_back({{"name", m.name}, {"values", m.values}});
  j["optima_available"] = log.optima_available ? json(*log.optima_available) : json(nullptr);
  const std::size_t round0 = log.rounds.empty() ? 0 : log.rounds.front().oracle_queries;
  j["totals"] = {{"oracle_queries_total", log.oracle_queries_total()},
                 {"oracle_queries_explore", log.oracle_queries_total() - round0},
                 {"model_queries_total", log.model_queries_total()}};
  return j;
}

RunLog runlog_from_json(const json& j) {
  RunLog log;
  try {
    log.config = j.at("config");
    log.seed = j.at("seed").get<std::uint64_t>();
    log.landscape_name = j.at("landscape").get<std::string>();
    for (const auto& r : j.at("rounds")) {
      RoundRecord rec;
      rec.round = r.at("round").get<std::size_t>();
      rec.model_queries = r.at("model_queries").get<std::size_t>();
      rec.oracle_queries = r.at("oracle_queries").get<std::size_t>();
      const auto& d = r.at("diagnostics");
      rec.diagnostics.seed_set_size = d.at("seed_set_size").get<std::size_t>();
      rec.diagnostics.candidates = d.at("candidates").get<std::size_t>();
      rec.diagnostics.backfilled = d.at("backfilled").get<std::size_t>();
      for (const auto& m : r.at("batch")) rec.batch.push_back({m.at(0).get<std::string>(), m.at(1).get<double>()});
      log.rounds.push_back(std::move(rec));
    }
    for (const auto& m : j.at("metrics")) {
      log.metrics.push_back({m.at("name").get<std::string>(), m.at("values").get<std::vector<double>>()});
    }
    if (!j.at("optima_available").is_null()) {
      log.optima_available = j.at("optima_available").get<std::map<std::string, std::size_t>>();
    }
  } catch (const json::exception& e) {
    throw ConfigError(std::string("malformed run log: ") + e.what());
  }
  return log;
}

void write_metrics_csv(std::ostream& out, const RunLog& log) {
  out << "# config: " << log.config.dump() << "\n";
  out << "# seed: " << log.seed << "\n";
  out << "round,metric,value\n";
  for (const auto& m : log.metrics) {
    for (std::size_t t = 0; t < m.values.size(); ++t) out << t << ',' << m.name << ',' << fmt(m.values[t]) << '\n';
  }
}

void parallel_for(std::size_t n, std::size_t jobs, const std::function<void(std::size_t)>& fn) {
  jobs = std::max<std::size_t>(1, std::min(jobs, n));
  if (jobs == 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::atomic<bool> failed{false};
  std::exception_ptr error;
  std::mutex error_mutex;
  std::vector<std::thread> workers;
  for (std::size_t w = 0; w < jobs; ++w) {
    workers.emplace_back([&] {
      for (std::size_t i = next++; i < n && !failed; i = next++) {
        try {
          fn(i);
        } catch (...) {
          std::lock_guard lock(error_mutex);
          if (!error) error = std::current_exception();
          failed = true;
        }
      }
    });
  }
  for (auto& w : workers) w.join();
  if (error) std::rethrow_exception(error);
}

std::vector<SweepRow> sweep_alpha(const RunConfig& config, const std::vector<double>& alphas, std::size_t jobs) {
  if (config.model.type != "abstract") throw ConfigError("model.type: an alpha sweep needs the abstract model");
  if (alphas.empty()) throw ConfigError("alphas: the sweep grid is empty");
  for (double a : alphas) {
    if (!(a >= 0.0 && a <= 1.0)) throw ConfigError("alphas: entries must lie in [0, 1]");
  }
  const auto context = prepare_landscape(config);
  const std::size_t n_seeds = config.seeds.size();
  std::vector<SweepRow> rows(alphas.size() * n_seeds);
  parallel_for(rows.size(), jobs, [&](std::size_t cell) {
    RunConfig c = config;
    c.model.alpha = alphas[cell / n_seeds];
    const auto seed = config.seeds[cell % n_seeds];
    const auto log = run_experiment(c, seed, context);
    SweepRow row;
    row.alpha = c.model.alpha;
    row.seed = seed;
    row.final_cummax = log.final_value("cummax");
    if (context.optima && !config.thresholds.empty()) {
      row.optima_found = log.final_value("optima_found_" + config.thresholds.front().label());
    }
    for (const auto& th : config.thresholds) row.count_above.push_back(log.final_value("count_above_" + th.label()));
    rows[cell] = std::move(row);
  });
  return rows;
}

void write_sweep_csv(std::ostream& out, const RunConfig& config, const std::vector<SweepRow>& rows) {
  out << "# config: " << config.to_json().dump() << "\n";
  out << "alpha,seed,final_cummax,optima_found";
  for (const auto& th : config.thresholds) out << ",count_above_" << th.label();
  out << '\n';
  for (const auto& r : rows) {
    out << fmt(r.alpha) << ',' << r.seed << ',' << fmt(r.final_cummax) << ',';
    if (r.optima_found) out << fmt(*r.optima_found);
    for (double c : r.count_above) out << ',' << fmt(c);
    out << '\n';
  }
}

}  // namespace seqsandbox
