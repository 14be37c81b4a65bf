// Acceptance suite. Prints one PASS/FAIL line per criterion; exits non-zero
// if any criterion fails.
#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "json.hpp"
#include "seqsandbox/config.hpp"
#include "seqsandbox/harness.hpp"
#include "seqsandbox/optima.hpp"
#include "seqsandbox/random.hpp"
#include "seqsandbox/rna.hpp"
#include "seqsandbox/surrogate.hpp"

using namespace seqsandbox;
using nlohmann::json;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

std::size_t jobs() { return std::max(1u, std::thread::hardware_concurrency()); }

const std::vector<std::string> kExplorers = {"adalead", "wf", "wf_model_free", "cmaes", "bo_evo", "dbas", "cbas"};

RunConfig make_config(const json& landscape, const std::string& explorer, double alpha, std::size_t batch,
                      std::size_t ratio, std::size_t rounds, const json& thresholds = json::array(),
                      const std::string& optima = "never") {
  json j = {{"schema_version", 1},
            {"name", "acceptance"},
            {"landscape", landscape},
            {"model", {{"type", "abstract"}, {"alpha", alpha}}},
            {"explorer", {{"type", explorer}}},
            {"budget", {{"batch_size", batch}, {"virtual_ratio", ratio}, {"rounds", rounds}}},
            {"thresholds", thresholds},
            {"optima", optima}};
  return parse_config(j);
}

json rna(std::size_t length, std::size_t targets, std::uint64_t seed) {
  return {{"type", "rna"}, {"length", length}, {"targets", targets}, {"seed", seed}};
}

double mean(const std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) s += x;
  return v.empty() ? 0.0 : s / static_cast<double>(v.size());
}

std::string fmt(const char* f, double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, x);
  return buf;
}

// Final cummax of AdaLead runs over `seeds`, run in parallel.
std::vector<double> final_cummax(const RunConfig& config, const std::vector<std::uint64_t>& seeds,
                                 const LandscapeContext& ctx) {
  std::vector<double> out(seeds.size());
  parallel_for(seeds.size(), jobs(), [&](std::size_t i) { out[i] = metric_cummax(run_experiment(config, seeds[i], ctx)).back(); });
  return out;
}

Outcome budget_invariants() {
  const auto t0 = Clock::now();
  const std::vector<json> landscapes = {rna(10, 1, 1), rna(8, 2, 2),
                                        {{"type", "additive"}, {"length", 8}, {"seed", 3}},
                                        {{"type", "tf_synth"}, {"length", 6}, {"seed", 4}}};
  const std::vector<std::uint64_t> seeds = {0, 1, 2};
  struct Cell {
    std::size_t landscape, explorer;
    std::uint64_t seed;
  };
  std::vector<Cell> cells;
  for (std::size_t l = 0; l < landscapes.size(); ++l) {
    for (std::size_t e = 0; e < kExplorers.size(); ++e) {
      for (auto s : seeds) cells.push_back({l, e, s});
    }
  }
  std::vector<std::size_t> violations(cells.size(), 0);
  std::vector<std::string> errors(cells.size());
  constexpr std::size_t B = 30, v = 10, T = 4;
  parallel_for(cells.size(), jobs(), [&](std::size_t i) {
    const auto& c = cells[i];
    try {
      const auto config = make_config(landscapes[c.landscape], kExplorers[c.explorer], 0.5, B, v, T);
      const auto log = run_experiment(config, c.seed);
      if (log.rounds.size() != T + 1) ++violations[i];
      for (const auto& r : log.rounds) {
        if (r.oracle_queries != B || r.batch.size() != B) ++violations[i];
        if (r.model_queries > v * B) ++violations[i];
      }
    } catch (const std::exception& e) {
      ++violations[i];
      errors[i] = e.what();
    }
  });
  std::size_t total = 0;
  for (auto n : violations) total += n;
  const double secs = seconds_since(t0);
  std::string detail = std::to_string(cells.size()) + " cells, " + std::to_string(total) + " violations, " +
                       fmt("%.1f", secs) + " s";
  for (std::size_t i = 0; i < cells.size(); ++i) {
    if (!errors[i].empty()) {
      detail += "; first error: " + errors[i];
      break;
    }
  }
  return {cells.size() >= 60 && total == 0 && secs < 600.0, detail};
}

Outcome alpha_sweep_error() {
  const auto t0 = Clock::now();
  LandscapePtr landscape = make_rna_landscape(14, 1, 50, 7);
  auto rng = make_rng(7, 1);
  MeasuredData measured;
  while (measured.size() < 100) {
    const auto x = random_sequence(14, landscape->alphabet(), rng);
    measured.add(x, landscape->evaluate(x), 0);
  }
  std::vector<Sequence> queries;
  for (int i = 0; i < 1000; ++i) queries.push_back(random_sequence(14, landscape->alphabet(), rng));

  const std::vector<double> alphas = {0.0, 0.25, 0.5, 0.75, 1.0};
  std::vector<double> err;
  double worst_exact = 0.0;
  for (double a : alphas) {
    NoisyAbstractModel model(landscape, a, 99);
    model.fit(measured);
    double s = 0.0;
    for (const auto& q : queries) {
      const double d = std::abs(model.predict(q) - landscape->evaluate(q));
      s += d;
      if (a == 1.0) worst_exact = std::max(worst_exact, d);
    }
    err.push_back(s / static_cast<double>(queries.size()));
  }
  bool monotone = true;
  for (std::size_t i = 1; i < err.size(); ++i) monotone = monotone && err[i] <= err[i - 1];
  const double secs = seconds_since(t0);
  std::string detail = "mean |error| by alpha:";
  for (double e : err) detail += " " + fmt("%.4f", e);
  detail += "; max error at alpha 1 = " + fmt("%.3g", worst_exact) + ", " + fmt("%.1f", secs) + " s";
  return {monotone && worst_exact == 0.0 && secs < 60.0, detail};
}

// Brute force reference: compares every neighbor directly.
std::set<std::string> naive_optima(const Landscape& landscape) {
  const std::size_t L = landscape.length();
  const std::size_t A = landscape.alphabet()->size();
  std::set<std::string> out;
  std::uint64_t n = 1;
  for (std::size_t i = 0; i < L; ++i) n *= A;
  for (std::uint64_t idx = 0; idx < n; ++idx) {
    const auto x = Sequence::from_index(idx, L, landscape.alphabet());
    const double f = landscape.evaluate(x);
    bool peak = true;
    for (std::size_t p = 0; p < L && peak; ++p) {
      for (std::size_t a = 0; a < A && peak; ++a) {
        std::string s = x.str();
        const char c = landscape.alphabet()->symbols()[a];
        if (s[p] == c) continue;
        s[p] = c;
        peak = landscape.evaluate(Sequence::parse(s, landscape.alphabet())) < f;
      }
    }
    if (peak) out.insert(x.str());
  }
  return out;
}

Outcome optima_equivalence() {
  std::size_t mismatches = 0, total = 0;
  for (std::uint64_t s = 0; s < 20; ++s) {
    json spec;
    switch (s % 4) {
      case 0: spec = {{"type", "tf_synth"}, {"length", 5 + s % 2}, {"seed", s}}; break;
      case 1: spec = rna(4 + s % 3, 1 + s % 2, s); break;
      case 2: spec = {{"type", "additive"}, {"length", 6}, {"seed", s}}; break;
      default: spec = rna(6, 2, s); break;
    }
    const auto landscape = build_landscape(parse_landscape_spec(spec));
    std::set<std::string> fast;
    const auto set = enumerate_local_optima(*landscape, -1.0);
    for (const auto& o : set.optima) fast.insert(o.sequence.str());
    const auto naive = naive_optima(*landscape);
    total += naive.size();
    if (fast != naive) ++mismatches;
  }
  const auto t0 = Clock::now();
  const auto tf = synth_tf_landscape(11, 8);
  const auto big = enumerate_local_optima(*tf, -1.0);
  const double secs = seconds_since(t0);
  return {mismatches == 0 && secs < 300.0, "20 landscapes, " + std::to_string(mismatches) + " mismatches (" +
                                               std::to_string(total) + " optima); 4^8 TF: " +
                                               std::to_string(big.size()) + " optima in " + fmt("%.2f", secs) + " s"};
}

Outcome optima_ordering() {
  const auto t0 = Clock::now();
  const std::vector<std::string> rivals = {"cmaes", "dbas", "wf_model_free"};
  std::size_t wins = 0;
  std::string detail;
  for (std::uint64_t l = 0; l < 5; ++l) {
    const auto base = make_config(rna(12, 1, 100 + l), "adalead", 1.0, 100, 20, 10, json::array({0.75}), "always");
    const auto ctx = prepare_landscape(base);
    std::map<std::string, double> found;
    for (const auto& e : std::vector<std::string>{"adalead", "cmaes", "dbas", "wf_model_free"}) {
      auto config = base;
      config.explorer = make_config(rna(12, 1, 0), e, 1.0, 100, 20, 10).explorer;
      std::vector<double> counts(5);
      parallel_for(5, jobs(), [&](std::size_t s) {
        counts[s] = run_experiment(config, s, ctx).final_value("optima_found_0.75");
      });
      found[e] = mean(counts);
    }
    bool win = true;
    for (const auto& r : rivals) win = win && found["adalead"] >= found[r];
    wins += win;
    detail += (l ? "; " : "") + std::string("L") + std::to_string(l) + " avail " +
              std::to_string(ctx.optima->above(0.75).size()) + " ada " + fmt("%.1f", found["adalead"]) + " cma " +
              fmt("%.1f", found["cmaes"]) + " dbas " + fmt("%.1f", found["dbas"]) + " wf " +
              fmt("%.1f", found["wf_model_free"]);
  }
  const double secs = seconds_since(t0);
  return {wins >= 4 && secs < 1800.0,
          std::to_string(wins) + "/5 landscapes (" + detail + "), " + fmt("%.0f", secs) + " s"};
}

RunConfig two_target(double alpha) { return make_config(rna(14, 2, 21), "adalead", alpha, 100, 20, 10); }

Outcome consistency() {
  const std::vector<std::uint64_t> seeds = {0, 1, 2, 3, 4};
  const auto ctx = prepare_landscape(two_target(0.0));
  std::vector<double> m;
  for (double a : {0.0, 0.5, 1.0}) m.push_back(mean(final_cummax(two_target(a), seeds, ctx)));
  const bool ok = m[1] >= m[0] - 0.02 && m[2] >= m[1] - 0.02;
  return {ok, "mean final cummax at alpha 0/0.5/1: " + fmt("%.4f", m[0]) + " " + fmt("%.4f", m[1]) + " " +
                  fmt("%.4f", m[2])};
}

Outcome robustness() {
  const auto config = two_target(0.0);
  const auto ctx = prepare_landscape(config);
  std::vector<int> improved(10, 0);
  parallel_for(10, jobs(), [&](std::size_t s) {
    const auto cm = metric_cummax(run_experiment(config, s, ctx));
    improved[s] = cm.back() > cm.front();
  });
  int n = 0;
  for (int i : improved) n += i;
  return {n >= 8, std::to_string(n) + "/10 runs improved on the round-0 maximum"};
}

Outcome hyperparameters() {
  const std::vector<std::uint64_t> seeds = {0, 1, 2, 3, 4};
  const auto base = two_target(1.0);
  const auto ctx = prepare_landscape(base);
  std::vector<double> cell;
  std::string detail;
  for (double kappa : {0.05, 0.25, 0.5}) {
    for (double r : {0.0, 0.2}) {
      auto config = base;
      config.explorer.adalead.kappa = kappa;
      config.explorer.adalead.recombination_rate = r;
      cell.push_back(mean(final_cummax(config, seeds, ctx)));
      detail += (detail.empty() ? "" : " ") + fmt("k%.2f", kappa) + fmt("/r%.1f=", r) + fmt("%.4f", cell.back());
    }
  }
  const double best = *std::max_element(cell.begin(), cell.end());
  const double worst = *std::min_element(cell.begin(), cell.end());
  return {worst >= 0.8 * best, detail + "; worst/best = " + fmt("%.3f", worst / best)};
}

Outcome mutation_rate() {
  std::string detail;
  bool ok = true;
  for (std::size_t L : {14, 100}) {
    auto rng = make_rng(L, 8);
    const auto alphabet = Alphabet::from_name("rna");
    double total = 0.0;
    constexpr int trials = 10000;
    for (int i = 0; i < trials; ++i) {
      const auto x = random_sequence(L, alphabet, rng);
      total += static_cast<double>(hamming_distance(x, mutate(x, 1.0 / static_cast<double>(L), rng)));
    }
    const double m = total / trials;
    ok = ok && m >= 0.9 && m <= 1.1;
    detail += (detail.empty() ? "" : ", ") + std::string("L=") + std::to_string(L) + " mean " + fmt("%.4f", m);
  }
  return {ok, detail};
}

Outcome determinism() {
  std::size_t diffs = 0, unchanged = 0;
  for (const auto& e : kExplorers) {
    const auto config = make_config(rna(10, 1, 5), e, 0.5, 20, 5, 3, json::array({0.5}), "auto");
    auto text = [&](std::uint64_t seed) {
      const auto log = run_experiment(config, seed);
      std::ostringstream m;
      write_metrics_csv(m, log);
      return std::make_pair(runlog_to_json(log).dump(2), m.str());
    };
    if (text(3) != text(3)) ++diffs;
    const auto r1 = [&](std::uint64_t seed) {
      const auto log = run_experiment(config, seed);
      std::vector<std::string> out;
      for (const auto& s : log.rounds.at(1).batch) out.push_back(s.sequence);
      return out;
    };
    if (r1(3) == r1(4)) ++unchanged;
  }
  return {diffs == 0 && unchanged == 0, std::to_string(kExplorers.size()) + " explorers, " + std::to_string(diffs) +
                                            " non-reproducible, " + std::to_string(unchanged) +
                                            " unchanged by a new seed"};
}

Outcome flat_landscape() {
  constexpr std::size_t B = 50;
  const auto config = make_config({{"type", "constant"}, {"length", 10}, {"alphabet", "rna"}, {"value", 0.5}},
                                  "adalead", 1.0, B, 10, 8);
  std::size_t bad = 0;
  for (std::uint64_t s = 0; s < 3; ++s) {
    const auto log = run_experiment(config, s);
    for (std::size_t t = 1; t < log.rounds.size(); ++t) bad += log.rounds[t].diagnostics.seed_set_size != B;
  }
  return {bad == 0, std::to_string(bad) + " of 24 rounds with a seed set smaller than B=" + std::to_string(B)};
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria = {
      {"budget invariants", budget_invariants},
      {"abstract model error falls with alpha", alpha_sweep_error},
      {"optima enumeration matches brute force", optima_equivalence},
      {"adalead finds at least as many optima", optima_ordering},
      {"cummax non-decreasing in alpha", consistency},
      {"improves with an uninformative model", robustness},
      {"kappa and recombination robustness", hyperparameters},
      {"mutation rate calibration", mutation_rate},
      {"determinism", determinism},
      {"flat landscape seed set", flat_landscape},
  };
  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    Outcome o;
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    failed += !o.pass;
    std::printf("%s %2zu %s: %s\n", o.pass ? "PASS" : "FAIL", i + 1, criteria[i].first.c_str(), o.detail.c_str());
    std::fflush(stdout);
  }
  std::printf("%d of %zu criteria passed\n", static_cast<int>(criteria.size()) - failed, criteria.size());
  return failed ? 1 : 0;
}
