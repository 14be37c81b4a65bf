#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

#include "doctest.h"
#include "seqsandbox/cli.hpp"
#include "seqsandbox/config.hpp"
#include "seqsandbox/harness.hpp"
#include "seqsandbox/optima.hpp"
#include "seqsandbox/report.hpp"

using namespace seqsandbox;
using nlohmann::json;
namespace fs = std::filesystem;

namespace {

class ToyLandscape : public Landscape {
 public:
  ToyLandscape() : Landscape("toy", 2, Alphabet::from_name("01")) {}
  double evaluate(const Sequence& x) const override {
    static const double f[4] = {0.1, 0.5, 0.4, 0.2};
    return f[x.to_index()];
  }
};

json base_config(const std::string& explorer = "adalead") {
  auto j = json::parse(R"({
    "schema_version": 1,
    "name": "unit",
    "landscape": {"type": "rna", "length": 10, "seed": 3},
    "model": {"type": "abstract", "alpha": 0.5},
    "explorer": {"type": "adalead"},
    "budget": {"batch_size": 20, "virtual_ratio": 5, "rounds": 3},
    "seeds": [0],
    "thresholds": [0.5]
  })");
  j["explorer"]["type"] = explorer;
  return j;
}

RunLog toy_log(const std::vector<std::vector<LabeledSequence>>& batches) {
  RunLog log;
  for (std::size_t t = 0; t < batches.size(); ++t) {
    RoundRecord r;
    r.round = t;
    r.batch = batches[t];
    r.oracle_queries = r.batch.size();
    log.rounds.push_back(r);
  }
  return log;
}

fs::path scratch(const std::string& name) {
  auto p = fs::temp_directory_path() / ("seqsandbox_harness_" + name);
  fs::remove_all(p);
  return p;
}

int cli(const std::vector<std::string>& args, std::string* out_text = nullptr, std::string* err_text = nullptr) {
  std::ostringstream out, err;
  const int code = run_cli(args, out, err);
  if (out_text) *out_text = out.str();
  if (err_text) *err_text = err.str();
  return code;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return std::string(std::istreambuf_iterator<char>(in), {});
}

// File contents without leading '#' comment lines.
std::string csv_body(const fs::path& p) {
  std::istringstream in(slurp(p));
  std::string line, out;
  while (std::getline(in, line)) {
    if (!line.empty() && line[0] == '#') continue;
    out += line + "\n";
  }
  return out;
}

void write_text(const fs::path& p, const std::string& text) {
  fs::create_directories(p.parent_path());
  std::ofstream(p) << text;
}

// Minimal well-formedness check: every opened element is closed in order.
bool balanced_tags(const std::string& xml) {
  std::vector<std::string> stack;
  std::size_t i = 0;
  while ((i = xml.find('<', i)) != std::string::npos) {
    const auto end = xml.find('>', i);
    if (end == std::string::npos) return false;
    const std::string tag = xml.substr(i + 1, end - i - 1);
    i = end + 1;
    if (tag.empty()) return false;
    if (tag[0] == '?' || tag[0] == '!') continue;
    if (tag[0] == '/') {
      if (stack.empty() || stack.back() != tag.substr(1)) return false;
      stack.pop_back();
    } else if (tag.back() != '/') {
      stack.push_back(tag.substr(0, tag.find(' ')));
    }
  }
  return stack.empty();
}

}  // namespace

TEST_CASE("config rejects a missing schema version and unknown keys") {
  auto j = base_config();
  j.erase("schema_version");
  CHECK_THROWS_AS(parse_config(j), ConfigError);

  j = base_config();
  j["landscape"]["lenght"] = 8;
  try {
    parse_config(j);
    FAIL("expected ConfigError");
  } catch (const ConfigError& e) {
    CHECK(std::string(e.what()).find("landscape.lenght") != std::string::npos);
  }

  j = base_config();
  j["schema_version"] = 2;
  CHECK_THROWS_AS(parse_config(j), ConfigError);
  j = base_config();
  j["explorer"]["type"] = "simulated_annealing";
  CHECK_THROWS_AS(parse_config(j), ConfigError);
  j = base_config();
  j["seeds"] = {1, 1};
  CHECK_THROWS_AS(parse_config(j), ConfigError);
  j = base_config();
  j["budget"]["virtual_ratio"] = 0;
  CHECK_THROWS_AS(parse_config(j), ConfigError);
}

TEST_CASE("config survives a round trip through json") {
  for (const char* e : {"adalead", "wf", "wf_model_free", "cmaes", "bo_evo", "dbas", "cbas"}) {
    const auto c = parse_config(base_config(e));
    CHECK(parse_config(c.to_json()).to_json() == c.to_json());
  }
}

TEST_CASE("thresholds parse as strict or inclusive") {
  const auto strict = parse_threshold(json(0.75));
  CHECK_FALSE(strict.inclusive);
  CHECK_FALSE(strict.passes(0.75));
  CHECK(strict.passes(0.7500001));
  const auto eq = parse_threshold(json("=1"));
  CHECK(eq.inclusive);
  CHECK(eq.passes(1.0 - 1e-12));
  CHECK_FALSE(eq.passes(0.99));
  CHECK(parse_threshold(json(">=0.5")).inclusive);
  CHECK_FALSE(parse_threshold(json(">0.5")).inclusive);
  CHECK_THROWS_AS(parse_threshold(json("big")), ConfigError);
}

TEST_CASE("cumulative max of a three round log") {
  auto log = toy_log({{{"00", 0.3}}, {{"01", 0.5}}, {{"10", 0.4}}});
  CHECK(metric_cummax(log) == std::vector<double>{0.3, 0.5, 0.5});
}

TEST_CASE("count above and optima found on the toy landscape") {
  ToyLandscape toy;
  const auto optima = enumerate_local_optima(toy, -1.0);
  REQUIRE(optima.size() == 2);
  // 01 twice across rounds counts once.
  auto log = toy_log({{{"01", 0.5}, {"00", 0.1}}, {{"11", 0.2}, {"01", 0.5}}, {{"10", 0.4}}});
  const Threshold t03{0.3, false};
  CHECK(metric_count_above(log, t03) == std::vector<double>{1, 1, 2});
  CHECK(metric_optima_found(log, optima, t03) == std::vector<double>{1, 1, 2});
  CHECK(metric_optima_found(log, optima, Threshold{0.45, false}) == std::vector<double>{1, 1, 1});
  CHECK(metric_optima_found(log, optima, Threshold{0.5, false}) == std::vector<double>{0, 0, 0});
  CHECK(metric_optima_found(log, optima, Threshold{0.5, true}) == std::vector<double>{1, 1, 1});
}

TEST_CASE("every round labels exactly the batch size") {
  for (const char* e : {"adalead", "wf", "wf_model_free", "cmaes", "bo_evo", "dbas", "cbas"}) {
    CAPTURE(e);
    const auto config = parse_config(base_config(e));
    const auto log = run_experiment(config, 0);
    REQUIRE(log.rounds.size() == config.budget.rounds + 1);
    std::set<std::string> seen;
    for (const auto& r : log.rounds) {
      CHECK(r.batch.size() == config.budget.batch_size);
      CHECK(r.oracle_queries == config.budget.batch_size);
      CHECK(r.model_queries <= config.budget.model_query_cap());
      for (const auto& s : r.batch) CHECK(seen.insert(s.sequence).second);
    }
    CHECK(log.oracle_queries_total() == (config.budget.rounds + 1) * config.budget.batch_size);
    if (std::string(e) == "wf_model_free") CHECK(log.model_queries_total() == 0);
    const auto cm = metric_cummax(log);
    for (std::size_t t = 1; t < cm.size(); ++t) CHECK(cm[t] >= cm[t - 1]);
    CHECK(log.metric("count_above_0.5") != nullptr);
    CHECK(log.metric("optima_found_0.5") != nullptr);
  }
}

TEST_CASE("optima found never exceeds what is available or measured") {
  const auto config = parse_config(base_config("wf"));
  const auto ctx = prepare_landscape(config);
  REQUIRE(ctx.optima.has_value());
  const auto log = run_experiment(config, 1, ctx);
  const auto available = ctx.optima->above(0.5).size();
  const auto found = log.metric("optima_found_0.5")->values;
  const auto above = log.metric("count_above_0.5")->values;
  for (std::size_t t = 0; t < found.size(); ++t) {
    CHECK(found[t] <= static_cast<double>(available));
    CHECK(found[t] <= above[t]);
  }
  REQUIRE(log.optima_available.has_value());
  CHECK(log.optima_available->at("0.5") == available);
}

TEST_CASE("runs are reproducible and seed sensitive") {
  const auto config = parse_config(base_config());
  const auto a = runlog_to_json(run_experiment(config, 4)).dump();
  const auto b = runlog_to_json(run_experiment(config, 4)).dump();
  CHECK(a == b);
  std::ostringstream ma, mb;
  write_metrics_csv(ma, run_experiment(config, 4));
  write_metrics_csv(mb, run_experiment(config, 4));
  CHECK(ma.str() == mb.str());

  const auto l4 = run_experiment(config, 4);
  const auto l5 = run_experiment(config, 5);
  std::vector<std::string> r4, r5;
  for (const auto& s : l4.rounds[1].batch) r4.push_back(s.sequence);
  for (const auto& s : l5.rounds[1].batch) r5.push_back(s.sequence);
  CHECK(r4 != r5);
}

TEST_CASE("round zero does not depend on the explorer") {
  std::string first;
  for (const char* e : {"adalead", "wf", "cmaes", "bo_evo", "cbas"}) {
    const auto log = run_experiment(parse_config(base_config(e)), 2);
    const auto r0 = json(runlog_to_json(log)["rounds"][0]["batch"]).dump();
    if (first.empty()) first = r0;
    CHECK(r0 == first);
  }
}

TEST_CASE("run log json round trip") {
  const auto log = run_experiment(parse_config(base_config("dbas")), 0);
  const auto j = runlog_to_json(log);
  CHECK(runlog_to_json(runlog_from_json(j)) == j);
  CHECK(j["totals"]["oracle_queries_total"] == 80);
}

TEST_CASE("alpha sweep covers the grid in order") {
  auto config = parse_config(base_config());
  config.seeds = {0, 1};
  const auto rows = sweep_alpha(config, {0.0, 0.5, 1.0}, 3);
  REQUIRE(rows.size() == 6);
  CHECK(rows[0].alpha == 0.0);
  CHECK(rows[1].seed == 1);
  CHECK(rows[5].alpha == 1.0);
  const auto again = sweep_alpha(config, {0.0, 0.5, 1.0}, 1);
  for (std::size_t i = 0; i < rows.size(); ++i) CHECK(rows[i].final_cummax == again[i].final_cummax);
  std::ostringstream out;
  write_sweep_csv(out, config, rows);
  CHECK(out.str().find("\nalpha,seed,final_cummax,optima_found,count_above_0.5\n") != std::string::npos);

  config.model.type = "ridge";
  CHECK_THROWS_AS(sweep_alpha(config, {0.5}), ConfigError);
}

TEST_CASE("report aggregates mean and sd per explorer") {
  CHECK(format_mean_sd(mean_sd({1.0})) == "1");
  const auto m = mean_sd({1.0, 2.0, 3.0});
  CHECK(m.mean == doctest::Approx(2.0));
  CHECK(m.sd == doctest::Approx(1.0));

  std::vector<RunLog> logs;
  for (std::uint64_t s : {0, 1}) logs.push_back(run_experiment(parse_config(base_config("adalead")), s));
  const auto groups = group_by_landscape(logs);
  REQUIRE(groups.size() == 1);
  std::ostringstream table;
  write_optima_table(table, groups);
  std::string header;
  std::getline(std::istringstream(table.str()) >> std::ws, header);
  CHECK(header == "landscape,y_tau,model,optima_available,adalead");

  std::ostringstream svg;
  write_cummax_svg(svg, groups[0]);
  CHECK(balanced_tags(svg.str()));
  CHECK(svg.str().find("<polyline") != std::string::npos);
}

TEST_CASE("cli run writes outputs and refuses to overwrite") {
  const auto dir = scratch("cli_run");
  write_text(dir / "config.json", base_config().dump());
  const auto out = (dir / "out").string();
  REQUIRE(cli({"run", "--config", (dir / "config.json").string(), "--out", out}) == kExitOk);
  CHECK(fs::exists(dir / "out" / "runlog.json"));
  CHECK(fs::exists(dir / "out" / "metrics.csv"));
  const auto first = slurp(dir / "out" / "runlog.json");
  CHECK(cli({"run", "--config", (dir / "config.json").string(), "--out", out}) == kExitIo);
  CHECK(cli({"run", "--config", (dir / "config.json").string(), "--out", out, "--force"}) == kExitOk);
  CHECK(slurp(dir / "out" / "runlog.json") == first);

  CHECK(cli({"run", "--config", (dir / "config.json").string(), "--out", out, "--seed", "9", "--force"}) == kExitOk);
  CHECK(slurp(dir / "out" / "runlog.json") != first);

  const auto rdir = (dir / "report").string();
  CHECK(cli({"report", out, "--out", rdir}) == kExitOk);
  CHECK(fs::exists(dir / "report" / "cummax.csv"));
  CHECK(fs::exists(dir / "report" / "optima_table.csv"));
}

TEST_CASE("cli rejects malformed configs without writing") {
  const auto dir = scratch("cli_bad");
  write_text(dir / "broken.json", "{\"schema_version\": 1, ");
  std::string err;
  CHECK(cli({"run", "--config", (dir / "broken.json").string(), "--out", (dir / "out").string()}, nullptr, &err) ==
        kExitConfig);
  CHECK_FALSE(err.empty());
  auto j = base_config();
  j["budget"]["batch_size"] = "many";
  write_text(dir / "typed.json", j.dump());
  CHECK(cli({"run", "--config", (dir / "typed.json").string(), "--out", (dir / "out").string()}) == kExitConfig);
  CHECK_FALSE(fs::exists(dir / "out"));
  CHECK(cli({"run", "--config", (dir / "missing.json").string(), "--out", (dir / "out").string()}) == kExitIo);
  CHECK(cli({"frobnicate"}) == kExitConfig);
}

TEST_CASE("cli reports an exhausted domain as a budget error") {
  const auto dir = scratch("cli_budget");
  auto j = base_config("wf_model_free");
  j["landscape"] = {{"type", "constant"}, {"length", 2}, {"alphabet", "dna"}};
  j["budget"] = {{"batch_size", 5}, {"virtual_ratio", 2}, {"rounds", 5}};
  j["thresholds"] = json::array();
  write_text(dir / "config.json", j.dump());
  CHECK(cli({"run", "--config", (dir / "config.json").string(), "--out", (dir / "out").string()}) == kExitBudget);
}

TEST_CASE("cli tour and enumerate") {
  const auto dir = scratch("cli_tour");
  auto j = base_config();
  j["landscape"]["length"] = 6;
  write_text(dir / "config.json", j.dump());
  const auto cfg = (dir / "config.json").string();
  REQUIRE(cli({"tour", "--config", cfg, "--out", (dir / "tour").string(), "--pair", "AAAAAA,AAAUUU", "--pair",
               "GGGGGG,GGGGGG", "--walks", "3"}) == kExitOk);
  std::istringstream rows(csv_body(dir / "tour" / "tour.csv"));
  std::string line;
  std::getline(rows, line);
  CHECK(line == "pair,walk,step,fitness");
  std::map<std::string, int> per_pair;
  while (std::getline(rows, line)) per_pair[line.substr(0, line.find(','))]++;
  CHECK(per_pair["0"] == 3 * 4);
  CHECK(per_pair["1"] == 3);

  REQUIRE(cli({"enumerate-optima", "--config", cfg, "--out", (dir / "opt").string(), "--y-tau", "1.5"}) == kExitOk);
  CHECK(csv_body(dir / "opt" / "optima.csv") == "sequence,fitness\n");
}
