#include "seqsandbox/cli.hpp"

#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <ostream>
#include <sstream>

#include "CLI11.hpp"
#include "seqsandbox/harness.hpp"
#include "seqsandbox/random.hpp"
#include "seqsandbox/report.hpp"

namespace seqsandbox {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

// Files are assembled in memory and written only once every command step has
// succeeded, so a failing command leaves no partial outputs behind.
class OutputPlan {
 public:
  explicit OutputPlan(fs::path dir) : dir_(std::move(dir)) {}

  void add(const fs::path& relative, std::string content) { files_[relative] = std::move(content); }

  void commit(bool force) const {
    for (const auto& [rel, _] : files_) {
      const auto path = dir_ / rel;
      if (fs::exists(path) && !force) {
        throw IoError(path.string() + " already exists; pass --force to overwrite");
      }
    }
    std::error_code ec;
    for (const auto& [rel, content] : files_) {
      const auto path = dir_ / rel;
      fs::create_directories(path.parent_path(), ec);
      if (ec) throw IoError("cannot create " + path.parent_path().string() + ": " + ec.message());
      const auto tmp = path.string() + ".tmp";
      {
        std::ofstream f(tmp, std::ios::binary | std::ios::trunc);
        if (!f) throw IoError("cannot write " + tmp);
        f << content;
        if (!f.flush()) throw IoError("cannot write " + tmp);
      }
      fs::rename(tmp, path, ec);
      if (ec) throw IoError("cannot move " + tmp + " into place: " + ec.message());
    }
  }

  const fs::path& dir() const { return dir_; }

 private:
  fs::path dir_;
  std::map<fs::path, std::string> files_;
};

fs::path default_root() {
  const char* env = std::getenv(kOutputRootEnv);
  return env && *env ? fs::path(env) : fs::path("results");
}

fs::path resolve_out(const std::string& out, const std::string& name, const std::string& command) {
  if (!out.empty()) return out;
  return default_root() / name / command;
}

RunConfig load_with_overrides(const std::string& path, const std::optional<std::uint64_t>& seed) {
  auto config = load_config(path);
  if (seed) config.seeds = {*seed};
  return config;
}

std::string summarize(const RunLog& log) {
  std::ostringstream s;
  double wall = 0.0;
  for (const auto& r : log.rounds) wall += r.wall_seconds;
  s << "seed " << log.seed << ": landscape " << log.landscape_name << ", explorer " << explorer_key(log) << ", model "
    << model_key(log) << "\n";
  s << "  final cummax " << log.final_value("cummax") << " after " << log.rounds.size() - 1 << " rounds\n";
  for (const auto& m : log.metrics) {
    if (m.name.rfind("count_above_", 0) == 0 || m.name.rfind("optima_found_", 0) == 0) {
      s << "  " << m.name << " " << m.values.back() << "\n";
    }
  }
  s << "  oracle queries " << log.oracle_queries_total() << " (" << log.oracle_queries_total() - log.rounds.front().oracle_queries
    << " after round 0), model queries " << log.model_queries_total() << ", wall " << wall << " s\n";
  return s.str();
}

struct CommonOptions {
  std::string config;
  std::string out;
  std::optional<std::uint64_t> seed;
  std::size_t jobs = 1;
  bool force = false;
};

void add_common(CLI::App* cmd, CommonOptions& o, bool needs_config = true) {
  auto* c = cmd->add_option("--config", o.config, "run configuration (JSON)");
  if (needs_config) c->required();
  cmd->add_option("--out", o.out, std::string("output directory (default: $") + kOutputRootEnv + "/<name>/<command>)");
  cmd->add_option("--seed", o.seed, "replace the configured seeds with this one");
  cmd->add_option("--jobs", o.jobs, "worker threads")->check(CLI::PositiveNumber);
  cmd->add_flag("--force", o.force, "overwrite existing outputs");
}

int cmd_run(const CommonOptions& o, std::ostream& out) {
  const auto config = load_with_overrides(o.config, o.seed);
  const auto context = prepare_landscape(config);
  std::vector<RunLog> logs(config.seeds.size());
  parallel_for(logs.size(), o.jobs, [&](std::size_t i) { logs[i] = run_experiment(config, config.seeds[i], context); });

  OutputPlan plan(resolve_out(o.out, config.name, "run"));
  std::string summary;
  for (const auto& log : logs) {
    const fs::path sub = logs.size() == 1 ? fs::path() : fs::path("seed-" + std::to_string(log.seed));
    plan.add(sub / "runlog.json", runlog_to_json(log).dump(1) + "\n");
    std::ostringstream metrics;
    write_metrics_csv(metrics, log);
    plan.add(sub / "metrics.csv", metrics.str());
    summary += summarize(log);
  }
  plan.add("summary.txt", summary);
  plan.commit(o.force);
  out << summary << "outputs in " << plan.dir().string() << "\n";
  return kExitOk;
}

int cmd_sweep(const CommonOptions& o, std::vector<double> alphas, std::ostream& out) {
  const auto config = load_with_overrides(o.config, o.seed);
  if (alphas.empty()) alphas = config.alphas;
  const auto rows = sweep_alpha(config, alphas, o.jobs);
  std::ostringstream csv;
  write_sweep_csv(csv, config, rows);
  OutputPlan plan(resolve_out(o.out, config.name, "sweep"));
  plan.add("sweep.csv", csv.str());
  plan.commit(o.force);
  std::map<double, std::vector<double>> by_alpha;
  for (const auto& r : rows) by_alpha[r.alpha].push_back(r.final_cummax);
  for (const auto& [a, v] : by_alpha) out << "alpha " << a << ": final cummax " << format_mean_sd(mean_sd(v)) << "\n";
  out << "outputs in " << plan.dir().string() << "\n";
  return kExitOk;
}

int cmd_enumerate(const CommonOptions& o, const std::vector<std::string>& y_taus, std::ostream& out) {
  auto config = load_with_overrides(o.config, o.seed);
  if (!y_taus.empty()) {
    config.thresholds.clear();
    for (const auto& y : y_taus) {
      json j;
      try {
        j = json::parse(y);
      } catch (const json::exception&) {
        j = y;
      }
      config.thresholds.push_back(parse_threshold(j));
    }
  }
  const auto landscape = build_landscape(config.landscape);
  if (!landscape->enumerable()) {
    throw ConfigError("landscape: domain of " + std::to_string(landscape->domain_size()) +
                      " sequences exceeds the enumeration cap");
  }
  const auto all = enumerate_local_optima(*landscape, -1.0);

  LocalOptimaSet listed;
  listed.threshold = -1.0;
  for (const auto& opt : all.optima) {
    const bool keep = config.thresholds.empty() ||
                      std::any_of(config.thresholds.begin(), config.thresholds.end(),
                                  [&](const Threshold& t) { return t.passes(opt.fitness); });
    if (keep) listed.optima.push_back(opt);
  }
  std::ostringstream csv, counts;
  csv << "# config: " << config.to_json().dump() << "\n";
  write_optima_csv(csv, listed);
  counts << "# config: " << config.to_json().dump() << "\n";
  counts << "y_tau,count\n";
  out << landscape->name() << ": " << all.size() << " strict local optima\n";
  for (const auto& t : config.thresholds) {
    std::size_t n = 0;
    for (const auto& opt : all.optima) n += t.passes(opt.fitness) ? 1 : 0;
    counts << t.label() << ',' << n << '\n';
    out << "  y_tau " << t.label() << ": " << n << "\n";
  }
  OutputPlan plan(resolve_out(o.out, config.name, "optima"));
  plan.add("optima.csv", csv.str());
  plan.add("optima_counts.csv", counts.str());
  plan.commit(o.force);
  out << "outputs in " << plan.dir().string() << "\n";
  return kExitOk;
}

int cmd_tour(const CommonOptions& o, const std::vector<std::string>& pairs, std::size_t walks, std::ostream& out) {
  const auto config = load_with_overrides(o.config, o.seed);
  const auto landscape = build_landscape(config.landscape);
  if (pairs.empty()) throw ConfigError("tour: at least one --pair FROM,TO is required");
  std::vector<std::pair<Sequence, Sequence>> endpoints;
  for (const auto& p : pairs) {
    const auto comma = p.find(',');
    if (comma == std::string::npos) throw ConfigError("--pair " + p + ": expected FROM,TO");
    try {
      auto a = Sequence::parse(p.substr(0, comma), landscape->alphabet());
      auto b = Sequence::parse(p.substr(comma + 1), landscape->alphabet());
      if (a.size() != landscape->length() || b.size() != landscape->length()) {
        throw ConfigError("--pair " + p + ": endpoints must have length " + std::to_string(landscape->length()));
      }
      endpoints.emplace_back(std::move(a), std::move(b));
    } catch (const SequenceError& e) {
      throw ConfigError("--pair " + p + ": " + e.what());
    }
  }
  Rng rng = make_rng(config.seeds.front(), 0x70a);
  std::ostringstream csv;
  csv << "# config: " << config.to_json().dump() << "\n";
  csv << "pair,walk,step,fitness\n";
  char buf[32];
  for (std::size_t i = 0; i < endpoints.size(); ++i) {
    const auto profiles = path_tour(*landscape, endpoints[i].first, endpoints[i].second, walks, rng);
    for (std::size_t w = 0; w < profiles.size(); ++w) {
      for (std::size_t s = 0; s < profiles[w].size(); ++s) {
        std::snprintf(buf, sizeof buf, "%.17g", profiles[w][s]);
        csv << i << ',' << w << ',' << s << ',' << buf << '\n';
      }
    }
  }
  OutputPlan plan(resolve_out(o.out, config.name, "tour"));
  plan.add("tour.csv", csv.str());
  plan.commit(o.force);
  out << endpoints.size() << " pair(s), " << walks << " walk(s) each; outputs in " << plan.dir().string() << "\n";
  return kExitOk;
}

std::vector<fs::path> collect_logs(const std::vector<std::string>& inputs) {
  std::vector<fs::path> out;
  for (const auto& in : inputs) {
    const fs::path p(in);
    if (fs::is_directory(p)) {
      std::vector<fs::path> found;
      for (const auto& e : fs::recursive_directory_iterator(p)) {
        if (e.is_regular_file() && e.path().filename() == "runlog.json") found.push_back(e.path());
      }
      std::sort(found.begin(), found.end());
      out.insert(out.end(), found.begin(), found.end());
    } else if (fs::is_regular_file(p)) {
      out.push_back(p);
    } else {
      throw IoError("no such run log or directory: " + in);
    }
  }
  if (out.empty()) throw IoError("no run logs found");
  return out;
}

std::string slug(const std::string& s) {
  std::string out;
  for (char c : s) out += std::isalnum(static_cast<unsigned char>(c)) ? c : '_';
  return out;
}

int cmd_report(const std::string& out_dir, bool force, const std::vector<std::string>& inputs, std::ostream& out,
               std::ostream& err) {
  const auto paths = collect_logs(inputs);
  std::vector<RunLog> logs;
  for (const auto& p : paths) {
    std::ifstream f(p);
    if (!f) throw IoError("cannot read " + p.string());
    json j;
    try {
      j = json::parse(f);
    } catch (const json::exception& e) {
      throw ConfigError(p.string() + ": " + e.what());
    }
    logs.push_back(runlog_from_json(j));
  }
  const auto groups = group_by_landscape(logs);
  if (groups.size() > 1) {
    err << "warning: logs cover " << groups.size() << " landscapes; they are reported as separate groups\n";
  }
  std::string header = "# logs:";
  for (const auto& p : paths) header += " " + p.string();
  header += "\n";
  std::ostringstream cummax, table;
  cummax << header;
  write_cummax_csv(cummax, groups);
  table << header;
  write_optima_table(table, groups);
  OutputPlan plan(out_dir.empty() ? default_root() / "report" : fs::path(out_dir));
  plan.add("cummax.csv", cummax.str());
  plan.add("optima_table.csv", table.str());
  for (const auto& g : groups) {
    std::ostringstream svg;
    write_cummax_svg(svg, g);
    plan.add("cummax_" + slug(g.landscape) + ".svg", svg.str());
  }
  plan.commit(force);
  out << logs.size() << " log(s), " << groups.size() << " landscape group(s); outputs in " << plan.dir().string()
      << "\n";
  return kExitOk;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Sequence design exploration sandbox", "seqsandbox"};
  app.require_subcommand(1);

  CommonOptions run_o, sweep_o, enum_o, tour_o;
  auto* run = app.add_subcommand("run", "run an experiment for each configured seed");
  add_common(run, run_o);

  auto* sweep = app.add_subcommand("sweep", "sweep the abstract model's alpha over a grid");
  add_common(sweep, sweep_o);
  std::vector<double> alphas;
  sweep->add_option("--alphas", alphas, "alpha grid, comma separated (default: config alphas)")->delimiter(',');

  auto* enumerate = app.add_subcommand("enumerate-optima", "list the strict local optima of a landscape");
  add_common(enumerate, enum_o);
  std::vector<std::string> y_taus;
  enumerate->add_option("--y-tau", y_taus, "threshold(s); a leading '=' counts fitness >= value")->delimiter(';');

  auto* tour = app.add_subcommand("tour", "fitness along random shortest mutational paths");
  add_common(tour, tour_o);
  std::vector<std::string> pairs;
  std::size_t walks = 10;
  tour->add_option("--pair", pairs, "endpoint pair FROM,TO (repeatable)")->required();
  tour->add_option("--walks", walks, "walks per pair")->check(CLI::PositiveNumber);

  auto* report = app.add_subcommand("report", "aggregate run logs into tables and charts");
  std::string report_out;
  bool report_force = false;
  std::vector<std::string> inputs;
  report->add_option("logs", inputs, "runlog.json files or directories containing them")->required();
  report->add_option("--out", report_out, "output directory");
  report->add_flag("--force", report_force, "overwrite existing outputs");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    app.exit(e, out, err);
    return kExitConfig;
  }

  try {
    if (*run) return cmd_run(run_o, out);
    if (*sweep) return cmd_sweep(sweep_o, alphas, out);
    if (*enumerate) return cmd_enumerate(enum_o, y_taus, out);
    if (*tour) return cmd_tour(tour_o, pairs, walks, out);
    if (*report) return cmd_report(report_out, report_force, inputs, out, err);
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const BudgetViolation& e) {
    err << "budget violation: " << e.what() << "\n";
    return kExitBudget;
  } catch (const ContractViolation& e) {
    err << "contract violation: " << e.what() << "\n";
    return kExitBudget;
  } catch (const IoError& e) {
    err << "i/o error: " << e.what() << "\n";
    return kExitIo;
  } catch (const fs::filesystem_error& e) {
    err << "i/o error: " << e.what() << "\n";
    return kExitIo;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitFailure;
  }
  return kExitFailure;
}

}  // namespace seqsandbox
