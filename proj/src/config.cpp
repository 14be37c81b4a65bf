#include "seqsandbox/config.hpp"

#include <cmath>
#include <fstream>
#include <set>
#include <sstream>
#include <unordered_set>

#include "seqsandbox/random.hpp"
#include "seqsandbox/rna.hpp"

namespace seqsandbox {

using nlohmann::json;

namespace {

// Strict object reader: every key must be consumed or it is reported.
class Fields {
 public:
  Fields(const json& j, std::string path) : j_(j), path_(std::move(path)) {
    if (!j_.is_object()) throw ConfigError(path_ + ": expected an object");
  }

  bool has(const std::string& key) const { return j_.contains(key); }

  const json& raw(const std::string& key) {
    used_.insert(key);
    return j_.at(key);
  }

  template <class T>
  void get(const std::string& key, T& out) {
    if (!j_.contains(key)) return;
    used_.insert(key);
    const auto& v = j_.at(key);
    try {
      if constexpr (std::is_same_v<T, bool>) {
        if (!v.is_boolean()) throw ConfigError("expected a boolean");
      } else if constexpr (std::is_integral_v<T>) {
        if (!v.is_number_integer()) throw ConfigError("expected an integer");
        if (std::is_unsigned_v<T> && v.get<std::int64_t>() < 0 && !v.is_number_unsigned()) {
          throw ConfigError("expected a non-negative integer");
        }
      } else if constexpr (std::is_floating_point_v<T>) {
        if (!v.is_number()) throw ConfigError("expected a number");
      } else if constexpr (std::is_same_v<T, std::string>) {
        if (!v.is_string()) throw ConfigError("expected a string");
      }
      out = v.get<T>();
    } catch (const ConfigError& e) {
      throw ConfigError(path_ + "." + key + ": " + e.what());
    } catch (const json::exception& e) {
      throw ConfigError(path_ + "." + key + ": " + e.what());
    }
  }

  template <class T>
  void get(const std::string& key, std::optional<T>& out) {
    if (!j_.contains(key) || j_.at(key).is_null()) {
      if (j_.contains(key)) used_.insert(key);
      return;
    }
    T value{};
    get(key, value);
    out = value;
  }

  void finish() const {
    for (const auto& [key, _] : j_.items()) {
      if (!used_.count(key)) throw ConfigError(path_ + "." + key + ": unknown key");
    }
  }

  const std::string& path() const { return path_; }

 private:
  const json& j_;
  std::string path_;
  std::set<std::string> used_;
};

void require(bool ok, const std::string& field, const std::string& message) {
  if (!ok) throw ConfigError(field + ": " + message);
}

void require_in(const std::string& value, std::initializer_list<const char*> options, const std::string& field) {
  for (const char* o : options) {
    if (value == o) return;
  }
  std::string list;
  for (const char* o : options) list += (list.empty() ? "" : ", ") + std::string(o);
  throw ConfigError(field + ": '" + value + "' is not one of " + list);
}

bool unit_interval(double x) { return x >= 0.0 && x <= 1.0; }

ModelSpec parse_model(const json& j, const std::string& path) {
  Fields f(j, path);
  ModelSpec m;
  f.get("type", m.type);
  require_in(m.type, {"abstract", "null", "ridge", "knn", "ensemble"}, path + ".type");
  if (m.type == "abstract") {
    f.get("alpha", m.alpha);
    f.get("noise", m.noise);
    require(unit_interval(m.alpha), path + ".alpha", "must lie in [0, 1]");
    require_in(m.noise, {"exp_mean", "exp_rate", "empirical"}, path + ".noise");
  } else if (m.type == "ridge") {
    f.get("l2", m.l2);
    require(m.l2 > 0.0, path + ".l2", "must be positive");
  } else if (m.type == "knn") {
    f.get("k", m.k);
    f.get("bandwidth", m.bandwidth);
    require(m.k >= 1, path + ".k", "must be at least 1");
    require(m.bandwidth > 0.0, path + ".bandwidth", "must be positive");
  } else if (m.type == "ensemble") {
    f.get("weighting", m.weighting);
    f.get("bootstrap", m.bootstrap);
    require_in(m.weighting, {"adaptive", "uniform"}, path + ".weighting");
    require(f.has("members"), path + ".members", "required for an ensemble");
    const auto& members = f.raw("members");
    require(members.is_array() && !members.empty(), path + ".members", "expected a non-empty array");
    for (std::size_t i = 0; i < members.size(); ++i) {
      m.members.push_back(parse_model(members[i], path + ".members[" + std::to_string(i) + "]"));
      require(m.members.back().type != "ensemble", path + ".members", "nested ensembles are not supported");
    }
  }
  f.finish();
  return m;
}

json model_to_json(const ModelSpec& m) {
  json j = {{"type", m.type}};
  if (m.type == "abstract") {
    j["alpha"] = m.alpha;
    j["noise"] = m.noise;
  } else if (m.type == "ridge") {
    j["l2"] = m.l2;
  } else if (m.type == "knn") {
    j["k"] = m.k;
    j["bandwidth"] = m.bandwidth;
  } else if (m.type == "ensemble") {
    j["weighting"] = m.weighting;
    j["bootstrap"] = m.bootstrap;
    j["members"] = json::array();
    for (const auto& member : m.members) j["members"].push_back(model_to_json(member));
  }
  return j;
}

ExplorerSpec parse_explorer(const json& j) {
  const std::string path = "explorer";
  Fields f(j, path);
  ExplorerSpec e;
  f.get("type", e.type);
  require_in(e.type, {"adalead", "wf", "wf_model_free", "cmaes", "bo_evo", "dbas", "cbas"}, path + ".type");
  if (e.type == "adalead") {
    f.get("kappa", e.adalead.kappa);
    f.get("recombination_rate", e.adalead.recombination_rate);
    f.get("rollouts_per_parent", e.adalead.rollouts_per_parent);
    f.get("mutation_rate", e.mutation_rate);
    e.adalead.mutation_rate = e.mutation_rate;
    try {
      e.adalead.validate();
    } catch (const std::invalid_argument& err) {
      throw ConfigError(path + ": " + err.what());
    }
  } else if (e.type == "wf" || e.type == "wf_model_free") {
    f.get("mutation_rate", e.mutation_rate);
  } else if (e.type == "cmaes") {
    f.get("initial_sigma", e.cmaes.initial_sigma);
    f.get("eigenvalue_floor", e.cmaes.eigenvalue_floor);
    require(e.cmaes.initial_sigma > 0.0, path + ".initial_sigma", "must be positive");
    require(e.cmaes.eigenvalue_floor > 0.0, path + ".eigenvalue_floor", "must be positive");
  } else if (e.type == "bo_evo") {
    std::string acq = "ei";
    f.get("acquisition", acq);
    require_in(acq, {"ei", "ucb"}, path + ".acquisition");
    e.bo.acquisition = acq == "ei" ? Acquisition::kEi : Acquisition::kUcb;
    f.get("ucb_beta", e.bo.ucb_beta);
    f.get("variance_floor", e.bo.variance_floor);
    f.get("mutation_rate", e.mutation_rate);
    e.bo.mutation_rate = e.mutation_rate;
    require(e.bo.ucb_beta >= 0.0, path + ".ucb_beta", "must be non-negative");
    require(e.bo.variance_floor > 0.0, path + ".variance_floor", "must be positive");
  } else {
    e.cem.conditioned = e.type == "cbas";
    f.get("elite_fraction", e.cem.elite_fraction);
    f.get("pseudocount", e.cem.pseudocount);
    f.get("patience", e.cem.patience);
    if (e.cem.conditioned) f.get("weight_cap", e.cem.weight_cap);
    require(e.cem.elite_fraction > 0.0 && e.cem.elite_fraction <= 1.0, path + ".elite_fraction",
            "must lie in (0, 1]");
    require(e.cem.pseudocount > 0.0, path + ".pseudocount", "must be positive");
    require(e.cem.patience >= 1, path + ".patience", "must be at least 1");
    require(e.cem.weight_cap > 0.0, path + ".weight_cap", "must be positive");
  }
  if (e.mutation_rate) require(unit_interval(*e.mutation_rate), path + ".mutation_rate", "must lie in [0, 1]");
  f.finish();
  return e;
}

json explorer_to_json(const ExplorerSpec& e) {
  json j = {{"type", e.type}};
  if (e.type == "adalead") {
    j["kappa"] = e.adalead.kappa;
    j["recombination_rate"] = e.adalead.recombination_rate;
    j["rollouts_per_parent"] = e.adalead.rollouts_per_parent;
  } else if (e.type == "cmaes") {
    j["initial_sigma"] = e.cmaes.initial_sigma;
    j["eigenvalue_floor"] = e.cmaes.eigenvalue_floor;
  } else if (e.type == "bo_evo") {
    j["acquisition"] = e.bo.acquisition == Acquisition::kEi ? "ei" : "ucb";
    j["ucb_beta"] = e.bo.ucb_beta;
    j["variance_floor"] = e.bo.variance_floor;
  } else if (e.type == "dbas" || e.type == "cbas") {
    j["elite_fraction"] = e.cem.elite_fraction;
    j["pseudocount"] = e.cem.pseudocount;
    j["patience"] = e.cem.patience;
    if (e.cem.conditioned) j["weight_cap"] = e.cem.weight_cap;
  }
  if (e.type != "cmaes" && e.type != "dbas" && e.type != "cbas") {
    j["mutation_rate"] = e.mutation_rate ? json(*e.mutation_rate) : json(nullptr);
  }
  return j;
}

std::string format_number(double x) {
  std::ostringstream s;
  s.precision(12);
  s << x;
  return s.str();
}

}  // namespace

std::string Threshold::label() const { return (inclusive ? "=" : "") + format_number(value); }

Threshold parse_threshold(const json& j) {
  Threshold t;
  if (j.is_number()) {
    t.value = j.get<double>();
    return t;
  }
  if (!j.is_string()) throw ConfigError("thresholds: expected a number or a string such as \"=1\"");
  std::string s = j.get<std::string>();
  if (s.rfind(">=", 0) == 0) {
    t.inclusive = true;
    s = s.substr(2);
  } else if (s.rfind("=", 0) == 0) {
    t.inclusive = true;
    s = s.substr(1);
  } else if (s.rfind(">", 0) == 0) {
    s = s.substr(1);
  }
  try {
    std::size_t used = 0;
    t.value = std::stod(s, &used);
    if (used != s.size()) throw std::invalid_argument("trailing characters");
  } catch (const std::exception&) {
    throw ConfigError("thresholds: cannot parse '" + j.get<std::string>() + "'");
  }
  return t;
}

LandscapeSpec parse_landscape_spec(const json& j) {
  const std::string path = "landscape";
  Fields f(j, path);
  LandscapeSpec l;
  f.get("type", l.type);
  require_in(l.type, {"rna", "tf", "tf_synth", "constant", "additive"}, path + ".type");
  f.get("length", l.length);
  f.get("alphabet", l.alphabet);
  f.get("swampland", l.swampland);
  if (l.swampland) f.get("wildtype", l.wildtype);
  if (l.type != "tf" && l.type != "constant") f.get("seed", l.seed);
  if (l.type == "rna") {
    f.get("targets", l.targets);
    f.get("target_length", l.target_length);
    require(l.targets >= 1, path + ".targets", "must be at least 1");
  } else if (l.type == "tf") {
    f.get("path", l.path);
    require(!l.path.empty(), path + ".path", "required for a tf landscape");
  } else if (l.type == "constant") {
    f.get("value", l.value);
    require(unit_interval(l.value), path + ".value", "must lie in [0, 1]");
  }
  if (!l.alphabet.empty()) {
    try {
      Alphabet::from_name(l.alphabet);
    } catch (const std::exception& e) {
      throw ConfigError(path + ".alphabet: " + e.what());
    }
    require(l.type == "constant" || l.type == "additive" || l.alphabet == (l.type == "rna" ? "rna" : "dna"),
            path + ".alphabet", "fixed by the landscape type");
  }
  f.finish();
  return l;
}

json to_json(const LandscapeSpec& l) {
  json j = {{"type", l.type}, {"length", l.length}};
  if (!l.alphabet.empty()) j["alphabet"] = l.alphabet;
  if (l.type != "tf" && l.type != "constant") j["seed"] = l.seed;
  if (l.type == "rna") {
    j["targets"] = l.targets;
    j["target_length"] = l.target_length;
  } else if (l.type == "tf") {
    j["path"] = l.path;
  } else if (l.type == "constant") {
    j["value"] = l.value;
  }
  j["swampland"] = l.swampland;
  if (l.swampland) j["wildtype"] = l.wildtype;
  return j;
}

RunConfig parse_config(const json& j) {
  Fields f(j, "config");
  RunConfig c;
  require(f.has("schema_version"), "config.schema_version", "required");
  f.get("schema_version", c.schema_version);
  require(c.schema_version == kSchemaVersion, "config.schema_version",
          "unsupported version " + std::to_string(c.schema_version));
  f.get("name", c.name);
  require(!c.name.empty(), "config.name", "must not be empty");
  require(f.has("landscape"), "config.landscape", "required");
  c.landscape = parse_landscape_spec(f.raw("landscape"));
  if (f.has("model")) c.model = parse_model(f.raw("model"), "model");
  if (f.has("explorer")) c.explorer = parse_explorer(f.raw("explorer"));
  if (f.has("budget")) {
    Fields b(f.raw("budget"), "budget");
    b.get("batch_size", c.budget.batch_size);
    b.get("virtual_ratio", c.budget.virtual_ratio);
    b.get("rounds", c.budget.rounds);
    b.finish();
    try {
      c.budget.validate();
    } catch (const std::invalid_argument& e) {
      throw ConfigError(std::string("budget: ") + e.what());
    }
  }
  if (f.has("start")) {
    Fields s(f.raw("start"), "start");
    s.get("sequences", c.start_sequences);
    s.get("random", c.random_starts);
    s.get("seed", c.start_seed);
    s.finish();
  }
  if (f.has("seeds")) {
    const auto& seeds = f.raw("seeds");
    require(seeds.is_array() && !seeds.empty(), "config.seeds", "expected a non-empty array");
    c.seeds.clear();
    for (const auto& s : seeds) {
      require(s.is_number_unsigned(), "config.seeds", "expected non-negative integers");
      c.seeds.push_back(s.get<std::uint64_t>());
    }
    require(std::set<std::uint64_t>(c.seeds.begin(), c.seeds.end()).size() == c.seeds.size(), "config.seeds",
            "seeds must be distinct");
  }
  if (f.has("thresholds")) {
    const auto& ts = f.raw("thresholds");
    require(ts.is_array(), "config.thresholds", "expected an array");
    for (const auto& t : ts) c.thresholds.push_back(parse_threshold(t));
  }
  f.get("optima", c.optima);
  require_in(c.optima, {"auto", "always", "never"}, "config.optima");
  if (f.has("alphas")) {
    const auto& as = f.raw("alphas");
    require(as.is_array(), "config.alphas", "expected an array");
    for (const auto& a : as) {
      require(a.is_number() && unit_interval(a.get<double>()), "config.alphas", "entries must lie in [0, 1]");
      c.alphas.push_back(a.get<double>());
    }
  }
  f.finish();
  return c;
}

RunConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open config " + path.string());
  json j;
  try {
    j = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError(path.string() + ": " + e.what());
  }
  return parse_config(j);
}

json RunConfig::to_json() const {
  json j;
  j["schema_version"] = schema_version;
  j["name"] = name;
  j["landscape"] = seqsandbox::to_json(landscape);
  j["model"] = model_to_json(model);
  j["explorer"] = explorer_to_json(explorer);
  j["budget"] = {{"batch_size", budget.batch_size},
                 {"virtual_ratio", budget.virtual_ratio},
                 {"rounds", budget.rounds}};
  j["start"] = {{"sequences", start_sequences}, {"random", random_starts}, {"seed", start_seed}};
  j["seeds"] = seeds;
  j["thresholds"] = json::array();
  for (const auto& t : thresholds) {
    if (t.inclusive) {
      j["thresholds"].push_back("=" + format_number(t.value));
    } else {
      j["thresholds"].push_back(t.value);
    }
  }
  j["optima"] = optima;
  j["alphas"] = alphas;
  return j;
}

LandscapePtr build_landscape(const LandscapeSpec& spec) {
  LandscapePtr base;
  auto alphabet = [&](const char* fallback) { return Alphabet::from_name(spec.alphabet.empty() ? fallback : spec.alphabet); };
  try {
    if (spec.type == "rna") {
      const auto length = spec.length ? spec.length : 14;
      const auto target_length = spec.target_length ? spec.target_length : std::min<std::size_t>(100, std::max<std::size_t>(length, 50));
      base = make_rna_landscape(length, spec.targets, target_length, spec.seed);
    } else if (spec.type == "tf") {
      if (!std::filesystem::exists(spec.path)) throw IoError("landscape.path: no such file " + spec.path);
      base = load_tf_landscape(spec.path);
      require(spec.length == 0 || spec.length == base->length(), "landscape.length",
              "table has length " + std::to_string(base->length()));
    } else if (spec.type == "tf_synth") {
      base = synth_tf_landscape(spec.seed, spec.length ? spec.length : 8);
    } else if (spec.type == "constant") {
      base = std::make_shared<ConstantLandscape>(spec.length ? spec.length : 8, alphabet("dna"), spec.value);
    } else if (spec.type == "additive") {
      base = std::make_shared<AdditiveLandscape>(spec.length ? spec.length : 8, alphabet("dna"), spec.seed);
    } else {
      throw ConfigError("landscape.type: unknown type " + spec.type);
    }
    if (!spec.swampland) return base;
    Sequence wildtype;
    if (spec.wildtype.empty()) {
      Rng rng = make_rng(spec.seed, 0x3a1d);
      wildtype = random_sequence(base->length(), base->alphabet(), rng);
    } else {
      wildtype = Sequence::parse(spec.wildtype, base->alphabet());
    }
    return std::make_shared<SwamplandLandscape>(base, wildtype);
  } catch (const ConfigError&) {
    throw;
  } catch (const IoError&) {
    throw;
  } catch (const std::exception& e) {
    throw ConfigError(std::string("landscape: ") + e.what());
  }
}

ModelPtr build_model(const ModelSpec& spec, const LandscapePtr& landscape, std::uint64_t seed) {
  if (spec.type == "abstract") {
    const auto source = spec.noise == "exp_rate"    ? NoiseSource::kExponentialRate
                        : spec.noise == "empirical" ? NoiseSource::kEmpiricalMutants
                                                    : NoiseSource::kExponentialMean;
    return std::make_unique<NoisyAbstractModel>(landscape, spec.alpha, seed, source);
  }
  if (spec.type == "null") return std::make_unique<NullModel>(seed);
  if (spec.type == "ridge") return std::make_unique<RidgeModel>(spec.l2);
  if (spec.type == "knn") return std::make_unique<KnnModel>(spec.k, spec.bandwidth);
  if (spec.type == "ensemble") {
    std::vector<ModelPtr> members;
    for (std::size_t i = 0; i < spec.members.size(); ++i) {
      members.push_back(build_model(spec.members[i], landscape, derive_seed(seed, i + 1)));
    }
    const auto weighting = spec.weighting == "uniform" ? EnsembleWeighting::kUniform : EnsembleWeighting::kAdaptive;
    return std::make_unique<AdaptiveEnsemble>(std::move(members), weighting, spec.bootstrap, seed);
  }
  throw ConfigError("model.type: unknown type " + spec.type);
}

ExplorerPtr build_explorer(const ExplorerSpec& spec) {
  if (spec.type == "adalead") return std::make_unique<AdaLeadExplorer>(spec.adalead);
  if (spec.type == "wf") return std::make_unique<WrightFisherExplorer>(true, spec.mutation_rate);
  if (spec.type == "wf_model_free") return std::make_unique<WrightFisherExplorer>(false, spec.mutation_rate);
  if (spec.type == "cmaes") return std::make_unique<CmaesExplorer>(spec.cmaes);
  if (spec.type == "bo_evo") return std::make_unique<BoEvoExplorer>(spec.bo);
  if (spec.type == "dbas" || spec.type == "cbas") return std::make_unique<CemExplorer>(spec.cem);
  throw ConfigError("explorer.type: unknown type " + spec.type);
}

std::vector<Sequence> starting_sequences(const RunConfig& config, const Landscape& landscape) {
  std::vector<Sequence> out;
  std::unordered_set<Sequence, SequenceHash> seen;
  for (std::size_t i = 0; i < config.start_sequences.size(); ++i) {
    const std::string field = "start.sequences[" + std::to_string(i) + "]";
    Sequence x;
    try {
      x = Sequence::parse(config.start_sequences[i], landscape.alphabet());
    } catch (const std::exception& e) {
      throw ConfigError(field + ": " + e.what());
    }
    require(x.size() == landscape.length(), field,
            "length " + std::to_string(x.size()) + " differs from landscape length " +
                std::to_string(landscape.length()));
    require(seen.insert(x).second, field, "duplicate starting sequence");
    out.push_back(std::move(x));
  }
  std::size_t random = config.random_starts;
  if (out.empty() && random == 0) {
    if (const auto* swamp = dynamic_cast<const SwamplandLandscape*>(&landscape)) {
      out.push_back(swamp->wildtype());
      seen.insert(out.back());
    } else {
      random = 1;
    }
  }
  require(out.size() + random <= landscape.domain_size(), "start.random", "exceeds the sequence domain");
  Rng rng = make_rng(config.start_seed, 0x57a7);
  while (random > 0) {
    auto x = random_sequence(landscape.length(), landscape.alphabet(), rng);
    if (!seen.insert(x).second) continue;
    out.push_back(std::move(x));
    --random;
  }
  require(out.size() <= config.budget.batch_size, "start", "more starting sequences than the batch size");
  return out;
}

}  // namespace seqsandbox
