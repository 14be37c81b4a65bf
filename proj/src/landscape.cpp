#include "seqsandbox/landscape.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>
#include <unordered_map>

#include "seqsandbox/random.hpp"

namespace seqsandbox {

Landscape::Landscape(std::string name, std::size_t length, std::shared_ptr<const Alphabet> alphabet)
    : name_(std::move(name)), length_(length), alphabet_(std::move(alphabet)) {
  if (!alphabet_) throw LandscapeError("landscape without alphabet");
  if (length_ == 0) throw LandscapeError("landscape length must be positive");
}

std::uint64_t Landscape::domain_size() const {
  std::uint64_t n = 1;
  const std::uint64_t a = alphabet_->size();
  for (std::size_t i = 0; i < length_; ++i) {
    if (n > std::numeric_limits<std::uint64_t>::max() / a) return std::numeric_limits<std::uint64_t>::max();
    n *= a;
  }
  return n;
}

std::vector<double> Landscape::tabulate() const {
  const auto n = domain_size();
  std::vector<double> values(n);
  for (std::uint64_t i = 0; i < n; ++i) values[i] = evaluate(Sequence::from_index(i, length_, alphabet_));
  return values;
}

void Landscape::check_input(const Sequence& x) const {
  if (x.size() != length_) throw SequenceError("sequence length does not match landscape");
  if (!(x.alphabet() == *alphabet_)) throw SequenceError("sequence alphabet does not match landscape");
}

// ---------------------------------------------------------------------------

TableLandscape::TableLandscape(std::string name, std::size_t length, std::shared_ptr<const Alphabet> alphabet,
                               std::vector<double> raw_values, std::string source)
    : Landscape(std::move(name), length, std::move(alphabet)), values_(std::move(raw_values)), source_(std::move(source)) {
  if (values_.size() != domain_size()) throw LandscapeError("table does not cover the full sequence domain");
  const auto [lo, hi] = std::minmax_element(values_.begin(), values_.end());
  const double min = *lo;
  const double span = *hi - *lo;
  if (!(span > 0.0)) throw LandscapeError("constant table cannot be rescaled to [0, 1]");
  for (auto& v : values_) v = (v - min) / span;
}

double TableLandscape::evaluate(const Sequence& x) const {
  check_input(x);
  return values_[x.to_index()];
}

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\r')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

bool parse_double(std::string_view text, double& out) {
  text = trim(text);
  if (text.empty()) return false;
  // std::from_chars for double is available from GCC 11.
  const auto* end = text.data() + text.size();
  auto [ptr, ec] = std::from_chars(text.data(), end, out);
  return ec == std::errc() && ptr == end && std::isfinite(out);
}

}  // namespace

std::shared_ptr<TableLandscape> load_tf_landscape(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw LandscapeError("cannot open TF table " + path.string());
  const auto dna = Alphabet::dna();
  std::unordered_map<std::uint64_t, double> rows;
  std::size_t length = 0;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    std::string_view view = trim(line);
    if (view.empty() || view.front() == '#') continue;
    const auto sep = view.find_first_of("\t,");
    if (sep == std::string_view::npos) throw LandscapeError("line " + std::to_string(line_no) + ": expected two columns");
    const auto seq_text = trim(view.substr(0, sep));
    const auto value_text = view.substr(sep + 1);
    double value = 0.0;
    if (!parse_double(value_text, value)) {
      if (rows.empty() && length == 0 && seq_text == "sequence") continue;  // header
      throw LandscapeError("line " + std::to_string(line_no) + ": non-numeric affinity '" + std::string(value_text) + "'");
    }
    Sequence seq;
    try {
      seq = Sequence::parse(seq_text, dna);
    } catch (const SequenceError& e) {
      throw LandscapeError("line " + std::to_string(line_no) + ": " + e.what());
    }
    if (length == 0) {
      length = seq.size();
      if (length == 0 || length > 16) throw LandscapeError("TF sequences must have length 1..16");
    } else if (seq.size() != length) {
      throw LandscapeError("line " + std::to_string(line_no) + ": mixed sequence lengths");
    }
    if (!rows.emplace(seq.to_index(), value).second) {
      throw LandscapeError("line " + std::to_string(line_no) + ": duplicate sequence " + seq.str());
    }
  }
  if (rows.empty()) throw LandscapeError("TF table is empty");
  const std::uint64_t domain = std::uint64_t{1} << (2 * length);
  if (rows.size() != domain) {
    throw LandscapeError("TF table covers " + std::to_string(rows.size()) + " of " + std::to_string(domain) + " sequences");
  }
  std::vector<double> values(domain);
  for (const auto& [index, value] : rows) values[index] = value;
  return std::make_shared<TableLandscape>("tf:" + path.filename().string(), length, dna, std::move(values), path.string());
}

std::shared_ptr<TableLandscape> synth_tf_landscape(std::uint64_t seed, std::size_t length) {
  if (length == 0 || length > 13) throw LandscapeError("synthetic TF landscape length must be in 1..13 to enumerate");
  const auto dna = Alphabet::dna();
  Rng rng = make_rng(seed, 0x7f);
  std::uniform_int_distribution<int> motif_count(3, 5);
  const std::size_t max_width = std::min<std::size_t>(6, length);
  const std::size_t min_width = std::min<std::size_t>(4, max_width);
  std::uniform_int_distribution<std::size_t> width_dist(min_width, max_width);
  std::normal_distribution<double> weight(0.0, 1.0);
  std::uniform_real_distribution<double> height(0.7, 1.0);

  struct Motif {
    std::vector<std::array<double, 4>> weights;
  };
  std::vector<Motif> motifs(static_cast<std::size_t>(motif_count(rng)));
  for (auto& m : motifs) {
    m.weights.resize(width_dist(rng));
    double best = 0.0;
    double worst = 0.0;
    for (auto& column : m.weights) {
      for (auto& w : column) w = weight(rng);
      best += *std::max_element(column.begin(), column.end());
      worst += *std::min_element(column.begin(), column.end());
    }
    // Rescale each motif so its best site scores `h` and its worst scores 0.
    const double h = height(rng);
    const double per_column_shift = worst / static_cast<double>(m.weights.size());
    for (auto& column : m.weights) {
      for (auto& w : column) w = (w - per_column_shift) * h / (best - worst);
    }
  }

  // Soft maximum over all motif placements; every position influences some
  // placement, so neighboring sequences essentially never tie.
  constexpr double kSharpness = 12.0;
  const std::uint64_t domain = std::uint64_t{1} << (2 * length);
  std::vector<double> values(domain);
  std::vector<std::uint8_t> symbols(length);
  for (std::uint64_t index = 0; index < domain; ++index) {
    std::uint64_t rest = index;
    for (std::size_t p = length; p-- > 0;) {
      symbols[p] = static_cast<std::uint8_t>(rest & 3U);
      rest >>= 2;
    }
    double acc = 0.0;
    for (const auto& m : motifs) {
      const auto w = m.weights.size();
      for (std::size_t offset = 0; offset + w <= length; ++offset) {
        double s = 0.0;
        for (std::size_t j = 0; j < w; ++j) s += m.weights[j][symbols[offset + j]];
        acc += std::exp(kSharpness * s);
      }
    }
    values[index] = std::log(acc) / kSharpness;
  }
  return std::make_shared<TableLandscape>("tf_synth:" + std::to_string(seed), length, dna, std::move(values),
                                          "synthetic seed " + std::to_string(seed));
}

void write_tf_table(std::ostream& out, const Landscape& landscape) {
  const auto values = landscape.tabulate();
  out << "sequence\taffinity\n";
  out.precision(17);
  for (std::uint64_t i = 0; i < values.size(); ++i) {
    out << Sequence::from_index(i, landscape.length(), landscape.alphabet()).str() << '\t' << values[i] << '\n';
  }
}

// ---------------------------------------------------------------------------

ConstantLandscape::ConstantLandscape(std::size_t length, std::shared_ptr<const Alphabet> alphabet, double value)
    : Landscape("constant", length, std::move(alphabet)), value_(value) {
  if (value < 0.0 || value > 1.0) throw LandscapeError("constant fitness must lie in [0, 1]");
}

double ConstantLandscape::evaluate(const Sequence& x) const {
  check_input(x);
  return value_;
}

AdditiveLandscape::AdditiveLandscape(std::size_t length, std::shared_ptr<const Alphabet> alphabet, std::uint64_t seed)
    : Landscape("additive:" + std::to_string(seed), length, alphabet) {
  Rng rng = make_rng(seed, 0xadd);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  weights_.assign(length, std::vector<double>(alphabet->size()));
  double lo = 0.0;
  double hi = 0.0;
  for (auto& column : weights_) {
    for (auto& w : column) w = u(rng);
    lo += *std::min_element(column.begin(), column.end());
    hi += *std::max_element(column.begin(), column.end());
  }
  offset_ = lo;
  scale_ = hi - lo;
}

double AdditiveLandscape::evaluate(const Sequence& x) const {
  check_input(x);
  double s = 0.0;
  for (std::size_t p = 0; p < x.size(); ++p) s += weights_[p][x[p]];
  return std::clamp((s - offset_) / scale_, 0.0, 1.0);
}

}  // namespace seqsandbox
