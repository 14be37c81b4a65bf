#include "seqsandbox/rna.hpp"

#include <algorithm>
#include <cmath>

#include "seqsandbox/random.hpp"

namespace seqsandbox {

namespace {

// Symbol order ACGU.
constexpr int kPairTable[4][4] = {
    // A   C   G   U
    {-2, -2, -2, 2},   // A
    {-2, -2, 3, -2},   // C
    {-2, 3, -2, 1},    // G
    {2, -2, 1, -2},    // U
};

void require_rna(const Sequence& s) {
  if (s.alphabet().kind() != AlphabetKind::kRna) throw SequenceError("duplex scoring needs RNA sequences");
}

// One row of the local alignment recurrence; `prev` and `next` hold T+1 cells.
inline int advance_row(const int* prev, int* next, std::uint8_t symbol, const std::uint8_t* reversed, std::size_t n) {
  int best = 0;
  next[0] = 0;
  const int* pair_row = kPairTable[symbol];
  for (std::size_t j = 1; j <= n; ++j) {
    int h = prev[j - 1] + pair_row[reversed[j - 1]];
    h = std::max(h, prev[j] - kDuplexGapPenalty);
    h = std::max(h, next[j - 1] - kDuplexGapPenalty);
    h = std::max(h, 0);
    next[j] = h;
    best = std::max(best, h);
  }
  return best;
}

int local_alignment(std::span<const std::uint8_t> x, std::span<const std::uint8_t> reversed) {
  const auto n = reversed.size();
  std::vector<int> prev(n + 1, 0);
  std::vector<int> next(n + 1, 0);
  int best = 0;
  for (auto s : x) {
    best = std::max(best, advance_row(prev.data(), next.data(), s, reversed.data(), n));
    std::swap(prev, next);
  }
  return best;
}

}  // namespace

int rna_pair_score(std::uint8_t a, std::uint8_t b) { return kPairTable[a & 3U][b & 3U]; }

int duplex_score(const Sequence& x, const Sequence& target) {
  require_rna(x);
  require_rna(target);
  std::vector<std::uint8_t> reversed(target.indices().rbegin(), target.indices().rend());
  return local_alignment(x.indices(), reversed);
}

int perfect_duplex_score(const Sequence& target) {
  require_rna(target);
  int total = 0;
  for (auto s : target.indices()) total += rna_pair_score(s, static_cast<std::uint8_t>(3 - s));
  return total;
}

RnaBindingLandscape::RnaBindingLandscape(std::size_t length, std::vector<Sequence> targets, std::string name)
    : Landscape(std::move(name), length, Alphabet::rna()), targets_(std::move(targets)) {
  if (targets_.empty() || targets_.size() > 2) throw LandscapeError("RNA landscape needs one or two targets");
  for (const auto& t : targets_) {
    require_rna(t);
    if (t.size() == 0 || t.size() > 100) throw LandscapeError("RNA target length must be in 1..100");
    reversed_targets_.emplace_back(t.indices().rbegin(), t.indices().rend());
    // A length-L sequence pairs with at most L target bases; longer targets
    // are normalized by the perfect complement of their strongest L-window.
    const auto& ts = t.indices();
    const std::size_t w = std::min(length, ts.size());
    int window = 0, best = 0;
    for (std::size_t i = 0; i < ts.size(); ++i) {
      window += rna_pair_score(ts[i], static_cast<std::uint8_t>(3 - ts[i]));
      if (i >= w) window -= rna_pair_score(ts[i - w], static_cast<std::uint8_t>(3 - ts[i - w]));
      if (i + 1 >= w) best = std::max(best, window);
    }
    const double z = best;
    if (!(z > 0.0)) throw LandscapeError("RNA normalization constant must be positive");
    normalizers_.push_back(z);
  }
}

double RnaBindingLandscape::combine(std::span<const double> normalized) {
  if (normalized.size() == 1) return normalized[0];
  double product = 1.0;
  for (double y : normalized) product *= y;
  return std::sqrt(product);
}

double RnaBindingLandscape::evaluate(const Sequence& x) const {
  check_input(x);
  std::array<double, 2> y{};
  for (std::size_t i = 0; i < targets_.size(); ++i) {
    const int score = local_alignment(x.indices(), reversed_targets_[i]);
    y[i] = std::min(score / normalizers_[i], 1.0);
  }
  return combine(std::span<const double>(y.data(), targets_.size()));
}

std::vector<double> RnaBindingLandscape::tabulate() const {
  // Depth-first walk over the domain in index order; sequences sharing a
  // prefix share the alignment rows computed for it.
  const auto L = length();
  const auto k = targets_.size();
  std::vector<double> values(domain_size());
  struct Stack {
    std::vector<std::vector<int>> rows;  // L+1 rows of T+1 cells
    std::vector<int> best;               // best score through each level
  };
  std::vector<Stack> stacks(k);
  for (std::size_t t = 0; t < k; ++t) {
    stacks[t].rows.assign(L + 1, std::vector<int>(reversed_targets_[t].size() + 1, 0));
    stacks[t].best.assign(L + 1, 0);
  }
  std::vector<std::uint8_t> digit(L, 0);
  std::size_t level = 0;
  std::uint64_t index = 0;
  // Iterative odometer: fill rows from `level` downward, emit, then advance.
  for (;;) {
    for (std::size_t lv = level; lv < L; ++lv) {
      for (std::size_t t = 0; t < k; ++t) {
        auto& st = stacks[t];
        const int row_best = advance_row(st.rows[lv].data(), st.rows[lv + 1].data(), digit[lv],
                                         reversed_targets_[t].data(), reversed_targets_[t].size());
        st.best[lv + 1] = std::max(st.best[lv], row_best);
      }
    }
    std::array<double, 2> y{};
    for (std::size_t t = 0; t < k; ++t) y[t] = std::min(stacks[t].best[L] / normalizers_[t], 1.0);
    values[index++] = combine(std::span<const double>(y.data(), k));

    std::size_t p = L;
    while (p > 0 && digit[p - 1] == 3) {
      digit[p - 1] = 0;
      --p;
    }
    if (p == 0) break;
    ++digit[p - 1];
    level = p - 1;
  }
  return values;
}

std::shared_ptr<RnaBindingLandscape> make_rna_landscape(std::size_t length, std::size_t target_count,
                                                        std::size_t target_length, std::uint64_t seed) {
  Rng rng = make_rng(seed, 0x52a);
  std::vector<Sequence> targets;
  for (std::size_t i = 0; i < target_count; ++i) targets.push_back(random_sequence(target_length, Alphabet::rna(), rng));
  std::string name = "rna" + std::to_string(length) + "_t" + std::to_string(target_count) + ":" + std::to_string(seed);
  return std::make_shared<RnaBindingLandscape>(length, std::move(targets), std::move(name));
}

SwamplandLandscape::SwamplandLandscape(LandscapePtr base, Sequence wildtype)
    : Landscape("swampland:" + base->name(), base->length(), base->alphabet()),
      base_(std::move(base)),
      wildtype_(std::move(wildtype)),
      conserved_((length() + 4) / 5) {
  check_input(wildtype_);
}

bool SwamplandLandscape::satisfies_mask(const Sequence& x) const {
  for (std::size_t i = 0; i < conserved_; ++i) {
    if (x[i] != wildtype_[i]) return false;
  }
  return true;
}

double SwamplandLandscape::evaluate(const Sequence& x) const {
  check_input(x);
  return satisfies_mask(x) ? base_->evaluate(x) : 0.0;
}

std::vector<double> SwamplandLandscape::tabulate() const {
  auto values = base_->tabulate();
  // The conserved prefix is the most significant digits of the index.
  std::uint64_t suffix_count = 1;
  for (std::size_t i = conserved_; i < length(); ++i) suffix_count *= alphabet()->size();
  std::uint64_t prefix = 0;
  for (std::size_t i = 0; i < conserved_; ++i) prefix = prefix * alphabet()->size() + wildtype_[i];
  const std::uint64_t keep_begin = prefix * suffix_count;
  const std::uint64_t keep_end = keep_begin + suffix_count;
  for (std::uint64_t i = 0; i < values.size(); ++i) {
    if (i < keep_begin || i >= keep_end) values[i] = 0.0;
  }
  return values;
}

}  // namespace seqsandbox
