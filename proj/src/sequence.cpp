#include "seqsandbox/sequence.hpp"

#include <algorithm>
#include <unordered_set>

#include "seqsandbox/random.hpp"

namespace seqsandbox {

Alphabet::Alphabet(std::string symbols, AlphabetKind kind) : symbols_(std::move(symbols)), kind_(kind) {
  if (symbols_.size() < 2) throw SequenceError("alphabet needs at least two symbols");
  if (symbols_.size() > 255) throw SequenceError("alphabet too large");
  lookup_.fill(-1);
  for (std::size_t i = 0; i < symbols_.size(); ++i) {
    auto c = static_cast<unsigned char>(symbols_[i]);
    if (lookup_[c] >= 0) throw SequenceError(std::string("duplicate alphabet symbol '") + symbols_[i] + "'");
    lookup_[c] = static_cast<std::int16_t>(i);
  }
}

std::shared_ptr<const Alphabet> Alphabet::dna() {
  static const auto kDna = std::make_shared<const Alphabet>("ACGT", AlphabetKind::kDna);
  return kDna;
}

std::shared_ptr<const Alphabet> Alphabet::rna() {
  static const auto kRna = std::make_shared<const Alphabet>("ACGU", AlphabetKind::kRna);
  return kRna;
}

std::shared_ptr<const Alphabet> Alphabet::protein() {
  static const auto kProtein = std::make_shared<const Alphabet>("ACDEFGHIKLMNPQRSTVWY", AlphabetKind::kProtein);
  return kProtein;
}

std::shared_ptr<const Alphabet> Alphabet::from_name(std::string_view name) {
  if (name == "DNA" || name == "dna") return dna();
  if (name == "RNA" || name == "rna") return rna();
  if (name == "protein") return protein();
  return std::make_shared<const Alphabet>(std::string(name), AlphabetKind::kCustom);
}

std::uint8_t Alphabet::index_of(char c) const {
  const auto idx = lookup_[static_cast<unsigned char>(c)];
  if (idx < 0) throw SequenceError(std::string("symbol '") + c + "' is not in alphabet " + symbols_);
  return static_cast<std::uint8_t>(idx);
}

std::string Alphabet::name() const {
  switch (kind_) {
    case AlphabetKind::kDna:
      return "DNA";
    case AlphabetKind::kRna:
      return "RNA";
    case AlphabetKind::kProtein:
      return "protein";
    case AlphabetKind::kCustom:
      break;
  }
  return symbols_;
}

Sequence::Sequence(std::shared_ptr<const Alphabet> alphabet, std::vector<std::uint8_t> indices)
    : alphabet_(std::move(alphabet)), indices_(std::move(indices)) {
  if (!alphabet_) throw SequenceError("sequence without alphabet");
  for (auto s : indices_) {
    if (s >= alphabet_->size()) throw SequenceError("symbol index out of range");
  }
}

Sequence Sequence::parse(std::string_view text, std::shared_ptr<const Alphabet> alphabet) {
  std::vector<std::uint8_t> indices;
  indices.reserve(text.size());
  for (char c : text) indices.push_back(alphabet->index_of(c));
  return Sequence(std::move(alphabet), std::move(indices));
}

Sequence Sequence::from_index(std::uint64_t index, std::size_t length, std::shared_ptr<const Alphabet> alphabet) {
  const auto a = alphabet->size();
  std::vector<std::uint8_t> indices(length);
  for (std::size_t p = length; p-- > 0;) {
    indices[p] = static_cast<std::uint8_t>(index % a);
    index /= a;
  }
  return Sequence(std::move(alphabet), std::move(indices));
}

std::string Sequence::str() const {
  std::string out;
  out.reserve(indices_.size());
  for (auto s : indices_) out.push_back(alphabet_->symbol(s));
  return out;
}

std::uint64_t Sequence::to_index() const {
  std::uint64_t index = 0;
  for (auto s : indices_) index = index * alphabet_->size() + s;
  return index;
}

Sequence Sequence::with(std::size_t pos, std::uint8_t symbol) const {
  auto copy = indices_;
  copy.at(pos) = symbol;
  return Sequence(alphabet_, std::move(copy));
}

std::size_t SequenceHash::operator()(const Sequence& s) const noexcept {
  return static_cast<std::size_t>(hash_symbols(s.indices()));
}

namespace {

void require_compatible(const Sequence& a, const Sequence& b) {
  if (a.size() != b.size()) throw SequenceError("sequence length mismatch");
  if (!(a.alphabet() == b.alphabet())) throw SequenceError("sequence alphabet mismatch");
}

std::uint8_t substitute(std::uint8_t current, std::size_t alphabet_size, Rng& rng) {
  std::uniform_int_distribution<std::size_t> pick(0, alphabet_size - 2);
  auto s = static_cast<std::uint8_t>(pick(rng));
  return s >= current ? static_cast<std::uint8_t>(s + 1) : s;
}

}  // namespace

std::size_t hamming_distance(const Sequence& a, const Sequence& b) {
  require_compatible(a, b);
  std::size_t d = 0;
  for (std::size_t i = 0; i < a.size(); ++i) d += a[i] != b[i];
  return d;
}

Sequence mutate(const Sequence& x, double rate, Rng& rng) {
  std::vector<std::uint8_t> out(x.indices().begin(), x.indices().end());
  if (rate <= 0.0) return Sequence(x.alphabet_ptr(), std::move(out));
  std::bernoulli_distribution flip(std::min(rate, 1.0));
  const auto a = x.alphabet().size();
  for (auto& s : out) {
    if (flip(rng)) s = substitute(s, a, rng);
  }
  return Sequence(x.alphabet_ptr(), std::move(out));
}

Sequence mutate_at_least_once(const Sequence& x, double rate, Rng& rng) {
  if (x.size() == 0) return x;
  if (rate <= 0.0) rate = 1.0 / static_cast<double>(x.size());
  for (;;) {
    auto child = mutate(x, rate, rng);
    if (!(child == x)) return child;
  }
}

std::pair<Sequence, Sequence> recombine(const Sequence& a, const Sequence& b, double rate, Rng& rng) {
  require_compatible(a, b);
  std::vector<std::uint8_t> left(a.size());
  std::vector<std::uint8_t> right(a.size());
  std::bernoulli_distribution cross(std::clamp(rate, 0.0, 1.0));
  bool swapped = false;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (i > 0 && rate > 0.0 && cross(rng)) swapped = !swapped;
    left[i] = swapped ? b[i] : a[i];
    right[i] = swapped ? a[i] : b[i];
  }
  return {Sequence(a.alphabet_ptr(), std::move(left)), Sequence(a.alphabet_ptr(), std::move(right))};
}

std::vector<Sequence> single_point_neighbors(const Sequence& x) {
  const auto a = x.alphabet().size();
  std::vector<Sequence> out;
  out.reserve((a - 1) * x.size());
  for (std::size_t p = 0; p < x.size(); ++p) {
    for (std::size_t s = 0; s < a; ++s) {
      if (s == x[p]) continue;
      out.push_back(x.with(p, static_cast<std::uint8_t>(s)));
    }
  }
  return out;
}

Sequence reverse_complement(const Sequence& x) {
  if (!x.alphabet().is_nucleic()) throw SequenceError("reverse complement needs a DNA or RNA alphabet");
  // ACGT / ACGU: A<->T|U is 0<->3, C<->G is 1<->2.
  std::vector<std::uint8_t> out(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) out[i] = static_cast<std::uint8_t>(3 - x[x.size() - 1 - i]);
  return Sequence(x.alphabet_ptr(), std::move(out));
}

Sequence random_sequence(std::size_t length, std::shared_ptr<const Alphabet> alphabet, Rng& rng) {
  std::uniform_int_distribution<std::size_t> pick(0, alphabet->size() - 1);
  std::vector<std::uint8_t> out(length);
  for (auto& s : out) s = static_cast<std::uint8_t>(pick(rng));
  return Sequence(std::move(alphabet), std::move(out));
}

}  // namespace seqsandbox
