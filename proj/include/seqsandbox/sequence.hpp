#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <memory>
#include <random>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace seqsandbox {

using Rng = std::mt19937_64;

enum class AlphabetKind { kDna, kRna, kProtein, kCustom };

class SequenceError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Ordered set of distinct symbol characters. The built-in nucleic alphabets
// use the fixed orders ACGT and ACGU.
class Alphabet {
 public:
  Alphabet(std::string symbols, AlphabetKind kind);

  static std::shared_ptr<const Alphabet> dna();
  static std::shared_ptr<const Alphabet> rna();
  static std::shared_ptr<const Alphabet> protein();
  // Accepts "DNA", "RNA", "protein" or a literal symbol string.
  static std::shared_ptr<const Alphabet> from_name(std::string_view name);

  std::size_t size() const { return symbols_.size(); }
  AlphabetKind kind() const { return kind_; }
  const std::string& symbols() const { return symbols_; }
  char symbol(std::size_t index) const { return symbols_[index]; }
  // Throws SequenceError for characters outside the alphabet.
  std::uint8_t index_of(char c) const;
  bool is_nucleic() const { return kind_ == AlphabetKind::kDna || kind_ == AlphabetKind::kRna; }
  std::string name() const;

  bool operator==(const Alphabet& other) const { return symbols_ == other.symbols_; }

 private:
  std::string symbols_;
  AlphabetKind kind_;
  std::array<std::int16_t, 256> lookup_{};
};

// Immutable fixed-length word over an alphabet, stored as symbol indices.
class Sequence {
 public:
  Sequence() = default;
  Sequence(std::shared_ptr<const Alphabet> alphabet, std::vector<std::uint8_t> indices);

  static Sequence parse(std::string_view text, std::shared_ptr<const Alphabet> alphabet);
  // Decodes a base-A integer, position 0 being the most significant digit.
  static Sequence from_index(std::uint64_t index, std::size_t length,
                             std::shared_ptr<const Alphabet> alphabet);

  std::size_t size() const { return indices_.size(); }
  std::uint8_t operator[](std::size_t pos) const { return indices_[pos]; }
  std::span<const std::uint8_t> indices() const { return indices_; }
  const Alphabet& alphabet() const { return *alphabet_; }
  const std::shared_ptr<const Alphabet>& alphabet_ptr() const { return alphabet_; }

  std::string str() const;
  std::uint64_t to_index() const;
  Sequence with(std::size_t pos, std::uint8_t symbol) const;

  bool operator==(const Sequence& other) const { return indices_ == other.indices_; }
  // Canonical order: lexicographic over symbol indices.
  bool operator<(const Sequence& other) const { return indices_ < other.indices_; }

 private:
  std::shared_ptr<const Alphabet> alphabet_;
  std::vector<std::uint8_t> indices_;
};

struct SequenceHash {
  std::size_t operator()(const Sequence& s) const noexcept;
};

std::size_t hamming_distance(const Sequence& a, const Sequence& b);

// Substitutes each position independently with probability `rate`; the
// replacement is drawn uniformly from the other A-1 symbols.
Sequence mutate(const Sequence& x, double rate, Rng& rng);

// Like mutate, but retries until at least one position changed.
Sequence mutate_at_least_once(const Sequence& x, double rate, Rng& rng);

// Donor-switching crossover: each child copies from its current donor and the
// donors swap with probability `rate` before each position.
std::pair<Sequence, Sequence> recombine(const Sequence& a, const Sequence& b, double rate, Rng& rng);

// All (A-1)*L single-substitution neighbors, position-major then symbol order.
std::vector<Sequence> single_point_neighbors(const Sequence& x);

Sequence reverse_complement(const Sequence& x);

Sequence random_sequence(std::size_t length, std::shared_ptr<const Alphabet> alphabet, Rng& rng);

}  // namespace seqsandbox
