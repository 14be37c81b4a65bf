#pragma once

#include <cstdint>
#include <filesystem>
#include <memory>
#include <string>
#include <vector>

#include "seqsandbox/sequence.hpp"

namespace seqsandbox {

class LandscapeError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline constexpr std::uint64_t kDefaultEnumerationCap = std::uint64_t{1} << 28;

// Ground-truth oracle. evaluate() is deterministic, reentrant and returns a
// fitness in [0, 1].
class Landscape {
 public:
  Landscape(std::string name, std::size_t length, std::shared_ptr<const Alphabet> alphabet);
  virtual ~Landscape() = default;

  virtual double evaluate(const Sequence& x) const = 0;

  // Fitness of every sequence in base-A index order. Subclasses override this
  // when a faster route than per-sequence evaluation exists.
  virtual std::vector<double> tabulate() const;

  const std::string& name() const { return name_; }
  std::size_t length() const { return length_; }
  const std::shared_ptr<const Alphabet>& alphabet() const { return alphabet_; }
  // A^L, saturated at UINT64_MAX.
  std::uint64_t domain_size() const;
  bool enumerable(std::uint64_t cap = kDefaultEnumerationCap) const { return domain_size() <= cap; }

 protected:
  void check_input(const Sequence& x) const;

 private:
  std::string name_;
  std::size_t length_;
  std::shared_ptr<const Alphabet> alphabet_;
};

using LandscapePtr = std::shared_ptr<const Landscape>;

// Full lookup table over A^L, min-max rescaled on construction.
class TableLandscape : public Landscape {
 public:
  TableLandscape(std::string name, std::size_t length, std::shared_ptr<const Alphabet> alphabet,
                 std::vector<double> raw_values, std::string source);

  double evaluate(const Sequence& x) const override;
  std::vector<double> tabulate() const override { return values_; }
  const std::string& source() const { return source_; }

 private:
  std::vector<double> values_;
  std::string source_;
};

// Reads a `sequence<TAB>affinity` (or comma separated) table covering all 4^L
// DNA sequences of one length.
std::shared_ptr<TableLandscape> load_tf_landscape(const std::filesystem::path& path);

// Multi-peaked stand-in for measured TF tables: soft maximum over 3-5 seeded
// position weight motifs scored at every offset.
std::shared_ptr<TableLandscape> synth_tf_landscape(std::uint64_t seed, std::size_t length = 8);

void write_tf_table(std::ostream& out, const Landscape& landscape);

class ConstantLandscape : public Landscape {
 public:
  ConstantLandscape(std::size_t length, std::shared_ptr<const Alphabet> alphabet, double value);
  double evaluate(const Sequence& x) const override;

 private:
  double value_;
};

// Independent per-position contributions rescaled to [0, 1]; single peak.
class AdditiveLandscape : public Landscape {
 public:
  AdditiveLandscape(std::size_t length, std::shared_ptr<const Alphabet> alphabet, std::uint64_t seed);
  double evaluate(const Sequence& x) const override;

 private:
  std::vector<std::vector<double>> weights_;
  double offset_ = 0.0;
  double scale_ = 1.0;
};

}  // namespace seqsandbox
