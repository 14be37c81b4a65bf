#pragma once

#include <cstdint>
#include <vector>

#include "seqsandbox/landscape.hpp"

namespace seqsandbox {

// Pair scores for the duplex alignment: GC 3, AU 2, GU 1, anything else -2.
int rna_pair_score(std::uint8_t a, std::uint8_t b);
inline constexpr int kDuplexGapPenalty = 3;

// Best local alignment of x against reverse(target) under the pair scores and
// a linear gap penalty, floored at zero (the empty alignment).
int duplex_score(const Sequence& x, const Sequence& target);

// Score of the perfect complement: sum of Watson-Crick pair scores over t.
int perfect_duplex_score(const Sequence& target);

// Binding landscape against one or two hidden RNA targets. One target gives
// min(score / Z, 1); two give the geometric mean of the normalized scores.
// Z is the perfect-complement score of the target's strongest L-long window,
// which is the whole target when it is no longer than L.
class RnaBindingLandscape : public Landscape {
 public:
  RnaBindingLandscape(std::size_t length, std::vector<Sequence> targets, std::string name = "rna");

  double evaluate(const Sequence& x) const override;
  std::vector<double> tabulate() const override;

  std::size_t target_count() const { return targets_.size(); }
  // Normalization constant of target i.
  double normalizer(std::size_t i) const { return normalizers_.at(i); }

  // Combines per-target normalized scores; exposed for tests.
  static double combine(std::span<const double> normalized);

 protected:
  // Only test code and the landscape factory see the targets.
  friend struct RnaLandscapeAccess;
  const std::vector<Sequence>& targets() const { return targets_; }

 private:
  std::vector<Sequence> targets_;
  std::vector<std::vector<std::uint8_t>> reversed_targets_;
  std::vector<double> normalizers_;
};

// Generates `target_count` random hidden targets of `target_length` from a seed.
std::shared_ptr<RnaBindingLandscape> make_rna_landscape(std::size_t length, std::size_t target_count,
                                                        std::size_t target_length, std::uint64_t seed);

// Composite landscape whose first ceil(L/5) positions must equal the wildtype;
// any violation has fitness exactly zero.
class SwamplandLandscape : public Landscape {
 public:
  SwamplandLandscape(LandscapePtr base, Sequence wildtype);

  double evaluate(const Sequence& x) const override;
  std::vector<double> tabulate() const override;

  bool satisfies_mask(const Sequence& x) const;
  std::size_t conserved_count() const { return conserved_; }
  const Sequence& wildtype() const { return wildtype_; }
  const Landscape& base() const { return *base_; }

 private:
  LandscapePtr base_;
  Sequence wildtype_;
  std::size_t conserved_;
};

struct RnaLandscapeAccess {
  static const std::vector<Sequence>& targets(const RnaBindingLandscape& l) { return l.targets(); }
};

}  // namespace seqsandbox
