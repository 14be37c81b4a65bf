#pragma once

#include <iosfwd>
#include <unordered_set>
#include <vector>

#include "seqsandbox/landscape.hpp"

namespace seqsandbox {

struct LocalOptimum {
  Sequence sequence;
  double fitness = 0.0;
};

// Strict local maxima above a threshold, in domain index order.
struct LocalOptimaSet {
  double threshold = 0.0;
  std::vector<LocalOptimum> optima;

  std::size_t size() const { return optima.size(); }
  bool contains(const Sequence& x) const;
  // Members whose fitness clears `y_tau`; `inclusive` uses >= y_tau - 1e-9.
  LocalOptimaSet above(double y_tau, bool inclusive = false) const;
};

// Every sequence with fitness > y_tau whose single-point neighbors all score
// strictly lower. Throws LandscapeError when A^L exceeds `cap`.
LocalOptimaSet enumerate_local_optima(const Landscape& landscape, double y_tau,
                                      std::uint64_t cap = kDefaultEnumerationCap);

// Same, over an already tabulated domain.
LocalOptimaSet local_optima_from_table(std::span<const double> values, std::size_t length,
                                       const std::shared_ptr<const Alphabet>& alphabet, double y_tau);

// Fitness along `n_walks` random shortest mutational paths from a to b. Each
// profile has hamming_distance(a, b) + 1 entries.
std::vector<std::vector<double>> path_tour(const Landscape& landscape, const Sequence& a, const Sequence& b,
                                           std::size_t n_walks, Rng& rng);

void write_optima_csv(std::ostream& out, const LocalOptimaSet& set);

}  // namespace seqsandbox
