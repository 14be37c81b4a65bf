#include "seqsandbox/optima.hpp"

#include <algorithm>
#include <numeric>
#include <ostream>

namespace seqsandbox {

bool LocalOptimaSet::contains(const Sequence& x) const {
  return std::any_of(optima.begin(), optima.end(), [&](const LocalOptimum& o) { return o.sequence == x; });
}

LocalOptimaSet LocalOptimaSet::above(double y_tau, bool inclusive) const {
  LocalOptimaSet out;
  out.threshold = y_tau;
  for (const auto& o : optima) {
    if (inclusive ? o.fitness >= y_tau - 1e-9 : o.fitness > y_tau) out.optima.push_back(o);
  }
  return out;
}

LocalOptimaSet local_optima_from_table(std::span<const double> values, std::size_t length,
                                       const std::shared_ptr<const Alphabet>& alphabet, double y_tau) {
  const std::uint64_t a = alphabet->size();
  std::vector<std::uint64_t> place(length);
  std::uint64_t w = 1;
  for (std::size_t p = length; p-- > 0;) {
    place[p] = w;
    w *= a;
  }
  if (values.size() != w) throw LandscapeError("table size does not match A^L");

  LocalOptimaSet set;
  set.threshold = y_tau;
  for (std::uint64_t i = 0; i < values.size(); ++i) {
    const double f = values[i];
    if (!(f > y_tau)) continue;
    bool strict = true;
    for (std::size_t p = 0; p < length && strict; ++p) {
      const std::uint64_t digit = (i / place[p]) % a;
      const std::uint64_t base = i - digit * place[p];
      for (std::uint64_t s = 0; s < a; ++s) {
        if (s != digit && !(values[base + s * place[p]] < f)) {
          strict = false;
          break;
        }
      }
    }
    if (strict) set.optima.push_back({Sequence::from_index(i, length, alphabet), f});
  }
  return set;
}

LocalOptimaSet enumerate_local_optima(const Landscape& landscape, double y_tau, std::uint64_t cap) {
  if (!landscape.enumerable(cap)) {
    throw LandscapeError("landscape domain exceeds the enumeration cap of " + std::to_string(cap));
  }
  const auto values = landscape.tabulate();
  return local_optima_from_table(values, landscape.length(), landscape.alphabet(), y_tau);
}

std::vector<std::vector<double>> path_tour(const Landscape& landscape, const Sequence& a, const Sequence& b,
                                           std::size_t n_walks, Rng& rng) {
  if (a.size() != b.size()) throw SequenceError("tour endpoints differ in length");
  std::vector<std::size_t> differing;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a[i] != b[i]) differing.push_back(i);
  }
  const double start = landscape.evaluate(a);
  std::vector<std::vector<double>> profiles;
  profiles.reserve(n_walks);
  for (std::size_t w = 0; w < n_walks; ++w) {
    auto order = differing;
    std::shuffle(order.begin(), order.end(), rng);
    std::vector<double> profile{start};
    Sequence current = a;
    for (auto pos : order) {
      current = current.with(pos, b[pos]);
      profile.push_back(landscape.evaluate(current));
    }
    profiles.push_back(std::move(profile));
  }
  return profiles;
}

void write_optima_csv(std::ostream& out, const LocalOptimaSet& set) {
  out << "sequence,fitness\n";
  const auto old = out.precision(17);
  for (const auto& o : set.optima) out << o.sequence.str() << ',' << o.fitness << '\n';
  out.precision(old);
}

}  // namespace seqsandbox
