#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <sstream>

#include "doctest.h"
#include "seqsandbox/optima.hpp"
#include "seqsandbox/random.hpp"
#include "seqsandbox/rna.hpp"

using namespace seqsandbox;

namespace {

Sequence rna(const char* s) { return Sequence::parse(s, Alphabet::rna()); }

// Exhaustive search over every local alignment path of x against reverse(t):
// start anywhere, extend by pair/gap moves, keep the best running score.
int brute_force_duplex(const std::string& x, const std::string& t) {
  const std::string r(t.rbegin(), t.rend());
  auto idx = [](char c) -> std::uint8_t { return static_cast<std::uint8_t>(std::string("ACGU").find(c)); };
  int best = 0;
  std::function<void(std::size_t, std::size_t, int)> extend = [&](std::size_t i, std::size_t j, int score) {
    best = std::max(best, score);
    if (i < x.size() && j < r.size()) extend(i + 1, j + 1, score + rna_pair_score(idx(x[i]), idx(r[j])));
    if (i < x.size()) extend(i + 1, j, score - kDuplexGapPenalty);
    if (j < r.size()) extend(i, j + 1, score - kDuplexGapPenalty);
  };
  for (std::size_t i = 0; i < x.size(); ++i) {
    for (std::size_t j = 0; j < r.size(); ++j) {
      extend(i + 1, j + 1, rna_pair_score(idx(x[i]), idx(r[j])));
    }
  }
  return best;
}

// Optima by explicit neighbor lists and per-sequence evaluation.
std::vector<std::string> naive_optima(const Landscape& l, double y_tau) {
  std::vector<std::string> out;
  for (std::uint64_t i = 0; i < l.domain_size(); ++i) {
    auto x = Sequence::from_index(i, l.length(), l.alphabet());
    const double f = l.evaluate(x);
    if (!(f > y_tau)) continue;
    bool is_peak = true;
    for (const auto& n : single_point_neighbors(x)) {
      if (l.evaluate(n) >= f) {
        is_peak = false;
        break;
      }
    }
    if (is_peak) out.push_back(x.str());
  }
  return out;
}

class ToyLandscape : public Landscape {
 public:
  ToyLandscape() : Landscape("toy", 2, Alphabet::from_name("01")) {}
  double evaluate(const Sequence& x) const override {
    static const double f[4] = {0.1, 0.5, 0.4, 0.2};
    return f[x.to_index()];
  }
};

std::filesystem::path temp_file(const std::string& name) {
  return std::filesystem::temp_directory_path() / ("seqsandbox_" + name);
}

}  // namespace

TEST_CASE("duplex score examples") {
  CHECK(duplex_score(rna("AAAA"), rna("UUUU")) == 8);
  CHECK(brute_force_duplex("AAAA", "UUUU") == 8);
  CHECK(duplex_score(rna("GGGG"), rna("GGGG")) == 0);
  auto t = rna("GACUUAGCGA");
  CHECK(duplex_score(reverse_complement(t), t) == perfect_duplex_score(t));
  CHECK(perfect_duplex_score(t) == 3 * 5 + 2 * 5);
  CHECK_THROWS_AS(duplex_score(Sequence::parse("ACGT", Alphabet::dna()), t), SequenceError);
}

TEST_CASE("duplex score matches exhaustive alignment search on short strings") {
  Rng rng(21);
  for (int i = 0; i < 200; ++i) {
    auto x = random_sequence(1 + rng() % 5, Alphabet::rna(), rng);
    auto t = random_sequence(1 + rng() % 5, Alphabet::rna(), rng);
    CHECK(duplex_score(x, t) == brute_force_duplex(x.str(), t.str()));
  }
}

TEST_CASE("duplex score is symmetric") {
  Rng rng(22);
  for (int i = 0; i < 300; ++i) {
    auto x = random_sequence(14, Alphabet::rna(), rng);
    auto t = random_sequence(1 + rng() % 30, Alphabet::rna(), rng);
    CHECK(duplex_score(x, t) == duplex_score(t, x));
  }
}

TEST_CASE("rna long target normalizes by its strongest window") {
  // Windows of width 4: AUAU scores 8, GCGC scores 12.
  auto t = rna("AUAUAGCGCA");
  RnaBindingLandscape l(4, {t});
  CHECK(l.normalizer(0) == 12.0);
  CHECK(l.evaluate(reverse_complement(rna("GCGC"))) == 1.0);
  CHECK(l.evaluate(reverse_complement(rna("AUAU"))) == doctest::Approx(8.0 / 12.0));
  const auto values = l.tabulate();
  CHECK(*std::max_element(values.begin(), values.end()) == 1.0);
}

TEST_CASE("rna fitness") {
  auto t = rna("GGAUCCAGUA");
  RnaBindingLandscape single(10, {t});
  CHECK(single.evaluate(reverse_complement(t)) == 1.0);
  CHECK(single.normalizer(0) == perfect_duplex_score(t));

  const double ys[2] = {0.25, 0.04};
  CHECK(RnaBindingLandscape::combine(ys) == doctest::Approx(0.1).epsilon(1e-12));

  CHECK_THROWS_AS(RnaBindingLandscape(10, {}), LandscapeError);
  CHECK_THROWS_AS(single.evaluate(rna("GGAU")), SequenceError);
}

TEST_CASE("perfect complement is the global maximum of a single-target landscape") {
  for (std::uint64_t seed = 1; seed <= 3; ++seed) {
    auto l = make_rna_landscape(6, 1, 6, seed);
    const auto values = l->tabulate();
    const auto argmax = std::max_element(values.begin(), values.end()) - values.begin();
    CHECK(*std::max_element(values.begin(), values.end()) == 1.0);
    CHECK(std::count(values.begin(), values.end(), 1.0) == 1);
    auto target = RnaLandscapeAccess::targets(*l)[0];
    CHECK(static_cast<std::uint64_t>(argmax) == reverse_complement(target).to_index());
  }
}

TEST_CASE("rna tabulate agrees with per-sequence evaluation") {
  for (std::size_t targets : {1u, 2u}) {
    auto l = make_rna_landscape(6, targets, 9, 40 + targets);
    const auto table = l->tabulate();
    for (std::uint64_t i = 0; i < table.size(); ++i) {
      REQUIRE(table[i] == l->evaluate(Sequence::from_index(i, 6, Alphabet::rna())));
    }
  }
}

TEST_CASE("swampland") {
  auto base = make_rna_landscape(10, 2, 10, 5);
  Rng rng(5);
  auto wildtype = random_sequence(10, Alphabet::rna(), rng);
  SwamplandLandscape swamp(base, wildtype);
  CHECK(swamp.conserved_count() == 2);

  auto altered = wildtype.with(1, static_cast<std::uint8_t>((wildtype[1] + 1) % 4));
  CHECK(swamp.evaluate(altered) == 0.0);
  CHECK(swamp.evaluate(wildtype) == base->evaluate(wildtype));

  for (int i = 0; i < 2000; ++i) {
    auto x = random_sequence(10, Alphabet::rna(), rng);
    if (i % 2 == 0) {
      for (std::size_t p = 0; p < 2; ++p) x = x.with(p, wildtype[p]);
    }
    const double s = swamp.evaluate(x);
    const double b = base->evaluate(x);
    CHECK(s <= b);
    if (swamp.satisfies_mask(x)) {
      CHECK(s == b);
    } else {
      CHECK(s == 0.0);
    }
  }

  SwamplandLandscape small(make_rna_landscape(5, 2, 5, 9), Sequence::parse("ACGUA", Alphabet::rna()));
  const auto table = small.tabulate();
  for (std::uint64_t i = 0; i < table.size(); ++i) {
    REQUIRE(table[i] == small.evaluate(Sequence::from_index(i, 5, Alphabet::rna())));
  }
}

TEST_CASE("landscape outputs stay in [0, 1]") {
  Rng rng(99);
  std::vector<LandscapePtr> landscapes{
      make_rna_landscape(14, 1, 14, 1),
      make_rna_landscape(14, 2, 50, 2),
      std::make_shared<SwamplandLandscape>(make_rna_landscape(14, 2, 14, 3), random_sequence(14, Alphabet::rna(), rng)),
      synth_tf_landscape(4, 8),
      std::make_shared<AdditiveLandscape>(14, Alphabet::rna(), 3),
  };
  for (const auto& l : landscapes) {
    for (int i = 0; i < 20000; ++i) {
      const double f = l->evaluate(random_sequence(l->length(), l->alphabet(), rng));
      REQUIRE(f >= 0.0);
      REQUIRE(f <= 1.0);
    }
  }
}

TEST_CASE("enumerate local optima on the two-bit toy landscape") {
  ToyLandscape toy;
  auto set = enumerate_local_optima(toy, 0.0);
  REQUIRE(set.size() == 2);
  CHECK(set.optima[0].sequence.str() == "01");
  CHECK(set.optima[1].sequence.str() == "10");
  CHECK(enumerate_local_optima(toy, 0.45).size() == 1);
  CHECK(enumerate_local_optima(toy, 1.0).size() == 0);
}

TEST_CASE("plateaus have no strict optima") {
  ConstantLandscape flat(5, Alphabet::dna(), 0.5);
  CHECK(enumerate_local_optima(flat, 0.0).size() == 0);
}

TEST_CASE("enumeration cap") {
  auto l = make_rna_landscape(14, 1, 14, 1);
  CHECK_THROWS_AS(enumerate_local_optima(*l, 0.5, 1000), LandscapeError);
}

TEST_CASE("threshold one keeps at most the global maxima") {
  auto l = make_rna_landscape(6, 1, 6, 12);
  auto set = enumerate_local_optima(*l, 0.0).above(1.0, true);
  REQUIRE(set.size() == 1);
  CHECK(set.optima[0].fitness == 1.0);
}

TEST_CASE("enumerate_local_optima agrees with the naive neighbor scan") {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    LandscapePtr l;
    switch (seed % 4) {
      case 0:
        l = synth_tf_landscape(seed, 5 + seed % 2);
        break;
      case 1:
        l = make_rna_landscape(5 + seed % 2, 1, 8, seed);
        break;
      case 2:
        l = make_rna_landscape(6, 2, 6, seed);
        break;
      default:
        l = std::make_shared<AdditiveLandscape>(6, Alphabet::dna(), seed);
        break;
    }
    for (double y_tau : {0.0, 0.5}) {
      const auto fast = enumerate_local_optima(*l, y_tau);
      std::vector<std::string> got;
      for (const auto& o : fast.optima) got.push_back(o.sequence.str());
      CHECK(got == naive_optima(*l, y_tau));
    }
  }
}

TEST_CASE("synthetic TF landscape") {
  auto a = synth_tf_landscape(3);
  auto b = synth_tf_landscape(3);
  const auto ta = a->tabulate();
  CHECK(ta == b->tabulate());
  CHECK(ta.size() == 65536);
  CHECK(*std::min_element(ta.begin(), ta.end()) == 0.0);
  CHECK(*std::max_element(ta.begin(), ta.end()) == 1.0);
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    CHECK(enumerate_local_optima(*synth_tf_landscape(seed), 0.75).size() > 1);
  }
  CHECK(synth_tf_landscape(4)->tabulate() != ta);
  CHECK_THROWS_AS(synth_tf_landscape(1, 20), LandscapeError);
}

TEST_CASE("load TF table") {
  auto source = synth_tf_landscape(8, 8);
  const auto path = temp_file("tf_ok.tsv");
  {
    std::ofstream out(path);
    write_tf_table(out, *source);
  }
  auto loaded = load_tf_landscape(path);
  CHECK(loaded->tabulate() == source->tabulate());
  const auto values = loaded->tabulate();
  const auto argmax = std::max_element(values.begin(), values.end()) - values.begin();
  CHECK(loaded->evaluate(Sequence::from_index(argmax, 8, Alphabet::dna())) == 1.0);

  auto write = [](const std::string& name, const std::string& body) {
    auto p = temp_file(name);
    std::ofstream(p) << body;
    return p;
  };
  std::string full_two;
  for (std::uint64_t i = 0; i < 16; ++i) {
    full_two += Sequence::from_index(i, 2, Alphabet::dna()).str() + "," + std::to_string(i) + "\n";
  }
  CHECK(load_tf_landscape(write("tf_two.csv", "sequence,affinity\n" + full_two))->length() == 2);
  CHECK_THROWS_WITH_AS(load_tf_landscape(write("tf_dup.csv", full_two + "AA,3\n")), doctest::Contains("duplicate"),
                       LandscapeError);
  CHECK_THROWS_WITH_AS(load_tf_landscape(write("tf_missing.csv", "AA\t1\nAC\t2\n")), doctest::Contains("covers"),
                       LandscapeError);
  CHECK_THROWS_WITH_AS(load_tf_landscape(write("tf_nan.csv", "AA\tx\n")), doctest::Contains("non-numeric"),
                       LandscapeError);
  CHECK_THROWS_WITH_AS(load_tf_landscape(write("tf_mixed.csv", "AA\t1\nACG\t2\n")), doctest::Contains("mixed"),
                       LandscapeError);
  std::string constant;
  for (std::uint64_t i = 0; i < 16; ++i) constant += Sequence::from_index(i, 2, Alphabet::dna()).str() + "\t1\n";
  CHECK_THROWS_WITH_AS(load_tf_landscape(write("tf_const.csv", constant)), doctest::Contains("constant"),
                       LandscapeError);
}

TEST_CASE("path tours") {
  auto l = make_rna_landscape(10, 1, 10, 3);
  Rng rng(4);
  auto a = random_sequence(10, Alphabet::rna(), rng);
  auto same = path_tour(*l, a, a, 30, rng);
  REQUIRE(same.size() == 30);
  for (const auto& p : same) CHECK(p == std::vector<double>{l->evaluate(a)});

  auto b1 = a.with(3, static_cast<std::uint8_t>((a[3] + 1) % 4));
  auto one = path_tour(*l, a, b1, 30, rng);
  for (const auto& p : one) CHECK(p == one.front());
  CHECK(one.front().size() == 2);

  auto b = random_sequence(10, Alphabet::rna(), rng);
  const auto d = hamming_distance(a, b);
  for (const auto& p : path_tour(*l, a, b, 30, rng)) {
    CHECK(p.size() == d + 1);
    CHECK(p.front() == l->evaluate(a));
    CHECK(p.back() == l->evaluate(b));
  }
}

TEST_CASE("optima CSV export") {
  ToyLandscape toy;
  std::ostringstream out;
  write_optima_csv(out, enumerate_local_optima(toy, 0.0));
  CHECK(out.str() == "sequence,fitness\n01,0.5\n10,0.40000000000000002\n");
}
