// Randomised properties. Each generator is a plain mt19937_64 with a fixed
// seed so failures replay; the case index goes into every failure message.

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <random>
#include <set>

#include "oracles.hpp"
#include "rdsmb/covering.hpp"
#include "rdsmb/entropy.hpp"
#include "rdsmb/errors.hpp"
#include "rdsmb/rng.hpp"

using namespace rdsmb;

namespace {

const GroupTag Z1 = GroupTag::zd(1);
const GroupTag Z2 = GroupTag::zd(2);
const GroupTag H = GroupTag::heisenberg();

struct Gen {
  std::mt19937_64 engine;
  explicit Gen(std::uint64_t seed) : engine(seed) {}

  // Uniform on [lo, hi]; the modulo bias is irrelevant at these ranges.
  Coord range(Coord lo, Coord hi) {
    return lo + static_cast<Coord>(engine() % static_cast<std::uint64_t>(hi - lo + 1));
  }
  double unit() { return to_unit(engine()); }

  GroupElement element(GroupTag tag, Coord bound) {
    std::array<Coord, kMaxRank> c{};
    for (int i = 0; i < tag.rank; ++i) c[static_cast<std::size_t>(i)] = range(-bound, bound);
    return GroupElement::of(tag, std::span<const Coord>(c.data(), static_cast<std::size_t>(tag.rank)));
  }

  FiniteSubset subset(GroupTag tag, std::size_t max_size, Coord bound) {
    const auto n = static_cast<std::size_t>(range(1, static_cast<Coord>(max_size)));
    std::vector<GroupElement> v;
    for (std::size_t i = 0; i < n; ++i) v.push_back(element(tag, bound));
    return FiniteSubset(tag, std::move(v));
  }
};

oracle::Triple triple(const GroupElement& g) { return {g[0], g[1], g[2]}; }

std::set<oracle::Triple> triples(const FiniteSubset& s) {
  std::set<oracle::Triple> out;
  for (const GroupElement& g : s) out.insert(triple(g));
  return out;
}

std::set<oracle::Vec> vecs(const FiniteSubset& s) {
  std::set<oracle::Vec> out;
  for (const GroupElement& g : s) out.insert(oracle::Vec(g.coords().begin(), g.coords().end()));
  return out;
}

Distribution exact(std::initializer_list<const char*> p) {
  std::vector<Rational> v;
  for (const char* s : p) v.push_back(parse_rational(s));
  return Distribution::exact(std::move(v));
}

}  // namespace

TEST(GroupProperties, HeisenbergLawMatchesOracle) {
  Gen gen(1);
  for (int t = 0; t < 1000; ++t) {
    const GroupElement a = gen.element(H, 1'000'000);
    const GroupElement b = gen.element(H, 1'000'000);
    const GroupElement c = gen.element(H, 1'000'000);
    ASSERT_EQ(triple(mul(a, b)), oracle::heis_mul(triple(a), triple(b))) << t;
    ASSERT_EQ(triple(inverse(a)), oracle::heis_inv(triple(a))) << t;
    ASSERT_EQ(mul(mul(a, b), c), mul(a, mul(b, c))) << t;
    ASSERT_TRUE(mul(a, inverse(a)).is_identity()) << t;
    ASSERT_TRUE(mul(inverse(a), a).is_identity()) << t;
    ASSERT_EQ(inverse(mul(a, b)), mul(inverse(b), inverse(a))) << t;
  }
}

TEST(GroupProperties, ZdLawIsAbelianAndAssociative) {
  Gen gen(2);
  for (int d = 1; d <= 4; ++d) {
    const GroupTag tag = GroupTag::zd(d);
    for (int t = 0; t < 1000; ++t) {
      const GroupElement a = gen.element(tag, 1'000'000'000);
      const GroupElement b = gen.element(tag, 1'000'000'000);
      const GroupElement c = gen.element(tag, 1'000'000'000);
      ASSERT_EQ(mul(mul(a, b), c), mul(a, mul(b, c))) << d << " " << t;
      ASSERT_EQ(mul(a, b), mul(b, a)) << d << " " << t;
      ASSERT_TRUE(mul(a, inverse(a)).is_identity()) << d << " " << t;
    }
  }
}

TEST(GroupProperties, OverflowIsReportedNotWrapped) {
  Gen gen(3);
  const Coord big = std::numeric_limits<Coord>::max() / 2 + 1;
  for (int t = 0; t < 100; ++t) {
    const Coord x = big + gen.range(0, 1000);
    const GroupElement a = GroupElement::of(Z1, {x});
    EXPECT_THROW(mul(a, a), Error) << t;
    const GroupElement h = GroupElement::of(H, {x, x, 0});
    EXPECT_THROW(mul(h, h), Error) << t;
  }
}

TEST(SetProperties, ProductsMatchPointwiseOracle) {
  Gen gen(4);
  for (int t = 0; t < 200; ++t) {
    const FiniteSubset e = gen.subset(H, 30, 4);
    const FiniteSubset f = gen.subset(H, 30, 4);
    const FiniteSubset ef = product_set(e, f);
    ASSERT_EQ(triples(ef), oracle::product(triples(e), triples(f), oracle::heis_mul)) << t;
    ASSERT_EQ(product_set_size(e, f), ef.size()) << t;
    ASSERT_GE(ef.size(), std::max(e.size(), f.size())) << t;
    ASSERT_LE(ef.size(), e.size() * f.size()) << t;
  }
  for (int t = 0; t < 200; ++t) {
    const FiniteSubset e = gen.subset(Z2, 40, 6);
    const FiniteSubset f = gen.subset(Z2, 40, 6);
    const FiniteSubset ef = product_set(e, f);
    ASSERT_EQ(vecs(ef), oracle::product(vecs(e), vecs(f), oracle::add)) << t;
    ASSERT_EQ(product_set_size(e, f), ef.size()) << t;
  }
}

TEST(SetProperties, BoxProductsMatchPointwiseOracle) {
  Gen gen(5);
  for (int t = 0; t < 100; ++t) {
    const int d = static_cast<int>(gen.range(1, 3));
    const GroupTag tag = GroupTag::zd(d);
    std::vector<Coord> lo1, hi1, lo2, hi2;
    for (int i = 0; i < d; ++i) {
      lo1.push_back(gen.range(-5, 5));
      hi1.push_back(lo1.back() + gen.range(1, 5));
      lo2.push_back(gen.range(-5, 5));
      hi2.push_back(lo2.back() + gen.range(1, 5));
    }
    const FiniteSubset e = FiniteSubset::box(tag, lo1, hi1);
    const FiniteSubset f = FiniteSubset::box(tag, lo2, hi2);
    const FiniteSubset ef = product_set(e, f);
    ASSERT_EQ(vecs(ef), oracle::product(vecs(e), vecs(f), oracle::add)) << t;
    ASSERT_EQ(product_set_size(e, f), ef.size()) << t;
    // A box with one corner removed is no longer a box.
    const FiniteSubset holed = set_difference(e, FiniteSubset::singleton(e[0]));
    if (!holed.empty()) {
      ASSERT_EQ(vecs(product_set(holed, f)), oracle::product(vecs(holed), vecs(f), oracle::add)) << t;
      ASSERT_EQ(product_set_size(holed, f), product_set(holed, f).size()) << t;
    }
  }
}

TEST(SetProperties, ProductIsAssociativeAndInvertsInReverse) {
  Gen gen(6);
  for (int t = 0; t < 100; ++t) {
    const FiniteSubset a = gen.subset(H, 8, 3);
    const FiniteSubset b = gen.subset(H, 8, 3);
    const FiniteSubset c = gen.subset(H, 8, 3);
    ASSERT_EQ(product_set(product_set(a, b), c), product_set(a, product_set(b, c))) << t;
    ASSERT_EQ(inverse_set(product_set(a, b)), product_set(inverse_set(b), inverse_set(a))) << t;
    ASSERT_EQ(inverse_set(inverse_set(a)), a) << t;
  }
}

TEST(SetProperties, TranslatesPreserveSize) {
  Gen gen(7);
  for (int t = 0; t < 300; ++t) {
    const GroupTag tag = t % 2 ? H : GroupTag::zd(3);
    const FiniteSubset f = gen.subset(tag, 50, 10);
    const GroupElement a = gen.element(tag, 1000);
    const FiniteSubset right = translate(f, a);
    const FiniteSubset left = left_translate(a, f);
    ASSERT_EQ(right.size(), f.size()) << t;
    ASSERT_EQ(left.size(), f.size()) << t;
    ASSERT_EQ(translate(right, inverse(a)), f) << t;
    ASSERT_EQ(right, product_set(f, FiniteSubset::singleton(a))) << t;
    ASSERT_EQ(left, product_set(FiniteSubset::singleton(a), f)) << t;
  }
}

TEST(SetProperties, UnionDifferenceCounts) {
  Gen gen(8);
  for (int t = 0; t < 300; ++t) {
    const FiniteSubset a = gen.subset(Z2, 40, 5);
    const FiniteSubset b = gen.subset(Z2, 40, 5);
    const std::size_t inter = intersection_size(a, b);
    ASSERT_EQ(set_union(a, b).size(), a.size() + b.size() - inter) << t;
    ASSERT_EQ(set_difference(a, b).size(), a.size() - inter) << t;
    ASSERT_EQ(symmetric_difference_size(a, b), oracle::sym_diff(vecs(a), vecs(b))) << t;
  }
}

TEST(FolnerProperties, DefectOfTranslatesIsInvariant) {
  Gen gen(9);
  for (int t = 0; t < 100; ++t) {
    const FiniteSubset k = gen.subset(H, 4, 2);
    const FiniteSubset f = gen.subset(H, 40, 4);
    const GroupElement a = gen.element(H, 50);
    // K (F a) = (K F) a, so right translation leaves the defect unchanged.
    ASSERT_EQ(folner_defect(k, translate(f, a)), folner_defect(k, f)) << t;
  }
}

TEST(RationalProperties, RoundTripAndDecimalParse) {
  Gen gen(10);
  for (int t = 0; t < 1000; ++t) {
    const Rational r(BigInt(gen.range(-1'000'000, 1'000'000)), BigInt(gen.range(1, 1'000'000)));
    ASSERT_EQ(parse_rational(to_string(r)), r) << t;
    const Coord whole = gen.range(0, 999);
    const Coord frac = gen.range(0, 999);
    char buf[32];
    std::snprintf(buf, sizeof buf, "%lld.%03lld", static_cast<long long>(whole), static_cast<long long>(frac));
    ASSERT_EQ(parse_rational(buf), Rational(BigInt(whole * 1000 + frac), BigInt(1000))) << buf;
  }
}

TEST(DistributionProperties, SamplesAvoidNullSymbols) {
  Gen gen(11);
  const Distribution d = exact({"0", "1/3", "0", "2/3", "0"});
  for (int t = 0; t < 10000; ++t) {
    const Symbol s = d.sample(gen.unit());
    ASSERT_TRUE(s == 1 || s == 3) << t;
  }
}

TEST(EntropyProperties, ChainRuleOnRandomSetsAndOrders) {
  Gen gen(12);
  const std::vector<RdsModel> models = {
      RdsModel::trivial_base_bernoulli(Z2, exact({"0.7", "0.3"})),
      RdsModel::random_alphabet_bernoulli(Z2, exact({"1/2", "1/2"}), {exact({"0.5", "0.5"}), exact({"0.9", "0.1"})}),
      RdsModel::markov_z({exact({"0.9", "0.1"}), exact({"0.2", "0.8"})}),
  };
  for (const RdsModel& m : models) {
    const DisintegratedMeasure mu(m);
    const PartitionSpec xi = PartitionSpec::zero_coordinate_of_x(m);
    for (int t = 0; t < 100; ++t) {
      const FiniteSubset f = gen.subset(m.tag(), 7, 5);
      std::vector<GroupElement> order(f.begin(), f.end());
      std::shuffle(order.begin(), order.end(), gen.engine);
      const SkewPoint p = m.sample_point(gen.engine());
      const ChainRuleResult r = chain_rule_check(mu, xi, order, p);
      ASSERT_LE(r.residual, 1e-9) << m.describe() << " " << t;
      ASSERT_NEAR(r.information, information(mu, xi, f, p), 1e-12) << t;
      for (double term : r.terms) ASSERT_GE(term, -1e-12) << t;
    }
  }
}

TEST(EntropyProperties, ConditioningReducesEntropy) {
  const RdsModel m = RdsModel::markov_z({exact({"0.9", "0.1"}), exact({"0.2", "0.8"})});
  const DisintegratedMeasure mu(m);
  const PartitionSpec xi = PartitionSpec::zero_coordinate_of_x(m);
  const ConvergenceTrace t = conditional_entropy_trace(mu, xi, box_folner(1, 12), {});
  const double h = fiber_entropy_closed_form(m, xi);
  EXPECT_NEAR(t.rows.front().estimate, oracle::entropy({2.0 / 3.0, 1.0 / 3.0}), 1e-12);
  for (std::size_t i = 1; i < t.rows.size(); ++i) {
    EXPECT_LE(t.rows[i].estimate, t.rows[i - 1].estimate + 1e-12) << i;
    EXPECT_GE(t.rows[i].estimate, h - 1e-9) << i;
  }
}

TEST(CoverProperties, GreedyInvariantsOnRandomInstances) {
  Gen gen(13);
  int solved = 0;
  for (int t = 0; t < 300; ++t) {
    const Coord width = gen.range(20, 80);
    const std::size_t levels = static_cast<std::size_t>(gen.range(1, 3));
    std::vector<FiniteSubset> shapes, centers;
    Coord side = gen.range(1, 3);
    for (std::size_t i = 0; i < levels; ++i) {
      shapes.push_back(FiniteSubset::cube(Z1, 0, side));
      std::vector<GroupElement> c;
      for (Coord a = 0; a + side <= width; ++a) {
        if (gen.unit() < 0.5) c.push_back(GroupElement::of(Z1, {a}));
      }
      if (c.empty()) c.push_back(GroupElement::of(Z1, {0}));
      centers.push_back(FiniteSubset(Z1, std::move(c)));
      side = side * 4 + gen.range(0, 2);
      if (side > width) break;
    }
    const Rational delta(BigInt(gen.range(1, 9)), BigInt(10));
    const CoverInstance inst = CoverInstance::lem11(Z1, shapes, {centers.begin(), centers.begin() + static_cast<std::ptrdiff_t>(shapes.size())},
                                                    FiniteSubset::cube(Z1, 0, width), delta, Rational(9, 10));
    if (!check_hypotheses(inst).pass()) continue;
    ++solved;
    const CoverSolution sol = greedy_cover(inst);
    ASSERT_EQ(recompute_multiplicity(inst, sol), sol.lambda) << t;
    ASSERT_LE(Rational(sol.total_size), (1 + delta) * sol.covered) << t;
    std::size_t sum = 0;
    for (const Selection& s : sol.selected) sum += inst.shapes[s.i][s.j].size();
    ASSERT_EQ(sum, sol.total_size) << t;
    ASSERT_TRUE(verify_lem11(inst, sol).blocks_ok) << t;
    ASSERT_EQ(greedy_cover(inst), sol) << t;
    // Certainty retention reproduces the greedy cover.
    SampleOptions all;
    all.retention = 1.0;
    ASSERT_EQ(sample_random_cover(inst, gen.engine(), all), sol) << t;
  }
  EXPECT_GT(solved, 100);
}

TEST(CoverProperties, RandomCoversKeepMultiplicityConsistent) {
  Gen gen(14);
  CoverInstance inst;
  inst.lemma = CoverLemma::kLem12;
  inst.tag = Z1;
  inst.shapes = {{FiniteSubset::cube(Z1, 0, 4)}, {FiniteSubset::cube(Z1, 0, 16)}};
  const FiniteSubset::AxisProgression small[] = {{0, 61, 4}};
  const FiniteSubset::AxisProgression large[] = {{0, 49, 16}};
  inst.centers = {{FiniteSubset::grid(Z1, small)}, {FiniteSubset::grid(Z1, large)}};
  inst.ambient = FiniteSubset::cube(Z1, 0, 64);
  inst.delta = Rational(1, 5);
  inst.k_set = FiniteSubset::cube(Z1, -15, 1);
  inst.alpha = 1;
  for (int t = 0; t < 200; ++t) {
    const CoverSolution sol = sample_random_cover(inst, gen.engine());
    ASSERT_EQ(recompute_multiplicity(inst, sol), sol.lambda) << t;
    ASSERT_LE(Rational(sol.total_size), (1 + inst.delta) * sol.covered) << t;
  }
}
