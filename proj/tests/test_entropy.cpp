#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <sstream>

#include "oracles.hpp"
#include "rdsmb/entropy.hpp"
#include "rdsmb/errors.hpp"

using namespace rdsmb;

namespace {

Distribution exact(std::initializer_list<const char*> p) {
  std::vector<Rational> v;
  for (const char* s : p) v.push_back(parse_rational(s));
  return Distribution::exact(std::move(v));
}

const GroupTag Z1 = GroupTag::zd(1);
const GroupTag Z2 = GroupTag::zd(2);

RdsModel bernoulli(GroupTag tag) { return RdsModel::trivial_base_bernoulli(tag, exact({"0.7", "0.3"})); }
RdsModel mixed(GroupTag tag) {
  return RdsModel::random_alphabet_bernoulli(tag, exact({"1/2", "1/2"}),
                                             {exact({"0.5", "0.5"}), exact({"0.9", "0.1"})});
}
RdsModel markov() { return RdsModel::markov_z({exact({"0.9", "0.1"}), exact({"0.2", "0.8"})}); }

GroupElement z1(Coord i) { return GroupElement::of(Z1, {i}); }

SymbolicConfiguration pinned(GroupTag tag, std::vector<std::pair<GroupElement, Symbol>> known) {
  return with_known(constant_configuration(tag, 2, 0), std::move(known));
}

}  // namespace

TEST(Shannon, Examples) {
  EXPECT_EQ(shannon_entropy(std::vector<double>{1.0}), 0.0);
  EXPECT_NEAR(shannon_entropy(std::vector<double>{0.5, 0.5}), std::log(2.0), 1e-15);
  EXPECT_NEAR(shannon_entropy(std::vector<double>{0.7, 0.3}), 0.610864, 5e-7);
  EXPECT_NEAR(shannon_entropy(std::vector<double>{0.7, 0.3, 0.0}), oracle::entropy({0.7, 0.3}), 1e-15);
  EXPECT_THROW(shannon_entropy(std::vector<double>{0.7, 0.4}), Error);
  EXPECT_THROW(shannon_entropy(std::vector<double>{1.2, -0.2}), Error);
}

TEST(ClosedForm, Examples) {
  const auto xi_of = [](const RdsModel& m) { return PartitionSpec::zero_coordinate_of_x(m); };
  const RdsModel u = RdsModel::trivial_base_bernoulli(Z2, Distribution::uniform(2));
  EXPECT_NEAR(fiber_entropy_closed_form(u, xi_of(u)), 0.693147, 5e-7);
  const RdsModel b = bernoulli(Z2);
  EXPECT_NEAR(fiber_entropy_closed_form(b, xi_of(b)), 0.610864, 5e-7);
  const RdsModel mx = mixed(Z2);
  EXPECT_NEAR(fiber_entropy_closed_form(mx, xi_of(mx)), 0.509115, 5e-7);
  const RdsModel mk = markov();
  EXPECT_NEAR(fiber_entropy_closed_form(mk, xi_of(mk)), 0.383523, 5e-7);
  PartitionSpec wrong = xi_of(b);
  wrong.atoms = 3;
  EXPECT_THROW(fiber_entropy_closed_form(b, wrong), Error);
}

TEST(Information, Examples) {
  const RdsModel u = RdsModel::trivial_base_bernoulli(Z2, Distribution::uniform(2));
  const DisintegratedMeasure mu_u(u);
  const PartitionSpec xi = PartitionSpec::zero_coordinate_of_x(u);
  EXPECT_NEAR(information(mu_u, xi, FiniteSubset::cube(Z2, 0, 2), u.sample_point(3)), std::log(16.0), 1e-14);

  const RdsModel b = bernoulli(Z2);
  const DisintegratedMeasure mu(b);
  // labels (0,0,1,0) on [0,2)^2 in sorted order (0,0),(0,1),(1,0),(1,1).
  const auto g = [](Coord a, Coord c) { return GroupElement::of(Z2, {a, c}); };
  const SkewPoint p{b.sample_base(0), pinned(Z2, {{g(1, 0), 1}})};
  EXPECT_NEAR(information(mu, xi, FiniteSubset::cube(Z2, 0, 2), p), 2.273998, 5e-7);
  EXPECT_NEAR(information(mu, xi, FiniteSubset::singleton(g(0, 0)), p), 0.356675, 5e-7);
  EXPECT_GE(information(mu, xi, FiniteSubset::singleton(g(0, 0)), p), 0.0);
}

TEST(Information, NullCellThrows) {
  const RdsModel m = RdsModel::trivial_base_bernoulli(Z1, exact({"1", "0"}));
  const DisintegratedMeasure mu(m);
  const SkewPoint p{m.sample_base(0), pinned(Z1, {{z1(0), 1}})};
  try {
    information(mu, PartitionSpec::zero_coordinate_of_x(m), FiniteSubset::singleton(z1(0)), p);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::kInfiniteInformation);
  }
}

TEST(ConditionalInformation, Examples) {
  const RdsModel mk = markov();
  const DisintegratedMeasure mu(mk);
  const PartitionSpec xi = PartitionSpec::zero_coordinate_of_x(mk);
  const SkewPoint p{mk.sample_base(0), constant_configuration(Z1, 2, 0)};
  EXPECT_NEAR(conditional_information(mu, xi, FiniteSubset::singleton(z1(1)), p), -std::log(0.9), 1e-14);
  EXPECT_NEAR(conditional_information(mu, xi, FiniteSubset(Z1), p),
              information(mu, xi, FiniteSubset::singleton(z1(0)), p), 1e-15);
  EXPECT_THROW(conditional_information(mu, xi, FiniteSubset::cube(Z1, 0, 2), p), Error);

  const RdsModel b = bernoulli(Z2);
  const DisintegratedMeasure mb(b);
  const SkewPoint q = b.sample_point(8);
  const PartitionSpec xb = PartitionSpec::zero_coordinate_of_x(b);
  EXPECT_NEAR(conditional_information(mb, xb, FiniteSubset::cube(Z2, 1, 3), q),
              information(mb, xb, FiniteSubset::singleton(GroupElement::identity(Z2)), q), 1e-13);
}

TEST(ChainRule, Examples) {
  const RdsModel b = bernoulli(Z1);
  const DisintegratedMeasure mb(b);
  const PartitionSpec xi = PartitionSpec::zero_coordinate_of_x(b);
  const SkewPoint p = b.sample_point(1);
  const std::vector<GroupElement> single = {z1(0)};
  EXPECT_EQ(chain_rule_check(mb, xi, single, p).residual, 0.0);
  const std::vector<GroupElement> two = {z1(0), z1(1)};
  const ChainRuleResult r = chain_rule_check(mb, xi, two, p);
  const double direct = -std::log(p.x.at(z1(0)) == 0 ? 0.7 : 0.3) - std::log(p.x.at(z1(1)) == 0 ? 0.7 : 0.3);
  EXPECT_NEAR(r.information, direct, 1e-15);
  EXPECT_LE(r.residual, 1e-15);

  const RdsModel mk = markov();
  const DisintegratedMeasure mm(mk);
  const std::vector<GroupElement> three = {z1(0), z1(1), z1(2)};
  const std::vector<std::vector<double>> pm = {{0.9, 0.1}, {0.2, 0.8}};
  const std::vector<double> pi = {2.0 / 3, 1.0 / 3};
  for (std::uint64_t s = 0; s < 10; ++s) {
    const SkewPoint q = mk.sample_point(s);
    const ChainRuleResult rm = chain_rule_check(mm, xi, three, q);
    std::vector<unsigned> labels;
    for (Coord i = 0; i < 3; ++i) labels.push_back(q.x.at(z1(i)));
    EXPECT_NEAR(rm.information, -std::log(oracle::markov_cylinder(pm, pi, {0, 1, 2}, labels)), 1e-12);
    EXPECT_LE(rm.residual, 1e-12);
    EXPECT_EQ(rm.terms.size(), 3u);
  }
  const std::vector<GroupElement> repeated = {z1(0), z1(0)};
  EXPECT_THROW(chain_rule_check(mb, xi, repeated, p), Error);
}

TEST(ChainRule, AllOrdersAgreeWithSingleOrder) {
  const RdsModel mk = markov();
  const DisintegratedMeasure mm(mk);
  const PartitionSpec xi = PartitionSpec::zero_coordinate_of_x(mk);
  const FiniteSubset f(Z1, {z1(0), z1(1), z1(3), z1(4)});
  const SkewPoint p = mk.sample_point(12);
  const ChainRuleSweep sweep = chain_rule_all_orders(mm, xi, f, p);
  EXPECT_EQ(sweep.orders, 24u);
  EXPECT_LE(sweep.max_residual, 1e-12);
  EXPECT_LE(sweep.total_spread, 1e-12);
  std::vector<GroupElement> order = {z1(3), z1(0), z1(4), z1(1)};
  EXPECT_LE(chain_rule_check(mm, xi, order, p).residual, 1e-12);
}

TEST(Trace, CsvFormat) {
  ConvergenceTrace t;
  t.add({1, 1, 0.5, 0.25, std::nullopt});
  t.add({2, 4, 1.0 / 3.0, std::nullopt, 0.125});
  EXPECT_THROW(t.add({2, 4, 0.0, std::nullopt, std::nullopt}), Error);
  std::ostringstream os;
  write_csv(os, t);
  EXPECT_EQ(os.str(),
            "n,folner_size,estimate,target,abs_error,std_error\n"
            "1,1,0.5,0.25,0.25,\n"
            "2,4,0.333333333333,,,0.125\n");
}

TEST(Smb, UniformBernoulliIsExactlyLog2) {
  const RdsModel u = RdsModel::trivial_base_bernoulli(Z2, Distribution::uniform(2));
  const DisintegratedMeasure mu(u);
  const ConvergenceTrace t =
      smb_trace(mu, PartitionSpec::zero_coordinate_of_x(u), box_folner(2, 8), {20, 5, 1});
  ASSERT_EQ(t.rows.size(), 8u);
  for (const TraceRow& r : t.rows) {
    EXPECT_NEAR(r.estimate, std::log(2.0), 1e-15);
    ASSERT_TRUE(r.std_error.has_value());
    EXPECT_EQ(*r.std_error, 0.0);
    EXPECT_EQ(r.folner_size, r.n * r.n);
  }
}

TEST(Smb, RequiresValidSequence) {
  const RdsModel b = bernoulli(Z1);
  const DisintegratedMeasure mu(b);
  const PartitionSpec xi = PartitionSpec::zero_coordinate_of_x(b);
  EXPECT_THROW(smb_trace(mu, xi, box_folner(1, 4), {10, 1, 1}), Error);
  EXPECT_THROW(smb_trace(mu, xi, box_folner_sides(1, {1, 8}), {0, 1, 1}), Error);
  EXPECT_THROW(smb_trace(mu, xi, box_folner(2, 3), {10, 1, 1}), Error);
}

TEST(Smb, ConvergesForAllModelsAndIsWorkerIndependent) {
  struct Case {
    RdsModel model;
    FolnerSequence seq;
  };
  std::vector<Coord> sides;
  for (Coord n = 1; n <= 8; ++n) sides.push_back(n == 1 ? 1 : 256 * n);
  std::vector<Case> cases = {{bernoulli(Z2), box_folner(2, 24)},
                             {mixed(Z2), box_folner(2, 24)},
                             {markov(), box_folner_sides(1, sides)},
                             {mixed(GroupTag::heisenberg()), heisenberg_folner(5)}};
  for (const Case& c : cases) {
    const DisintegratedMeasure mu(c.model);
    const PartitionSpec xi = PartitionSpec::zero_coordinate_of_x(c.model);
    const ConvergenceTrace one = smb_trace(mu, xi, c.seq, {40, 99, 1});
    const ConvergenceTrace three = smb_trace(mu, xi, c.seq, {40, 99, 3});
    std::ostringstream a, b;
    write_csv(a, one);
    write_csv(b, three);
    EXPECT_EQ(a.str(), b.str());
    const TraceRow& last = one.rows.back();
    EXPECT_LE(*last.abs_error(), 3.0 * *last.std_error + 1e-3) << c.model.describe();
    for (const TraceRow& r : one.rows) {
      EXPECT_GE(r.estimate, 0.0);
      EXPECT_LE(r.estimate, std::log(2.0) + 1e-12);
    }
  }
}

TEST(ConditionalEntropy, BernoulliIsExactlyH) {
  const RdsModel b = bernoulli(Z2);
  const DisintegratedMeasure mu(b);
  const ConvergenceTrace t =
      conditional_entropy_trace(mu, PartitionSpec::zero_coordinate_of_x(b), box_folner(2, 4), {100, 1, 1, true});
  for (const TraceRow& r : t.rows) EXPECT_NEAR(r.estimate, 0.610864302054893, 1e-9) << r.n;
}

TEST(ConditionalEntropy, MarkovIsEntropyRate) {
  const RdsModel mk = markov();
  const DisintegratedMeasure mu(mk);
  const ConvergenceTrace t =
      conditional_entropy_trace(mu, PartitionSpec::zero_coordinate_of_x(mk), box_folner(1, 12), {100, 1, 1, false});
  ASSERT_EQ(t.rows.size(), 12u);
  // n = 1: marginal entropy of pi.
  EXPECT_NEAR(t.rows[0].estimate, oracle::entropy({2.0 / 3, 1.0 / 3}), 1e-12);
  EXPECT_GE(t.rows[0].estimate, *t.rows[0].target);
  for (std::size_t k = 1; k < t.rows.size(); ++k) {
    EXPECT_NEAR(t.rows[k].estimate, *t.rows[k].target, 1e-12) << k;
    EXPECT_NEAR(t.rows[k].estimate, 0.383523, 5e-7) << k;
    EXPECT_LE(t.rows[k].estimate, t.rows[k - 1].estimate + 1e-12);
  }
  EXPECT_THROW(conditional_entropy_trace(mu, PartitionSpec::zero_coordinate_of_x(mk), box_folner(1, 24),
                                         {100, 1, 1, false}),
               Error);
}

TEST(ConditionalEntropy, MixedModelAveragesOverBase) {
  const RdsModel mx = mixed(Z2);
  const DisintegratedMeasure mu(mx);
  const ConvergenceTrace t =
      conditional_entropy_trace(mu, PartitionSpec::zero_coordinate_of_x(mx), box_folner(2, 3), {2000, 4, 1, true});
  for (const TraceRow& r : t.rows) {
    ASSERT_TRUE(r.std_error.has_value());
    EXPECT_LE(*r.abs_error(), 3.0 * *r.std_error + 1e-9) << r.n;
  }
}

TEST(ConditionalEntropy, MonteCarloFallback) {
  const RdsModel b = bernoulli(Z2);
  const DisintegratedMeasure mu(b);
  const ConvergenceTrace t =
      conditional_entropy_trace(mu, PartitionSpec::zero_coordinate_of_x(b), box_folner(2, 6), {4000, 2, 2, true});
  const TraceRow& last = t.rows.back();
  ASSERT_TRUE(last.std_error.has_value());
  EXPECT_LE(*last.abs_error(), 3.0 * *last.std_error);
}

TEST(Report, CarriesClosedForm) {
  const RdsModel b = bernoulli(Z2);
  const PartitionSpec xi = PartitionSpec::zero_coordinate_of_x(b);
  ConvergenceTrace t;
  t.add({1, 1, 0.6, 0.61, std::nullopt});
  const EntropyReport r = make_report(b, xi, EntropyMethod::kConditionalEntropy, t);
  EXPECT_NEAR(r.closed_form, 0.610864, 5e-7);
  EXPECT_GE(r.closed_form, 0.0);
  EXPECT_LE(r.closed_form, std::log(2.0));
  EXPECT_EQ(to_string(r.method), "conditional-entropy");
  EXPECT_EQ(r.estimates.size(), 1u);
}
