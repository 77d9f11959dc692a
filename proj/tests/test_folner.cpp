#include <gtest/gtest.h>

#include "oracles.hpp"
#include "rdsmb/errors.hpp"
#include "rdsmb/folner.hpp"

using namespace rdsmb;

namespace {

Rational q(long long a, long long b) { return Rational(a, b); }

// |K F delta F| / |F| for Heisenberg boxes, from std::set products.
Rational heisenberg_defect_oracle(const std::set<oracle::Triple>& k, std::int64_t n) {
  const auto f = oracle::heis_box(n);
  const auto kf = oracle::product(k, f, oracle::heis_mul);
  return Rational(static_cast<long long>(oracle::sym_diff(kf, f)), static_cast<long long>(f.size()));
}

}  // namespace

TEST(Folner, BoxSequenceShapes) {
  const FolnerSequence s1 = box_folner(1, 3);
  EXPECT_EQ(s1.at(3), FiniteSubset::cube(GroupTag::zd(1), 0, 3));
  EXPECT_EQ(box_folner(2, 4).at(4).size(), 16u);
  EXPECT_THROW(box_folner(0, 3), Error);
  EXPECT_THROW(box_folner(2, 0), Error);
  EXPECT_THROW(s1.at(0), Error);
  EXPECT_THROW(s1.at(4), Error);
}

TEST(Folner, HeisenbergSequenceShapes) {
  const FolnerSequence s = heisenberg_folner(3);
  EXPECT_EQ(s.at(1), FiniteSubset::singleton(GroupElement::identity(GroupTag::heisenberg())));
  EXPECT_EQ(s.at(2).size(), 16u);
  EXPECT_EQ(s.at(3).size(), 81u);
  EXPECT_THROW(heisenberg_folner(0), Error);
}

TEST(Folner, DefectExamples) {
  const GroupTag z1 = GroupTag::zd(1), z2 = GroupTag::zd(2);
  const FiniteSubset f2 = FiniteSubset::cube(z2, 0, 10);
  EXPECT_EQ(folner_defect(FiniteSubset::singleton(GroupElement::identity(z2)), f2), 0);
  const FiniteSubset k2(z2, {GroupElement::identity(z2), GroupElement::of(z2, {1, 0})});
  EXPECT_EQ(folner_defect(k2, f2), q(1, 10));
  const FiniteSubset k1 = FiniteSubset::cube(z1, 0, 2);
  for (Coord n = 1; n <= 64; ++n) {
    const FiniteSubset f = FiniteSubset::cube(z1, 0, n);
    EXPECT_EQ(folner_defect(k1, f), q(1, n));
    // The translate-only boundary count |(F + 1) delta F| / |F|.
    EXPECT_EQ(Rational(static_cast<long long>(symmetric_difference_size(
                           translate(f, GroupElement::of(z1, {1})), f)),
                       n),
              n == 1 ? q(2, 1) : q(2, n));
  }
  EXPECT_THROW(folner_defect(k1, FiniteSubset(z1)), Error);
}

TEST(Folner, HeisenbergDefectMatchesEnumeration) {
  const GroupTag ht = GroupTag::heisenberg();
  const FiniteSubset k = FiniteSubset::singleton(GroupElement::of(ht, {1, 0, 0}));
  const FolnerSequence s = heisenberg_folner(4);
  const Rational d2 = folner_defect(k, s.at(2));
  const Rational d4 = folner_defect(k, s.at(4));
  EXPECT_EQ(d2, heisenberg_defect_oracle({{1, 0, 0}}, 2));
  EXPECT_EQ(d4, heisenberg_defect_oracle({{1, 0, 0}}, 4));
  EXPECT_LT(d4, d2);
  const FiniteSubset k2(ht, {GroupElement::of(ht, {0, 1, 0}), GroupElement::of(ht, {1, 1, 3})});
  EXPECT_EQ(folner_defect(k2, s.at(3)), heisenberg_defect_oracle({{0, 1, 0}, {1, 1, 3}}, 3));
}

TEST(Folner, TemperedExamples) {
  const FolnerSequence s = box_folner(1, 5);
  EXPECT_EQ(tempered_constant(s, 5), q(8, 5));
  EXPECT_EQ(tempered_constant(s, 2), 1);
  EXPECT_THROW(tempered_constant(s, 1), Error);
  EXPECT_THROW(tempered_constant(s, 6), Error);
}

TEST(Folner, TemperedMatchesBruteForce) {
  for (int d = 1; d <= 3; ++d) {
    const FolnerSequence s = box_folner(d, 6);
    for (std::size_t n = 2; n <= 6; ++n) {
      std::set<oracle::Vec> inv;
      for (std::size_t k = 1; k < n; ++k)
        for (const auto& v : oracle::cube(d, 0, static_cast<std::int64_t>(k))) inv.insert(oracle::neg(v));
      const auto prod = oracle::product(inv, oracle::cube(d, 0, static_cast<std::int64_t>(n)), oracle::add);
      const auto fn = static_cast<long long>(s.at(n).size());
      EXPECT_EQ(tempered_constant(s, n), Rational(static_cast<long long>(prod.size()), fn)) << d << " " << n;
    }
  }
  const FolnerSequence hs = heisenberg_folner(3);
  std::set<oracle::Triple> inv;
  for (const auto& t : oracle::heis_box(1)) inv.insert(oracle::heis_inv(t));
  for (const auto& t : oracle::heis_box(2)) inv.insert(oracle::heis_inv(t));
  const auto prod = oracle::product(inv, oracle::heis_box(3), oracle::heis_mul);
  EXPECT_EQ(tempered_constant(hs, 3), Rational(static_cast<long long>(prod.size()), 81));
}

TEST(Folner, ValidationExamples) {
  const FolnerValidation v = validate_sequence(box_folner(2, 8));
  EXPECT_TRUE(v.ok());
  EXPECT_LE(v.max_tempered, 4);
  ASSERT_EQ(v.tempered.size(), 7u);

  const GroupTag z2 = GroupTag::zd(2);
  const FolnerSequence shifted(z2, {FiniteSubset::singleton(GroupElement::of(z2, {1, 0})),
                                    FiniteSubset::cube(z2, 0, 2)});
  const FolnerValidation vs = validate_sequence(shifted);
  EXPECT_FALSE(vs.identity_ok);
  EXPECT_FALSE(vs.ok());

  // Plain boxes on Z^1 have |F_n| = n.
  const FolnerValidation v1 = validate_sequence(box_folner(1, 4));
  EXPECT_FALSE(v1.size_ok);
  ASSERT_TRUE(v1.first_size_failure.has_value());
  EXPECT_EQ(*v1.first_size_failure, 2u);
  EXPECT_TRUE(validate_sequence(box_folner_sides(1, {1, 16, 32, 48})).ok());

  const GroupTag z1 = GroupTag::zd(1);
  const FolnerSequence broken(z1, {FiniteSubset::cube(z1, 0, 1), FiniteSubset::cube(z1, 1, 4)});
  const FolnerValidation vb = validate_sequence(broken);
  EXPECT_FALSE(vb.nesting_ok);
  EXPECT_EQ(vb.first_nesting_failure, std::optional<std::size_t>(1));
}

TEST(Folner, ProvidedSequencesValidate) {
  for (int d = 2; d <= 3; ++d) {
    const FolnerValidation v = validate_sequence(box_folner(d, 64));
    EXPECT_TRUE(v.ok()) << d;
    EXPECT_LE(v.max_tempered, Rational(1 << d)) << d;
  }
  EXPECT_TRUE(validate_sequence(heisenberg_folner(6)).ok());
}

TEST(Folner, BoxDefectDecaysWithinBound) {
  // defect <= 2 d max ||k|| / n and non-increasing in n.
  const GroupTag z2 = GroupTag::zd(2);
  const FiniteSubset k(z2, {GroupElement::of(z2, {2, -1}), GroupElement::of(z2, {0, 1})});
  Rational prev = 1000;
  for (Coord n = 1; n <= 64; ++n) {
    const Rational d = folner_defect(k, FiniteSubset::cube(z2, 0, n));
    EXPECT_LE(d, Rational(2 * 2 * 2, n)) << n;
    EXPECT_LE(d, prev) << n;
    prev = d;
  }
}
