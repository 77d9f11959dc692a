#include "rdsmb/folner.hpp"

#include "rdsmb/errors.hpp"

namespace rdsmb {

FolnerSequence::FolnerSequence(GroupTag tag, std::vector<FiniteSubset> sets)
    : tag_(tag), sets_(std::move(sets)) {
  for (const auto& s : sets_) require_same_group(tag_, s.tag());
}

const FiniteSubset& FolnerSequence::at(std::size_t n) const {
  if (n < 1 || n > sets_.size()) {
    throw Error(ErrorKind::kOutOfRange,
                "Foelner index " + std::to_string(n) + " outside 1.." + std::to_string(sets_.size()));
  }
  return sets_[n - 1];
}

FolnerSequence box_folner(int d, int n_max) {
  if (n_max < 1) throw Error(ErrorKind::kInvalidArgument, "n_max must be >= 1");
  std::vector<Coord> sides;
  for (int n = 1; n <= n_max; ++n) sides.push_back(n);
  return box_folner_sides(d, sides);
}

FolnerSequence box_folner_sides(int d, const std::vector<Coord>& sides) {
  if (d < 1) throw Error(ErrorKind::kInvalidArgument, "dimension must be >= 1");
  if (sides.empty()) throw Error(ErrorKind::kInvalidArgument, "need at least one Foelner set");
  const GroupTag tag = GroupTag::zd(d);
  std::vector<FiniteSubset> sets;
  for (Coord side : sides) {
    if (side < 1) throw Error(ErrorKind::kInvalidArgument, "box sides must be >= 1");
    sets.push_back(FiniteSubset::cube(tag, 0, side));
  }
  return FolnerSequence(tag, std::move(sets));
}

FolnerSequence heisenberg_folner(int n_max) {
  if (n_max < 1) throw Error(ErrorKind::kInvalidArgument, "n_max must be >= 1");
  const GroupTag tag = GroupTag::heisenberg();
  std::vector<FiniteSubset> sets;
  for (Coord n = 1; n <= n_max; ++n) sets.push_back(FiniteSubset::box(tag, {0, 0, 0}, {n, n, n * n}));
  return FolnerSequence(tag, std::move(sets));
}

Rational folner_defect(const FiniteSubset& k, const FiniteSubset& f) {
  require_same_group(k.tag(), f.tag());
  if (f.empty()) throw Error(ErrorKind::kEmptySet, "Foelner defect of an empty set");
  const FiniteSubset kf = product_set(k, f);
  return Rational(static_cast<long long>(symmetric_difference_size(kf, f)),
                  static_cast<long long>(f.size()));
}

namespace {

Rational ratio(std::size_t num, std::size_t den) {
  return Rational(static_cast<long long>(num), static_cast<long long>(den));
}

}  // namespace

Rational tempered_constant(const FolnerSequence& seq, std::size_t n) {
  if (n < 2 || n > seq.size()) {
    throw Error(ErrorKind::kOutOfRange,
                "tempered constant needs 2 <= n <= " + std::to_string(seq.size()));
  }
  // union_k (F_k^-1 F_n) = (union_k F_k^-1) F_n
  FiniteSubset inverses(seq.tag());
  for (std::size_t k = 1; k < n; ++k) inverses = set_union(inverses, inverse_set(seq.at(k)));
  return ratio(product_set_size(inverses, seq.at(n)), seq.at(n).size());
}

FolnerValidation validate_sequence(const FolnerSequence& seq) {
  FolnerValidation v;
  const std::size_t count = seq.size();
  v.identity_ok = count > 0 && seq.at(1).contains(GroupElement::identity(seq.tag()));

  v.nesting_ok = true;
  for (std::size_t n = 1; n < count; ++n) {
    if (!seq.at(n).is_subset_of(seq.at(n + 1))) {
      v.nesting_ok = false;
      v.first_nesting_failure = n;
      break;
    }
  }

  v.size_ok = true;
  for (std::size_t n = 2; n <= count; ++n) {
    if (seq.at(n).size() <= n) {
      v.size_ok = false;
      v.first_size_failure = n;
      break;
    }
  }

  // Incremental union of inverses keeps the whole sweep linear in sum |F_k|.
  FiniteSubset inverses(seq.tag());
  for (std::size_t n = 2; n <= count; ++n) {
    inverses = set_union(inverses, inverse_set(seq.at(n - 1)));
    Rational c = ratio(product_set_size(inverses, seq.at(n)), seq.at(n).size());
    if (v.tempered.empty() || c > v.max_tempered) {
      v.max_tempered = c;
      v.max_tempered_at = n;
    }
    v.tempered.push_back(std::move(c));
  }
  return v;
}

}  // namespace rdsmb
