#pragma once

// Foelner sequences and the two conditions the SMB theorem assumes of them:
//
//   nesting + size:   e in F_1, F_n subset of F_{n+1}, |F_n| > n
//   tempered:         |union_{k<n} F_k^{-1} F_n| <= C |F_n|
//
// Ratios are returned as exact rationals.

#include <cstddef>
#include <optional>
#include <vector>

#include "rdsmb/group.hpp"
#include "rdsmb/rational.hpp"

namespace rdsmb {

class FolnerSequence {
 public:
  FolnerSequence(GroupTag tag, std::vector<FiniteSubset> sets);

  GroupTag tag() const { return tag_; }
  std::size_t size() const { return sets_.size(); }
  // 1-based, as F_1, ..., F_N.
  const FiniteSubset& at(std::size_t n) const;
  const std::vector<FiniteSubset>& sets() const { return sets_; }

 private:
  GroupTag tag_;
  std::vector<FiniteSubset> sets_;
};

// F_n = [0, n)^d, n = 1..n_max.
FolnerSequence box_folner(int d, int n_max);
// F_n = [0, sides[n-1])^d. Useful on Z^1, where plain boxes have |F_n| = n.
FolnerSequence box_folner_sides(int d, const std::vector<Coord>& sides);
// F_n = {(a, b, c) : 0 <= a < n, 0 <= b < n, 0 <= c < n^2}, |F_n| = n^4.
FolnerSequence heisenberg_folner(int n_max);

// |K F symmetric-difference F| / |F|.
Rational folner_defect(const FiniteSubset& k, const FiniteSubset& f);

// |union_{k<n} F_k^{-1} F_n| / |F_n| for 2 <= n <= N.
Rational tempered_constant(const FolnerSequence& seq, std::size_t n);

struct FolnerValidation {
  bool identity_ok = false;
  bool nesting_ok = false;
  bool size_ok = false;
  std::optional<std::size_t> first_nesting_failure;  // n with F_n not inside F_{n+1}
  std::optional<std::size_t> first_size_failure;     // n with |F_n| <= n
  // tempered[n - 2] = tempered_constant(seq, n).
  std::vector<Rational> tempered;
  Rational max_tempered = 0;
  std::size_t max_tempered_at = 0;

  bool ok() const { return identity_ok && nesting_ok && size_ok; }
};

// The size condition |F_n| > n is checked from n = 2 on: F_1 = {e} is the
// standard first Foelner set and already satisfies e in F_1.
FolnerValidation validate_sequence(const FolnerSequence& seq);

}  // namespace rdsmb
