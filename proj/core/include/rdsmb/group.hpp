#pragma once

// Exact arithmetic in the two discrete amenable groups used throughout the
// library: the free abelian groups Z^d and the discrete Heisenberg group
// H_3(Z), written as integer triples (a, b, c) with
//
//   (a, b, c) * (a', b', c') = (a + a', b + b', c + c' + a * b').
//
// Every element carries its GroupTag; mixing tags is an error. Coordinate
// arithmetic is checked and throws Error(kOverflow) instead of wrapping.

#include <array>
#include <compare>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <initializer_list>
#include <iosfwd>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace rdsmb {

using Coord = std::int64_t;

inline constexpr int kMaxRank = 4;

enum class GroupKind : std::uint8_t { kZd, kHeisenberg };

struct GroupTag {
  GroupKind kind = GroupKind::kZd;
  // Number of integer coordinates: d for Z^d, 3 for Heisenberg.
  int rank = 1;

  static GroupTag zd(int d);
  static GroupTag heisenberg() { return {GroupKind::kHeisenberg, 3}; }

  // "zd:2", "heisenberg"; accepted back by parse().
  std::string name() const;
  static GroupTag parse(std::string_view text);

  friend auto operator<=>(const GroupTag&, const GroupTag&) = default;
};

class GroupElement {
 public:
  // Identity of Z^1.
  GroupElement() = default;

  static GroupElement identity(GroupTag tag);
  static GroupElement of(GroupTag tag, std::span<const Coord> coords);
  static GroupElement of(GroupTag tag, std::initializer_list<Coord> coords) {
    return of(tag, std::span<const Coord>(coords.begin(), coords.size()));
  }

  GroupTag tag() const { return tag_; }
  int rank() const { return tag_.rank; }
  Coord operator[](int i) const { return coords_[static_cast<std::size_t>(i)]; }
  std::span<const Coord> coords() const {
    return {coords_.data(), static_cast<std::size_t>(tag_.rank)};
  }

  bool is_identity() const;
  // max_i |coord_i|; used as the word-length proxy of the Bowen metric.
  Coord sup_norm() const;

  // Lexicographic on (tag, coords).
  friend auto operator<=>(const GroupElement&, const GroupElement&) = default;

 private:
  GroupTag tag_{};
  std::array<Coord, kMaxRank> coords_{};
};

struct GroupElementHash {
  std::size_t operator()(const GroupElement& g) const noexcept;
};

std::ostream& operator<<(std::ostream& os, const GroupElement& g);

// Throws Error(kTagMismatch) unless a and b live in the same group.
void require_same_group(GroupTag a, GroupTag b);

GroupElement mul(const GroupElement& g, const GroupElement& h);
GroupElement inverse(const GroupElement& g);

// Sorted, duplicate-free finite subset of one group. The empty subset still
// remembers its group so that tag checks stay meaningful.
class FiniteSubset {
 public:
  using const_iterator = std::vector<GroupElement>::const_iterator;

  explicit FiniteSubset(GroupTag tag = {}) : tag_(tag) {}
  FiniteSubset(GroupTag tag, std::vector<GroupElement> elements);
  FiniteSubset(GroupTag tag, std::initializer_list<GroupElement> elements)
      : FiniteSubset(tag, std::vector<GroupElement>(elements)) {}

  static FiniteSubset singleton(const GroupElement& g) { return FiniteSubset(g.tag(), {g}); }

  // Coordinate box prod_i [lo_i, hi_i) (half-open), for either group.
  static FiniteSubset box(GroupTag tag, std::span<const Coord> lo, std::span<const Coord> hi);
  static FiniteSubset box(GroupTag tag, std::initializer_list<Coord> lo,
                          std::initializer_list<Coord> hi) {
    return box(tag, std::span<const Coord>(lo.begin(), lo.size()),
               std::span<const Coord>(hi.begin(), hi.size()));
  }
  // Cubical box [lo, hi)^rank.
  static FiniteSubset cube(GroupTag tag, Coord lo, Coord hi);

  struct AxisProgression {
    Coord lo = 0;
    Coord hi = 0;  // exclusive
    Coord step = 1;
  };
  // Cartesian product of arithmetic progressions, one per coordinate.
  static FiniteSubset grid(GroupTag tag, std::span<const AxisProgression> axes);

  GroupTag tag() const { return tag_; }
  std::size_t size() const { return elements_.size(); }
  bool empty() const { return elements_.empty(); }
  const_iterator begin() const { return elements_.begin(); }
  const_iterator end() const { return elements_.end(); }
  const GroupElement& operator[](std::size_t i) const { return elements_[i]; }
  std::span<const GroupElement> elements() const { return elements_; }

  bool contains(const GroupElement& g) const;
  // Position of g in the sorted element list, or size() when absent.
  std::size_t index_of(const GroupElement& g) const;
  bool is_subset_of(const FiniteSubset& other) const;

  friend bool operator==(const FiniteSubset&, const FiniteSubset&) = default;

  // Caller guarantees `elements` is strictly increasing and tagged `tag`.
  static FiniteSubset from_sorted_unique(GroupTag tag, std::vector<GroupElement> elements);

 private:
  GroupTag tag_;
  std::vector<GroupElement> elements_;
};

// {e * f : e in E, f in F}. Empty if either factor is empty.
FiniteSubset product_set(const FiniteSubset& e, const FiniteSubset& f);
// |E F| without materialising the product.
std::size_t product_set_size(const FiniteSubset& e, const FiniteSubset& f);
// {f^-1 : f in F}.
FiniteSubset inverse_set(const FiniteSubset& f);
// Right translate {f * a : f in F}.
FiniteSubset translate(const FiniteSubset& f, const GroupElement& a);
// Left translate {a * f : f in F}.
FiniteSubset left_translate(const GroupElement& a, const FiniteSubset& f);

FiniteSubset set_union(const FiniteSubset& a, const FiniteSubset& b);
FiniteSubset set_difference(const FiniteSubset& a, const FiniteSubset& b);
std::size_t intersection_size(const FiniteSubset& a, const FiniteSubset& b);
std::size_t symmetric_difference_size(const FiniteSubset& a, const FiniteSubset& b);

}  // namespace rdsmb
