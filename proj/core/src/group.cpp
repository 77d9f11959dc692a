#include "rdsmb/group.hpp"

#include <algorithm>
#include <charconv>
#include <optional>
#include <ostream>
#include <unordered_map>

#include "rdsmb/errors.hpp"
#include "rdsmb/rng.hpp"

namespace rdsmb {
namespace {

Coord checked_add(Coord a, Coord b) {
  Coord out;
  if (__builtin_add_overflow(a, b, &out)) {
    throw Error(ErrorKind::kOverflow, "coordinate addition overflows int64");
  }
  return out;
}

Coord checked_sub(Coord a, Coord b) {
  Coord out;
  if (__builtin_sub_overflow(a, b, &out)) {
    throw Error(ErrorKind::kOverflow, "coordinate subtraction overflows int64");
  }
  return out;
}

Coord checked_mul(Coord a, Coord b) {
  Coord out;
  if (__builtin_mul_overflow(a, b, &out)) {
    throw Error(ErrorKind::kOverflow, "coordinate product overflows int64");
  }
  return out;
}

Coord checked_neg(Coord a) { return checked_sub(0, a); }

// ---------------------------------------------------------------------------
// Row-convolution product.
//
// Both supported group laws are additive on the leading rank-1 coordinates
// ("prefix") and shift the last coordinate by a prefix-only term:
//   Z^d:        last = c + c'
//   Heisenberg: last = c + c' + a * b'
// So a maximal run of consecutive last coordinates over a fixed prefix in E,
// multiplied by such a run in F, is again a run. For a result prefix R we
// collect the runs from every prefix pair (P, R - P), merge them, and emit.
// This turns |E||F| element products into (#prefixes of R) * (#prefixes of E)
// run products, which is what makes tempered constants of large boxes cheap.

using Prefix = std::array<Coord, kMaxRank - 1>;

struct PrefixHash {
  std::size_t operator()(const Prefix& p) const noexcept {
    std::uint64_t h = 0x51ed270b27a3f8d1ULL;
    for (Coord c : p) h = mix64(h ^ static_cast<std::uint64_t>(c));
    return static_cast<std::size_t>(h);
  }
};

struct Run {
  Coord lo;
  Coord hi;  // inclusive
};

struct PrefixRuns {
  Prefix prefix{};
  std::vector<Run> runs;
};

std::vector<PrefixRuns> rows_of(const FiniteSubset& s) {
  const int r = s.tag().rank;
  std::vector<PrefixRuns> rows;
  for (const GroupElement& g : s) {
    Prefix p{};
    for (int i = 0; i + 1 < r; ++i) p[static_cast<std::size_t>(i)] = g[i];
    const Coord last = g[r - 1];
    if (rows.empty() || rows.back().prefix != p) {
      rows.push_back({p, {{last, last}}});
    } else if (rows.back().runs.back().hi + 1 == last) {
      rows.back().runs.back().hi = last;
    } else {
      rows.back().runs.push_back({last, last});
    }
  }
  return rows;
}

template <typename Emit>
void for_each_product_row(const FiniteSubset& e, const FiniteSubset& f, Emit&& emit) {
  const GroupTag tag = e.tag();
  const int prefix_rank = tag.rank - 1;
  const bool heisenberg = tag.kind == GroupKind::kHeisenberg;

  const std::vector<PrefixRuns> e_rows = rows_of(e);
  const std::vector<PrefixRuns> f_rows = rows_of(f);
  std::unordered_map<Prefix, std::size_t, PrefixHash> f_index;
  f_index.reserve(f_rows.size());
  for (std::size_t i = 0; i < f_rows.size(); ++i) f_index.emplace(f_rows[i].prefix, i);

  Prefix lo{}, hi{};
  for (int i = 0; i < prefix_rank; ++i) {
    const auto k = static_cast<std::size_t>(i);
    Coord e_min = e_rows.front().prefix[k], e_max = e_min;
    for (const auto& row : e_rows) {
      e_min = std::min(e_min, row.prefix[k]);
      e_max = std::max(e_max, row.prefix[k]);
    }
    Coord f_min = f_rows.front().prefix[k], f_max = f_min;
    for (const auto& row : f_rows) {
      f_min = std::min(f_min, row.prefix[k]);
      f_max = std::max(f_max, row.prefix[k]);
    }
    lo[k] = checked_add(e_min, f_min);
    hi[k] = checked_add(e_max, f_max);
  }

  std::vector<Run> pending;
  Prefix target = lo;
  for (;;) {
    pending.clear();
    for (const auto& erow : e_rows) {
      Prefix q{};
      for (int i = 0; i < prefix_rank; ++i) {
        const auto k = static_cast<std::size_t>(i);
        q[k] = target[k] - erow.prefix[k];
      }
      auto it = f_index.find(q);
      if (it == f_index.end()) continue;
      const auto& frow = f_rows[it->second];
      const Coord shear = heisenberg ? checked_mul(erow.prefix[0], frow.prefix[1]) : 0;
      for (const Run& er : erow.runs) {
        for (const Run& fr : frow.runs) {
          pending.push_back({checked_add(checked_add(er.lo, fr.lo), shear),
                             checked_add(checked_add(er.hi, fr.hi), shear)});
        }
      }
    }
    if (!pending.empty()) {
      std::sort(pending.begin(), pending.end(),
                [](const Run& a, const Run& b) { return a.lo < b.lo; });
      std::size_t out = 0;
      for (std::size_t i = 1; i < pending.size(); ++i) {
        if (pending[i].lo <= pending[out].hi + 1) {
          pending[out].hi = std::max(pending[out].hi, pending[i].hi);
        } else {
          pending[++out] = pending[i];
        }
      }
      pending.resize(out + 1);
      emit(target, std::span<const Run>(pending));
    }
    // Odometer over the prefix bounding box, last prefix coordinate fastest,
    // so rows are emitted in lexicographic order.
    int i = prefix_rank - 1;
    for (; i >= 0; --i) {
      const auto k = static_cast<std::size_t>(i);
      if (target[k] < hi[k]) {
        ++target[k];
        break;
      }
      target[k] = lo[k];
    }
    if (i < 0) break;
  }
}

// Cost estimates in "inner loop iterations" for choosing the product route.
bool prefer_rows(const FiniteSubset& e, const FiniteSubset& f) {
  const double naive = static_cast<double>(e.size()) * static_cast<double>(f.size());
  if (naive <= 4096.0) return false;
  const int prefix_rank = e.tag().rank - 1;
  double box = 1.0;
  for (int i = 0; i < prefix_rank; ++i) {
    Coord e_min = e[0][i], e_max = e_min, f_min = f[0][i], f_max = f_min;
    for (const auto& g : e) e_min = std::min(e_min, g[i]), e_max = std::max(e_max, g[i]);
    for (const auto& g : f) f_min = std::min(f_min, g[i]), f_max = std::max(f_max, g[i]);
    box *= static_cast<double>(e_max - e_min) + static_cast<double>(f_max - f_min) + 1.0;
  }
  const double e_rows = static_cast<double>(rows_of(e).size());
  return box * e_rows < naive;
}

std::vector<GroupElement> naive_products(const FiniteSubset& e, const FiniteSubset& f) {
  std::vector<GroupElement> out;
  out.reserve(e.size() * f.size());
  for (const auto& a : e) {
    for (const auto& b : f) out.push_back(mul(a, b));
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

// Inclusive bounding box of s when s fills it exactly (Z^d only); the
// product of two such boxes is the box of summed bounds.
struct Bounds {
  std::array<Coord, kMaxRank> lo{};
  std::array<Coord, kMaxRank> hi{};
};

std::optional<Bounds> full_box(const FiniteSubset& s) {
  if (s.tag().kind != GroupKind::kZd || s.empty()) return std::nullopt;
  const auto r = static_cast<std::size_t>(s.tag().rank);
  Bounds b;
  for (std::size_t k = 0; k < r; ++k) b.lo[k] = b.hi[k] = s.elements().front()[static_cast<int>(k)];
  for (const GroupElement& g : s) {
    for (std::size_t k = 0; k < r; ++k) {
      b.lo[k] = std::min(b.lo[k], g[static_cast<int>(k)]);
      b.hi[k] = std::max(b.hi[k], g[static_cast<int>(k)]);
    }
  }
  double volume = 1.0;
  for (std::size_t k = 0; k < r; ++k) volume *= static_cast<double>(b.hi[k] - b.lo[k]) + 1.0;
  if (volume != static_cast<double>(s.size())) return std::nullopt;
  return b;
}

std::optional<Bounds> box_product(const FiniteSubset& e, const FiniteSubset& f) {
  const auto be = full_box(e);
  if (!be) return std::nullopt;
  const auto bf = full_box(f);
  if (!bf) return std::nullopt;
  Bounds out;
  for (std::size_t k = 0; k < static_cast<std::size_t>(e.tag().rank); ++k) {
    out.lo[k] = checked_add(be->lo[k], bf->lo[k]);
    out.hi[k] = checked_add(be->hi[k], bf->hi[k]);
  }
  return out;
}

}  // namespace

GroupTag GroupTag::zd(int d) {
  if (d < 1 || d > kMaxRank) {
    throw Error(ErrorKind::kInvalidArgument,
                "Z^d requires 1 <= d <= " + std::to_string(kMaxRank));
  }
  return {GroupKind::kZd, d};
}

std::string GroupTag::name() const {
  if (kind == GroupKind::kHeisenberg) return "heisenberg";
  return "zd:" + std::to_string(rank);
}

GroupTag GroupTag::parse(std::string_view text) {
  if (text == "heisenberg") return heisenberg();
  if (text.starts_with("zd:")) {
    int d = 0;
    const auto digits = text.substr(3);
    auto [ptr, ec] = std::from_chars(digits.data(), digits.data() + digits.size(), d);
    if (ec == std::errc() && ptr == digits.data() + digits.size()) return zd(d);
  }
  throw Error(ErrorKind::kInvalidArgument,
              "unknown group '" + std::string(text) + "' (expected zd:<d> or heisenberg)");
}

GroupElement GroupElement::identity(GroupTag tag) {
  GroupElement g;
  g.tag_ = tag;
  return g;
}

GroupElement GroupElement::of(GroupTag tag, std::span<const Coord> coords) {
  if (static_cast<int>(coords.size()) != tag.rank) {
    throw Error(ErrorKind::kInvalidArgument,
                "expected " + std::to_string(tag.rank) + " coordinates for " + tag.name() +
                    ", got " + std::to_string(coords.size()));
  }
  GroupElement g;
  g.tag_ = tag;
  std::copy(coords.begin(), coords.end(), g.coords_.begin());
  return g;
}

bool GroupElement::is_identity() const {
  return std::all_of(coords_.begin(), coords_.end(), [](Coord c) { return c == 0; });
}

Coord GroupElement::sup_norm() const {
  Coord m = 0;
  for (Coord c : coords()) m = std::max(m, c < 0 ? checked_neg(c) : c);
  return m;
}

std::size_t GroupElementHash::operator()(const GroupElement& g) const noexcept {
  std::uint64_t h = static_cast<std::uint64_t>(g.tag().kind) * 31u + static_cast<std::uint64_t>(g.rank());
  for (Coord c : g.coords()) h = mix64(h ^ static_cast<std::uint64_t>(c));
  return static_cast<std::size_t>(h);
}

std::ostream& operator<<(std::ostream& os, const GroupElement& g) {
  os << '(';
  for (int i = 0; i < g.rank(); ++i) {
    if (i) os << ',';
    os << g[i];
  }
  return os << ')';
}

void require_same_group(GroupTag a, GroupTag b) {
  if (a != b) {
    throw Error(ErrorKind::kTagMismatch, a.name() + " vs " + b.name());
  }
}

GroupElement mul(const GroupElement& g, const GroupElement& h) {
  require_same_group(g.tag(), h.tag());
  std::array<Coord, kMaxRank> c{};
  for (int i = 0; i < g.rank(); ++i) c[static_cast<std::size_t>(i)] = checked_add(g[i], h[i]);
  if (g.tag().kind == GroupKind::kHeisenberg) {
    c[2] = checked_add(c[2], checked_mul(g[0], h[1]));
  }
  return GroupElement::of(g.tag(), std::span<const Coord>(c.data(), static_cast<std::size_t>(g.rank())));
}

GroupElement inverse(const GroupElement& g) {
  std::array<Coord, kMaxRank> c{};
  for (int i = 0; i < g.rank(); ++i) c[static_cast<std::size_t>(i)] = checked_neg(g[i]);
  if (g.tag().kind == GroupKind::kHeisenberg) {
    // (a,b,c)^-1 = (-a, -b, ab - c)
    c[2] = checked_sub(checked_mul(g[0], g[1]), g[2]);
  }
  return GroupElement::of(g.tag(), std::span<const Coord>(c.data(), static_cast<std::size_t>(g.rank())));
}

FiniteSubset::FiniteSubset(GroupTag tag, std::vector<GroupElement> elements)
    : tag_(tag), elements_(std::move(elements)) {
  for (const auto& g : elements_) require_same_group(tag_, g.tag());
  std::sort(elements_.begin(), elements_.end());
  elements_.erase(std::unique(elements_.begin(), elements_.end()), elements_.end());
}

FiniteSubset FiniteSubset::from_sorted_unique(GroupTag tag, std::vector<GroupElement> elements) {
  FiniteSubset s(tag);
  s.elements_ = std::move(elements);
  return s;
}

FiniteSubset FiniteSubset::box(GroupTag tag, std::span<const Coord> lo, std::span<const Coord> hi) {
  if (static_cast<int>(lo.size()) != tag.rank || static_cast<int>(hi.size()) != tag.rank) {
    throw Error(ErrorKind::kInvalidArgument, "box corner rank does not match " + tag.name());
  }
  std::vector<AxisProgression> axes;
  for (std::size_t i = 0; i < lo.size(); ++i) axes.push_back({lo[i], hi[i], 1});
  return grid(tag, axes);
}

FiniteSubset FiniteSubset::cube(GroupTag tag, Coord lo, Coord hi) {
  std::vector<AxisProgression> axes(static_cast<std::size_t>(tag.rank), AxisProgression{lo, hi, 1});
  return grid(tag, axes);
}

FiniteSubset FiniteSubset::grid(GroupTag tag, std::span<const AxisProgression> axes) {
  if (static_cast<int>(axes.size()) != tag.rank) {
    throw Error(ErrorKind::kInvalidArgument, "grid rank does not match " + tag.name());
  }
  for (const auto& a : axes) {
    if (a.step < 1) throw Error(ErrorKind::kInvalidArgument, "grid step must be positive");
    if (a.hi <= a.lo) return FiniteSubset(tag);
  }
  std::vector<GroupElement> out;
  std::array<Coord, kMaxRank> c{};
  for (std::size_t i = 0; i < axes.size(); ++i) c[i] = axes[i].lo;
  for (;;) {
    out.push_back(GroupElement::of(tag, std::span<const Coord>(c.data(), axes.size())));
    int i = static_cast<int>(axes.size()) - 1;
    for (; i >= 0; --i) {
      const auto k = static_cast<std::size_t>(i);
      c[k] = checked_add(c[k], axes[k].step);
      if (c[k] < axes[k].hi) break;
      c[k] = axes[k].lo;
    }
    if (i < 0) break;
  }
  return from_sorted_unique(tag, std::move(out));
}

bool FiniteSubset::contains(const GroupElement& g) const {
  return g.tag() == tag_ && std::binary_search(elements_.begin(), elements_.end(), g);
}

std::size_t FiniteSubset::index_of(const GroupElement& g) const {
  auto it = std::lower_bound(elements_.begin(), elements_.end(), g);
  if (it == elements_.end() || *it != g) return elements_.size();
  return static_cast<std::size_t>(it - elements_.begin());
}

bool FiniteSubset::is_subset_of(const FiniteSubset& other) const {
  require_same_group(tag_, other.tag_);
  return std::includes(other.elements_.begin(), other.elements_.end(), elements_.begin(),
                       elements_.end());
}

FiniteSubset product_set(const FiniteSubset& e, const FiniteSubset& f) {
  require_same_group(e.tag(), f.tag());
  if (e.empty() || f.empty()) return FiniteSubset(e.tag());
  if (const auto b = box_product(e, f)) {
    const auto r = static_cast<std::size_t>(e.tag().rank);
    std::array<Coord, kMaxRank> end{};
    for (std::size_t k = 0; k < r; ++k) end[k] = checked_add(b->hi[k], 1);
    return FiniteSubset::box(e.tag(), std::span<const Coord>(b->lo.data(), r),
                             std::span<const Coord>(end.data(), r));
  }
  if (!prefer_rows(e, f)) return FiniteSubset::from_sorted_unique(e.tag(), naive_products(e, f));

  const GroupTag tag = e.tag();
  const auto prefix_rank = static_cast<std::size_t>(tag.rank - 1);
  std::vector<GroupElement> out;
  std::array<Coord, kMaxRank> c{};
  for_each_product_row(e, f, [&](const Prefix& prefix, std::span<const Run> runs) {
    std::copy(prefix.begin(), prefix.begin() + static_cast<std::ptrdiff_t>(prefix_rank), c.begin());
    for (const Run& r : runs) {
      for (Coord last = r.lo; last <= r.hi; ++last) {
        c[prefix_rank] = last;
        out.push_back(GroupElement::of(tag, std::span<const Coord>(c.data(), prefix_rank + 1)));
      }
    }
  });
  return FiniteSubset::from_sorted_unique(tag, std::move(out));
}

std::size_t product_set_size(const FiniteSubset& e, const FiniteSubset& f) {
  require_same_group(e.tag(), f.tag());
  if (e.empty() || f.empty()) return 0;
  if (const auto b = box_product(e, f)) {
    std::size_t total = 1;
    for (std::size_t k = 0; k < static_cast<std::size_t>(e.tag().rank); ++k) {
      total *= static_cast<std::size_t>(b->hi[k] - b->lo[k] + 1);
    }
    return total;
  }
  if (!prefer_rows(e, f)) return naive_products(e, f).size();
  std::size_t total = 0;
  for_each_product_row(e, f, [&](const Prefix&, std::span<const Run> runs) {
    for (const Run& r : runs) total += static_cast<std::size_t>(r.hi - r.lo + 1);
  });
  return total;
}

FiniteSubset inverse_set(const FiniteSubset& f) {
  std::vector<GroupElement> out;
  out.reserve(f.size());
  for (const auto& g : f) out.push_back(inverse(g));
  return FiniteSubset(f.tag(), std::move(out));
}

FiniteSubset translate(const FiniteSubset& f, const GroupElement& a) {
  require_same_group(f.tag(), a.tag());
  std::vector<GroupElement> out;
  out.reserve(f.size());
  for (const auto& g : f) out.push_back(mul(g, a));
  return FiniteSubset(f.tag(), std::move(out));
}

FiniteSubset left_translate(const GroupElement& a, const FiniteSubset& f) {
  require_same_group(f.tag(), a.tag());
  std::vector<GroupElement> out;
  out.reserve(f.size());
  for (const auto& g : f) out.push_back(mul(a, g));
  return FiniteSubset(f.tag(), std::move(out));
}

FiniteSubset set_union(const FiniteSubset& a, const FiniteSubset& b) {
  require_same_group(a.tag(), b.tag());
  std::vector<GroupElement> out;
  out.reserve(a.size() + b.size());
  std::set_union(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
  return FiniteSubset::from_sorted_unique(a.tag(), std::move(out));
}

FiniteSubset set_difference(const FiniteSubset& a, const FiniteSubset& b) {
  require_same_group(a.tag(), b.tag());
  std::vector<GroupElement> out;
  std::set_difference(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
  return FiniteSubset::from_sorted_unique(a.tag(), std::move(out));
}

std::size_t intersection_size(const FiniteSubset& a, const FiniteSubset& b) {
  require_same_group(a.tag(), b.tag());
  std::size_t n = 0;
  auto i = a.begin();
  auto j = b.begin();
  while (i != a.end() && j != b.end()) {
    if (*i < *j) {
      ++i;
    } else if (*j < *i) {
      ++j;
    } else {
      ++n, ++i, ++j;
    }
  }
  return n;
}

std::size_t symmetric_difference_size(const FiniteSubset& a, const FiniteSubset& b) {
  return a.size() + b.size() - 2 * intersection_size(a, b);
}

}  // namespace rdsmb
