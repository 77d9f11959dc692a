#pragma once

// Configurations c in A^G over an infinite group, sampled lazily: the symbol
// at a coordinate is a pure function of the owning source's seed and the
// coordinate, so a configuration can be queried anywhere without ever being
// stored. Sources are immutable from the caller's point of view; the Markov
// source memoises its chain behind a mutex, so concurrent reads are safe.
//
// The group acts on configurations by right translation,
//   (g . c)_h = c_{h g},
// which is a left action: g2 . (g1 . c) = (g2 g1) . c.

#include <cstdint>
#include <memory>
#include <utility>
#include <vector>

#include "rdsmb/distribution.hpp"
#include "rdsmb/group.hpp"

namespace rdsmb {

class ConfigurationSource {
 public:
  virtual ~ConfigurationSource() = default;
  virtual GroupTag tag() const = 0;
  virtual std::size_t alphabet_size() const = 0;
  virtual Symbol at(const GroupElement& g) const = 0;
};

class SymbolicConfiguration {
 public:
  explicit SymbolicConfiguration(std::shared_ptr<const ConfigurationSource> source);

  GroupTag tag() const { return source_->tag(); }
  std::size_t alphabet_size() const { return source_->alphabet_size(); }

  Symbol at(const GroupElement& h) const { return source_->at(mul(h, offset_)); }

  // g . c
  SymbolicConfiguration shifted(const GroupElement& g) const;

  // Accumulated translation relative to the underlying source.
  const GroupElement& offset() const { return offset_; }
  const std::shared_ptr<const ConfigurationSource>& source() const { return source_; }

  bool agrees_on(const SymbolicConfiguration& other, const FiniteSubset& window) const;

 private:
  std::shared_ptr<const ConfigurationSource> source_;
  GroupElement offset_;
};

// Hash of (seed, coordinate) used for lazy product-measure sampling.
std::uint64_t coordinate_hash(std::uint64_t seed, const GroupElement& g);

// Independent coordinates, each distributed as `dist`.
SymbolicConfiguration iid_configuration(GroupTag tag, Distribution dist, std::uint64_t seed);

// x_g ~ by_symbol[base_g], independently over g given the base.
SymbolicConfiguration modulated_configuration(SymbolicConfiguration base,
                                              std::vector<Distribution> by_symbol,
                                              std::uint64_t seed);

// Stationary Markov chain on Z^1: x_0 ~ stationary, then extended forward
// with `rows` and backward with the time-reversed chain. x_i depends only on
// (seed, i), whatever order coordinates are queried in.
SymbolicConfiguration markov_configuration(std::vector<Distribution> rows, Distribution stationary,
                                           std::uint64_t seed);

SymbolicConfiguration constant_configuration(GroupTag tag, std::size_t alphabet, Symbol symbol);

// `base` with finitely many coordinates (in base's own frame) pinned.
SymbolicConfiguration with_known(SymbolicConfiguration base,
                                 std::vector<std::pair<GroupElement, Symbol>> known);

}  // namespace rdsmb
