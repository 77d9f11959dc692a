#include "rdsmb/configuration.hpp"

#include <algorithm>
#include <mutex>
#include <unordered_map>

#include "rdsmb/errors.hpp"
#include "rdsmb/rng.hpp"

namespace rdsmb {
namespace {

class IidSource final : public ConfigurationSource {
 public:
  IidSource(GroupTag tag, Distribution dist, std::uint64_t seed)
      : tag_(tag), dist_(std::move(dist)), seed_(seed) {}

  GroupTag tag() const override { return tag_; }
  std::size_t alphabet_size() const override { return dist_.size(); }
  Symbol at(const GroupElement& g) const override {
    return dist_.sample(to_unit(coordinate_hash(seed_, g)));
  }

 private:
  GroupTag tag_;
  Distribution dist_;
  std::uint64_t seed_;
};

class ModulatedSource final : public ConfigurationSource {
 public:
  ModulatedSource(SymbolicConfiguration base, std::vector<Distribution> by_symbol, std::uint64_t seed)
      : base_(std::move(base)), by_symbol_(std::move(by_symbol)), seed_(seed) {
    if (by_symbol_.size() != base_.alphabet_size()) {
      throw Error(ErrorKind::kInvalidArgument, "need one fiber distribution per base symbol");
    }
    for (const auto& d : by_symbol_) {
      if (d.size() != by_symbol_.front().size()) {
        throw Error(ErrorKind::kInvalidArgument, "fiber distributions must share one alphabet");
      }
    }
  }

  GroupTag tag() const override { return base_.tag(); }
  std::size_t alphabet_size() const override { return by_symbol_.front().size(); }
  Symbol at(const GroupElement& g) const override {
    return by_symbol_[base_.at(g)].sample(to_unit(coordinate_hash(seed_, g)));
  }

 private:
  SymbolicConfiguration base_;
  std::vector<Distribution> by_symbol_;
  std::uint64_t seed_;
};

class MarkovSource final : public ConfigurationSource {
 public:
  // Memoised window is capped so that a runaway query fails loudly.
  static constexpr Coord kMaxExtent = Coord{1} << 26;

  MarkovSource(std::vector<Distribution> rows, Distribution stationary, std::uint64_t seed)
      : rows_(std::move(rows)), stationary_(std::move(stationary)), seed_(seed) {
    const std::size_t k = rows_.size();
    if (stationary_.size() != k) {
      throw Error(ErrorKind::kInvalidArgument, "stationary vector size does not match transition matrix");
    }
    // Time reversal: R_ij = pi_j P_ji / pi_i.
    for (std::size_t i = 0; i < k; ++i) {
      if (rows_[i].size() != k) throw Error(ErrorKind::kInvalidArgument, "transition matrix must be square");
      std::vector<double> r(k);
      if (stationary_[i] > 0.0) {
        double sum = 0.0;
        for (std::size_t j = 0; j < k; ++j) sum += r[j] = stationary_[j] * rows_[j][i] / stationary_[i];
        for (double& v : r) v /= sum;
      } else {
        std::fill(r.begin(), r.end(), 1.0 / static_cast<double>(k));
      }
      reversed_.push_back(Distribution::approximate(std::move(r)));
    }
  }

  GroupTag tag() const override { return GroupTag::zd(1); }
  std::size_t alphabet_size() const override { return rows_.size(); }

  Symbol at(const GroupElement& g) const override {
    const Coord i = g[0];
    if (i >= kMaxExtent || i <= -kMaxExtent) {
      throw Error(ErrorKind::kOutOfRange, "Markov configuration queried too far from the origin");
    }
    std::lock_guard lock(mutex_);
    if (forward_.empty()) forward_.push_back(stationary_.sample(uniform(0)));
    if (i >= 0) {
      while (static_cast<Coord>(forward_.size()) <= i) {
        const auto next = static_cast<Coord>(forward_.size());
        forward_.push_back(rows_[forward_.back()].sample(uniform(next)));
      }
      return forward_[static_cast<std::size_t>(i)];
    }
    const auto k = static_cast<std::size_t>(-i - 1);
    while (backward_.size() <= k) {
      const Symbol prev = backward_.empty() ? forward_.front() : backward_.back();
      const Coord next = -static_cast<Coord>(backward_.size()) - 1;
      backward_.push_back(reversed_[prev].sample(uniform(next)));
    }
    return backward_[k];
  }

 private:
  double uniform(Coord i) const {
    return to_unit(coordinate_hash(seed_, GroupElement::of(GroupTag::zd(1), {i})));
  }

  std::vector<Distribution> rows_;
  std::vector<Distribution> reversed_;
  Distribution stationary_;
  std::uint64_t seed_;
  mutable std::mutex mutex_;
  mutable std::vector<Symbol> forward_;   // x_0, x_1, ...
  mutable std::vector<Symbol> backward_;  // x_-1, x_-2, ...
};

class ConstantSource final : public ConfigurationSource {
 public:
  ConstantSource(GroupTag tag, std::size_t alphabet, Symbol symbol)
      : tag_(tag), alphabet_(alphabet), symbol_(symbol) {
    if (symbol >= alphabet) throw Error(ErrorKind::kInvalidArgument, "symbol outside alphabet");
  }
  GroupTag tag() const override { return tag_; }
  std::size_t alphabet_size() const override { return alphabet_; }
  Symbol at(const GroupElement&) const override { return symbol_; }

 private:
  GroupTag tag_;
  std::size_t alphabet_;
  Symbol symbol_;
};

class KnownSource final : public ConfigurationSource {
 public:
  KnownSource(SymbolicConfiguration base, std::vector<std::pair<GroupElement, Symbol>> known)
      : base_(std::move(base)) {
    for (auto& [g, s] : known) {
      require_same_group(base_.tag(), g.tag());
      if (s >= base_.alphabet_size()) throw Error(ErrorKind::kInvalidArgument, "symbol outside alphabet");
      known_[g] = s;
    }
  }
  GroupTag tag() const override { return base_.tag(); }
  std::size_t alphabet_size() const override { return base_.alphabet_size(); }
  Symbol at(const GroupElement& g) const override {
    auto it = known_.find(g);
    return it != known_.end() ? it->second : base_.at(g);
  }

 private:
  SymbolicConfiguration base_;
  std::unordered_map<GroupElement, Symbol, GroupElementHash> known_;
};

}  // namespace

SymbolicConfiguration::SymbolicConfiguration(std::shared_ptr<const ConfigurationSource> source)
    : source_(std::move(source)), offset_(GroupElement::identity(source_->tag())) {}

SymbolicConfiguration SymbolicConfiguration::shifted(const GroupElement& g) const {
  SymbolicConfiguration out = *this;
  out.offset_ = mul(g, offset_);
  return out;
}

bool SymbolicConfiguration::agrees_on(const SymbolicConfiguration& other,
                                      const FiniteSubset& window) const {
  require_same_group(tag(), other.tag());
  return std::all_of(window.begin(), window.end(),
                     [&](const GroupElement& g) { return at(g) == other.at(g); });
}

std::uint64_t coordinate_hash(std::uint64_t seed, const GroupElement& g) {
  std::uint64_t h = mix64(seed ^ 0x6a09e667f3bcc909ULL);
  for (Coord c : g.coords()) h = mix64(h + kGoldenGamma + static_cast<std::uint64_t>(c));
  return h;
}

SymbolicConfiguration iid_configuration(GroupTag tag, Distribution dist, std::uint64_t seed) {
  return SymbolicConfiguration(std::make_shared<IidSource>(tag, std::move(dist), seed));
}

SymbolicConfiguration modulated_configuration(SymbolicConfiguration base,
                                              std::vector<Distribution> by_symbol,
                                              std::uint64_t seed) {
  return SymbolicConfiguration(
      std::make_shared<ModulatedSource>(std::move(base), std::move(by_symbol), seed));
}

SymbolicConfiguration markov_configuration(std::vector<Distribution> rows, Distribution stationary,
                                           std::uint64_t seed) {
  return SymbolicConfiguration(
      std::make_shared<MarkovSource>(std::move(rows), std::move(stationary), seed));
}

SymbolicConfiguration constant_configuration(GroupTag tag, std::size_t alphabet, Symbol symbol) {
  return SymbolicConfiguration(std::make_shared<ConstantSource>(tag, alphabet, symbol));
}

SymbolicConfiguration with_known(SymbolicConfiguration base,
                                 std::vector<std::pair<GroupElement, Symbol>> known) {
  return SymbolicConfiguration(std::make_shared<KnownSource>(std::move(base), std::move(known)));
}

}  // namespace rdsmb
