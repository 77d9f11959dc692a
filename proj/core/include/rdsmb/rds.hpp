#pragma once

// Random dynamical systems over a discrete group G.
//
// A model fixes a base system (Omega = B^G with a product measure P, acted on
// by shifts) and a fiber-map cocycle F_{g,omega} on X = A^G. All three
// provided models use the shift x -> g . x as fiber map, independent of
// omega; the base enters through the fiber measures mu_omega instead:
//
//   TrivialBaseBernoulli     |B| = 1, mu_omega = p^G
//   RandomAlphabetBernoulli  mu_omega = prod_h p^(omega_h)
//   MarkovZ                  G = Z, |B| = 1, mu_omega = stationary Markov chain
//
// The skew product is Theta_g(omega, x) = (g . omega, F_{g,omega} x).

#include <cstdint>
#include <functional>
#include <memory>
#include <string_view>
#include <vector>

#include "rdsmb/configuration.hpp"
#include "rdsmb/distribution.hpp"
#include "rdsmb/group.hpp"
#include "rdsmb/rational.hpp"

namespace rdsmb {

enum class ModelKind { kTrivialBaseBernoulli, kRandomAlphabetBernoulli, kMarkovZ };

std::string_view to_string(ModelKind kind);

struct SkewPoint {
  SymbolicConfiguration omega;
  SymbolicConfiguration x;
};

// Row-major square matrix.
template <typename T>
struct SquareMatrix {
  std::size_t n = 0;
  std::vector<T> a;

  const T& operator()(std::size_t i, std::size_t j) const { return a[i * n + j]; }
  T& operator()(std::size_t i, std::size_t j) { return a[i * n + j]; }
};

class RdsModel {
 public:
  // Longest gap between consecutive coordinates for which Markov cell
  // measures marginalise via precomputed transition powers.
  static constexpr int kMaxMarkovGap = 64;

  static RdsModel trivial_base_bernoulli(GroupTag tag, Distribution fiber);
  static RdsModel random_alphabet_bernoulli(GroupTag tag, Distribution base,
                                            std::vector<Distribution> fiber_by_base);
  static RdsModel markov_z(std::vector<Distribution> transition_rows);

  ModelKind kind() const { return kind_; }
  GroupTag tag() const { return tag_; }
  std::size_t base_alphabet() const { return base_.size(); }
  std::size_t fiber_alphabet() const { return fiber_.front().size(); }

  const Distribution& base_distribution() const { return base_; }
  // Fiber distribution attached to a base symbol. Ignores the symbol for the
  // trivial-base model; not meaningful for MarkovZ (use transition()).
  const Distribution& fiber_distribution(Symbol base_symbol = 0) const;
  const std::vector<Distribution>& fiber_distributions() const { return fiber_; }

  // MarkovZ only.
  const std::vector<Distribution>& transition() const;
  const Distribution& stationary() const;
  // P^k for 1 <= k <= kMaxMarkovGap.
  const SquareMatrix<double>& transition_power(int k) const;
  const SquareMatrix<Rational>& exact_transition_power(int k) const;

  // True when every parameter is an exact rational distribution, so cell
  // measures can be evaluated exactly.
  bool is_exact() const { return exact_; }

  // Whether mu_omega actually varies with omega.
  bool fiber_measure_depends_on_base() const { return kind_ == ModelKind::kRandomAlphabetBernoulli; }

  SymbolicConfiguration sample_base(std::uint64_t seed) const;
  SymbolicConfiguration sample_fiber(const SymbolicConfiguration& omega, std::uint64_t seed) const;
  // omega from stream_seed(seed, 0), x from stream_seed(seed, 1).
  SkewPoint sample_point(std::uint64_t seed) const;

  std::string describe() const;

 private:
  struct MarkovData {
    std::vector<Distribution> rows;
    Distribution stationary;
    std::vector<SquareMatrix<double>> powers;        // powers[k-1] = P^k
    std::vector<SquareMatrix<Rational>> exact_powers;  // empty when inexact
  };

  RdsModel() = default;

  ModelKind kind_ = ModelKind::kTrivialBaseBernoulli;
  GroupTag tag_{};
  Distribution base_;
  std::vector<Distribution> fiber_;
  std::shared_ptr<const MarkovData> markov_;
  bool exact_ = false;
};

void require_compatible(const RdsModel& model, const SymbolicConfiguration& c);

// g . omega, with (g . omega)_h = omega_{h g}.
SymbolicConfiguration base_action(const RdsModel& model, const GroupElement& g,
                                  const SymbolicConfiguration& omega);

// F_{g,omega} x; the shift g . x for every provided model.
SymbolicConfiguration fiber_map(const RdsModel& model, const GroupElement& g,
                                const SymbolicConfiguration& omega, const SymbolicConfiguration& x);

SkewPoint skew(const RdsModel& model, const GroupElement& g, const SkewPoint& p);

using FiberMap = std::function<SymbolicConfiguration(
    const GroupElement& g, const SymbolicConfiguration& omega, const SymbolicConfiguration& x)>;

// F_{g2, g1 omega} o F_{g1, omega} == F_{g2 g1, omega} on every coordinate of
// `window`. The FiberMap overload accepts an arbitrary (e.g. corrupted) map.
bool check_cocycle(const RdsModel& model, const GroupElement& g1, const GroupElement& g2,
                   const SkewPoint& p, const FiniteSubset& window);
bool check_cocycle(const RdsModel& model, const FiberMap& fiber, const GroupElement& g1,
                   const GroupElement& g2, const SkewPoint& p, const FiniteSubset& window);

inline constexpr int kDefaultBowenRadius = 16;

// Base metric on A^G: d(x, y) = 2^-r with r the smallest sup-norm of a
// coordinate where x and y differ, searched within sup-norm <= radius
// (0 when they agree there).
double symbolic_distance(const SymbolicConfiguration& x, const SymbolicConfiguration& y,
                         int radius = kDefaultBowenRadius);

// max_{s in E} d(F_{s,omega} x, F_{s,omega} y). A point y lies in the open
// Bowen ball of radius eps around x iff this is < eps.
double bowen_distance(const RdsModel& model, const FiniteSubset& e, const SymbolicConfiguration& omega,
                      const SymbolicConfiguration& x, const SymbolicConfiguration& y,
                      int radius = kDefaultBowenRadius);

}  // namespace rdsmb
