#pragma once

// Disintegrated invariant measures mu = integral of mu_omega dP(omega) for the
// provided models, partitions of Omega x X, and cells of joined pullback
// partitions
//
//   xi^F_omega(x) = the atom of  join_{g in F} F_{g,omega}^{-1} xi_{g omega}  containing x.
//
// Cell measures are closed-form rules, never estimates:
//   TrivialBaseBernoulli     prod_{g in F} p(l_g)
//   RandomAlphabetBernoulli  prod_{g in F} p^(omega_g)(l_g)
//   MarkovZ                  pi(l_{g_1}) prod_i P^{g_{i+1} - g_i}(l_{g_i}, l_{g_{i+1}})
// Each rule is available in double precision and, for models with exact
// parameters, as an exact rational.

#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "rdsmb/configuration.hpp"
#include "rdsmb/group.hpp"
#include "rdsmb/rational.hpp"
#include "rdsmb/rds.hpp"

namespace rdsmb {

// Largest number of labelings an exact enumeration will visit.
inline constexpr std::size_t kMaxEnumeration = 1'000'000;

struct PartitionSpec {
  enum class Kind { kZeroCoordinateOfX };

  Kind kind = Kind::kZeroCoordinateOfX;
  std::size_t atoms = 0;
  // Coordinates of x the label reads.
  FiniteSubset locality;

  // label(omega, x) = x_e; one atom per fiber symbol.
  static PartitionSpec zero_coordinate_of_x(const RdsModel& model);

  Symbol label(const SkewPoint& p) const;
  std::string name() const;
};

// A cell of the join over `domain`; labels[i] is the atom read at domain[i].
// With the zero-coordinate partition this is the cylinder {x : x_g = l_g}.
struct CellId {
  FiniteSubset domain;
  std::vector<Symbol> labels;

  Symbol label_at(const GroupElement& g) const;
  friend bool operator==(const CellId&, const CellId&) = default;
};

class DisintegratedMeasure {
 public:
  explicit DisintegratedMeasure(RdsModel model) : model_(std::move(model)) {}

  const RdsModel& model() const { return model_; }

  double cell_measure(const SymbolicConfiguration& omega, const CellId& cell) const;
  Rational exact_cell_measure(const SymbolicConfiguration& omega, const CellId& cell) const;

  // Same rules on a sorted domain given as a span, without building a CellId.
  double cylinder_measure(const SymbolicConfiguration& omega, std::span<const GroupElement> domain,
                          std::span<const Symbol> labels) const;
  Rational exact_cylinder_measure(const SymbolicConfiguration& omega,
                                  std::span<const GroupElement> domain,
                                  std::span<const Symbol> labels) const;

  // ln of the measure; -inf for a null cell. Use for large domains, where the
  // plain product underflows.
  double log_cell_measure(const SymbolicConfiguration& omega, const CellId& cell) const;
  double log_cylinder_measure(const SymbolicConfiguration& omega, std::span<const GroupElement> domain,
                              std::span<const Symbol> labels) const;

  // mu(R) = integral mu_omega(R_omega) dP for the cell-defined set R.
  double marginal_measure(const CellId& cell) const;

 private:
  RdsModel model_;
};

CellId cell_of(const RdsModel& model, const PartitionSpec& xi, const FiniteSubset& f,
               const SkewPoint& p);

double cell_measure(const DisintegratedMeasure& mu, const SymbolicConfiguration& omega,
                    const CellId& cell);

// Calls visit(labels) for every labeling of `length` coordinates with `atoms`
// symbols, in lexicographic order. Throws kEnumerationTooLarge past
// kMaxEnumeration labelings.
void for_each_labeling(std::size_t atoms, std::size_t length,
                       const std::function<void(std::span<const Symbol>)>& visit);

struct WeightedCell {
  CellId cell;
  double probability = 0.0;
};

std::vector<WeightedCell> enumerate_cells(const DisintegratedMeasure& mu,
                                          const SymbolicConfiguration& omega,
                                          const PartitionSpec& xi, const FiniteSubset& f);

// F_{g,omega} mu_omega == mu_{g omega} on every cell of xi^F over g omega:
// mu_{g omega}(C) is compared with mu_omega(F_{g,omega}^{-1} C). Exact rational
// equality when the model is exact, 1e-12 otherwise.
bool check_invariance(const DisintegratedMeasure& mu, const GroupElement& g,
                      const SymbolicConfiguration& omega, const PartitionSpec& xi,
                      const FiniteSubset& f);

struct DisintegrationRow {
  std::vector<Symbol> labels;
  double estimate = 0.0;
  double std_error = 0.0;
  double closed_form = 0.0;
  bool within_3se = false;
};

struct DisintegrationReport {
  std::size_t samples = 0;
  std::vector<DisintegrationRow> rows;
  bool pass() const;
};

// Monte Carlo check of mu(R) = integral mu_omega(R_omega) dP over `samples`
// base draws, for every cell R of xi^F.
DisintegrationReport check_disintegration(const DisintegratedMeasure& mu, const PartitionSpec& xi,
                                          const FiniteSubset& f, std::size_t samples,
                                          std::uint64_t seed);

}  // namespace rdsmb
