#include "rdsmb/fibered_measure.hpp"

#include <algorithm>
#include <cmath>
#include <type_traits>

#include "rdsmb/errors.hpp"
#include "rdsmb/rng.hpp"

namespace rdsmb {
namespace {

// Accumulation policies: plain double, exact rational, or natural log
// (products of thousands of factors underflow a double).
struct Linear {
  using Value = double;
  static Value one() { return 1.0; }
  static Value factor(double p) { return p; }
  static void combine(Value& v, Value f) { v *= f; }
};

struct Exact {
  using Value = Rational;
  static Value one() { return Rational(1); }
  static void combine(Value& v, const Value& f) { v *= f; }
};

struct Log {
  using Value = double;
  static Value one() { return 0.0; }
  static Value factor(double p) { return std::log(p); }
  static void combine(Value& v, Value f) { v += f; }
};

template <typename Acc>
typename Acc::Value prob(const Distribution& d, Symbol s) {
  if constexpr (std::is_same_v<Acc, Exact>) {
    return d.exact_values()[s];
  } else {
    return Acc::factor(d[s]);
  }
}

template <typename Acc>
typename Acc::Value power_entry(const RdsModel& m, int gap, Symbol i, Symbol j) {
  if constexpr (std::is_same_v<Acc, Exact>) {
    return m.exact_transition_power(gap)(i, j);
  } else {
    return Acc::factor(m.transition_power(gap)(i, j));
  }
}

template <typename Acc>
typename Acc::Value cylinder(const RdsModel& m, const SymbolicConfiguration& omega,
                             std::span<const GroupElement> domain, std::span<const Symbol> labels) {
  if (domain.size() != labels.size()) {
    throw Error(ErrorKind::kInvalidArgument, "cell labels do not match its domain");
  }
  if constexpr (std::is_same_v<Acc, Exact>) {
    if (!m.is_exact()) throw Error(ErrorKind::kInvalidArgument, "model parameters are not exact");
  }
  require_compatible(m, omega);
  const std::size_t atoms = m.fiber_alphabet();
  for (std::size_t i = 0; i < domain.size(); ++i) {
    require_same_group(m.tag(), domain[i].tag());
    if (labels[i] >= atoms) throw Error(ErrorKind::kOutOfRange, "cell label outside partition");
  }

  typename Acc::Value v = Acc::one();
  switch (m.kind()) {
    case ModelKind::kTrivialBaseBernoulli:
      for (Symbol l : labels) Acc::combine(v, prob<Acc>(m.fiber_distribution(), l));
      return v;
    case ModelKind::kRandomAlphabetBernoulli:
      for (std::size_t i = 0; i < domain.size(); ++i) {
        Acc::combine(v, prob<Acc>(m.fiber_distribution(omega.at(domain[i])), labels[i]));
      }
      return v;
    case ModelKind::kMarkovZ: {
      if (domain.empty()) return v;
      v = prob<Acc>(m.stationary(), labels[0]);
      for (std::size_t i = 1; i < domain.size(); ++i) {
        const Coord gap = domain[i][0] - domain[i - 1][0];
        if (gap <= 0) throw Error(ErrorKind::kInvalidArgument, "Markov cell domain must be increasing");
        if (gap > RdsModel::kMaxMarkovGap) {
          throw Error(ErrorKind::kOutOfRange, "Markov cell has a gap longer than " +
                                                  std::to_string(RdsModel::kMaxMarkovGap));
        }
        Acc::combine(v, power_entry<Acc>(m, static_cast<int>(gap), labels[i - 1], labels[i]));
      }
      return v;
    }
  }
  throw Error(ErrorKind::kUnsupportedModel, "unknown model kind");
}

}  // namespace

PartitionSpec PartitionSpec::zero_coordinate_of_x(const RdsModel& model) {
  PartitionSpec xi;
  xi.kind = Kind::kZeroCoordinateOfX;
  xi.atoms = model.fiber_alphabet();
  xi.locality = FiniteSubset::singleton(GroupElement::identity(model.tag()));
  return xi;
}

Symbol PartitionSpec::label(const SkewPoint& p) const {
  return p.x.at(GroupElement::identity(p.x.tag()));
}

std::string PartitionSpec::name() const { return "zero-coordinate-of-x"; }

Symbol CellId::label_at(const GroupElement& g) const {
  const std::size_t i = domain.index_of(g);
  if (i == domain.size()) throw Error(ErrorKind::kOutOfRange, "coordinate outside cell domain");
  return labels[i];
}

double DisintegratedMeasure::cell_measure(const SymbolicConfiguration& omega, const CellId& cell) const {
  return cylinder_measure(omega, cell.domain.elements(), cell.labels);
}

Rational DisintegratedMeasure::exact_cell_measure(const SymbolicConfiguration& omega,
                                                  const CellId& cell) const {
  return exact_cylinder_measure(omega, cell.domain.elements(), cell.labels);
}

double DisintegratedMeasure::cylinder_measure(const SymbolicConfiguration& omega,
                                              std::span<const GroupElement> domain,
                                              std::span<const Symbol> labels) const {
  return cylinder<Linear>(model_, omega, domain, labels);
}

Rational DisintegratedMeasure::exact_cylinder_measure(const SymbolicConfiguration& omega,
                                                      std::span<const GroupElement> domain,
                                                      std::span<const Symbol> labels) const {
  return cylinder<Exact>(model_, omega, domain, labels);
}

double DisintegratedMeasure::log_cylinder_measure(const SymbolicConfiguration& omega,
                                                  std::span<const GroupElement> domain,
                                                  std::span<const Symbol> labels) const {
  return cylinder<Log>(model_, omega, domain, labels);
}

double DisintegratedMeasure::log_cell_measure(const SymbolicConfiguration& omega, const CellId& cell) const {
  return log_cylinder_measure(omega, cell.domain.elements(), cell.labels);
}

double DisintegratedMeasure::marginal_measure(const CellId& cell) const {
  if (model_.kind() != ModelKind::kRandomAlphabetBernoulli) {
    return cell_measure(model_.sample_base(0), cell);
  }
  // Independent base coordinates: integrate each factor separately.
  double v = 1.0;
  const Distribution& base = model_.base_distribution();
  for (Symbol l : cell.labels) {
    double factor = 0.0;
    for (std::size_t b = 0; b < base.size(); ++b) {
      factor += base[b] * model_.fiber_distribution(static_cast<Symbol>(b))[l];
    }
    v *= factor;
  }
  return v;
}

CellId cell_of(const RdsModel& model, const PartitionSpec& xi, const FiniteSubset& f,
               const SkewPoint& p) {
  require_same_group(model.tag(), f.tag());
  CellId cell{f, {}};
  cell.labels.reserve(f.size());
  // labels[g] = xi-atom of Theta_g(omega, x), i.e. of (g omega, F_{g,omega} x).
  for (const GroupElement& g : f) cell.labels.push_back(xi.label(skew(model, g, p)));
  return cell;
}

double cell_measure(const DisintegratedMeasure& mu, const SymbolicConfiguration& omega,
                    const CellId& cell) {
  return mu.cell_measure(omega, cell);
}

void for_each_labeling(std::size_t atoms, std::size_t length,
                       const std::function<void(std::span<const Symbol>)>& visit) {
  if (atoms == 0) throw Error(ErrorKind::kInvalidArgument, "partition has no atoms");
  double count = std::pow(static_cast<double>(atoms), static_cast<double>(length));
  if (count > static_cast<double>(kMaxEnumeration)) {
    throw Error(ErrorKind::kEnumerationTooLarge,
                std::to_string(atoms) + "^" + std::to_string(length) + " cells exceed the cap of " +
                    std::to_string(kMaxEnumeration));
  }
  std::vector<Symbol> labels(length, 0);
  for (;;) {
    visit(labels);
    std::size_t i = length;
    for (; i-- > 0;) {
      if (++labels[i] < atoms) break;
      labels[i] = 0;
    }
    if (i == static_cast<std::size_t>(-1)) break;
  }
}

std::vector<WeightedCell> enumerate_cells(const DisintegratedMeasure& mu,
                                          const SymbolicConfiguration& omega,
                                          const PartitionSpec& xi, const FiniteSubset& f) {
  std::vector<WeightedCell> out;
  for_each_labeling(xi.atoms, f.size(), [&](std::span<const Symbol> labels) {
    CellId cell{f, std::vector<Symbol>(labels.begin(), labels.end())};
    const double p = mu.cell_measure(omega, cell);
    out.push_back({std::move(cell), p});
  });
  return out;
}

bool check_invariance(const DisintegratedMeasure& mu, const GroupElement& g,
                      const SymbolicConfiguration& omega, const PartitionSpec& xi,
                      const FiniteSubset& f) {
  const RdsModel& model = mu.model();
  const SymbolicConfiguration g_omega = base_action(model, g, omega);

  // F_{g,omega}^{-1} {y : y_h = l_h, h in F} = {x : x_{h g} = l_h}: the
  // pullback cell lives on F g. Sorting F g may permute the labels.
  const std::size_t n = f.size();
  std::vector<std::size_t> order(n);
  std::vector<GroupElement> moved;
  moved.reserve(n);
  for (const GroupElement& h : f) moved.push_back(mul(h, g));
  for (std::size_t i = 0; i < n; ++i) order[i] = i;
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return moved[a] < moved[b]; });
  std::vector<GroupElement> pulled_domain(n);
  for (std::size_t i = 0; i < n; ++i) pulled_domain[i] = moved[order[i]];

  bool ok = true;
  std::vector<Symbol> pulled_labels(n);
  for_each_labeling(xi.atoms, n, [&](std::span<const Symbol> labels) {
    if (!ok) return;
    for (std::size_t i = 0; i < n; ++i) pulled_labels[i] = labels[order[i]];
    if (model.is_exact()) {
      ok = mu.exact_cylinder_measure(g_omega, f.elements(), labels) ==
           mu.exact_cylinder_measure(omega, pulled_domain, pulled_labels);
    } else {
      ok = std::abs(mu.cylinder_measure(g_omega, f.elements(), labels) -
                    mu.cylinder_measure(omega, pulled_domain, pulled_labels)) <= kProbabilityTolerance;
    }
  });
  return ok;
}

bool DisintegrationReport::pass() const {
  return std::all_of(rows.begin(), rows.end(), [](const DisintegrationRow& r) { return r.within_3se; });
}

DisintegrationReport check_disintegration(const DisintegratedMeasure& mu, const PartitionSpec& xi,
                                          const FiniteSubset& f, std::size_t samples,
                                          std::uint64_t seed) {
  if (samples == 0) throw Error(ErrorKind::kTooFewSamples, "disintegration check needs >= 1 sample");
  const RdsModel& model = mu.model();
  std::vector<SymbolicConfiguration> omegas;
  omegas.reserve(samples);
  for (std::size_t s = 0; s < samples; ++s) omegas.push_back(model.sample_base(stream_seed(seed, s)));

  DisintegrationReport report;
  report.samples = samples;
  for_each_labeling(xi.atoms, f.size(), [&](std::span<const Symbol> labels) {
    DisintegrationRow row;
    row.labels.assign(labels.begin(), labels.end());
    // Shifted by the first value so a constant integrand has zero spread.
    const double v0 = mu.cylinder_measure(omegas.front(), f.elements(), labels);
    double sum = 0.0, sum_sq = 0.0;
    for (const auto& omega : omegas) {
      const double d = mu.cylinder_measure(omega, f.elements(), labels) - v0;
      sum += d;
      sum_sq += d * d;
    }
    const double n = static_cast<double>(samples);
    row.estimate = v0 + sum / n;
    const double var = samples > 1 ? std::max(0.0, (sum_sq - sum * sum / n) / (n - 1)) : 0.0;
    row.std_error = std::sqrt(var / n);
    row.closed_form = mu.marginal_measure(CellId{f, row.labels});
    row.within_3se = std::abs(row.estimate - row.closed_form) <= 3.0 * row.std_error + kProbabilityTolerance;
    report.rows.push_back(std::move(row));
  });
  return report;
}

}  // namespace rdsmb
