#include "rdsmb/entropy.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <ostream>

#include "rdsmb/errors.hpp"
#include "rdsmb/parallel.hpp"
#include "rdsmb/rng.hpp"

namespace rdsmb {
namespace {

struct Moments {
  double mean = 0.0;
  std::optional<double> std_error;
};

// Two-pass mean and standard error, summed in index order.
Moments moments(std::span<const double> xs) {
  Moments m;
  if (xs.empty()) return m;
  const double n = static_cast<double>(xs.size());
  // Shifted by xs[0] so identical inputs give exactly zero spread.
  const double x0 = xs.front();
  double shift = 0.0;
  for (double x : xs) shift += x - x0;
  m.mean = x0 + shift / n;
  if (xs.size() > 1) {
    double ss = 0.0;
    for (double x : xs) ss += (x - m.mean) * (x - m.mean);
    m.std_error = std::sqrt(ss / (n - 1.0) / n);
  }
  return m;
}

double log_measure(const DisintegratedMeasure& mu, const PartitionSpec& xi, const FiniteSubset& f,
                   const SkewPoint& p) {
  return mu.log_cell_measure(p.omega, cell_of(mu.model(), xi, f, p));
}

FiniteSubset with_identity(const FiniteSubset& c) {
  return set_union(c, FiniteSubset::singleton(GroupElement::identity(c.tag())));
}

// -sum over cells of xi^S of mu_omega ln mu_omega.
double cell_entropy(const DisintegratedMeasure& mu, const SymbolicConfiguration& omega,
                    const PartitionSpec& xi, const FiniteSubset& s) {
  double h = 0.0;
  for_each_labeling(xi.atoms, s.size(), [&](std::span<const Symbol> labels) {
    const double v = mu.cylinder_measure(omega, s.elements(), labels);
    if (v > 0.0) h -= v * std::log(v);
  });
  return h;
}

double cell_count(std::size_t atoms, std::size_t length) {
  return std::pow(static_cast<double>(atoms), static_cast<double>(length));
}

void require_partition(const RdsModel& model, const PartitionSpec& xi) {
  if (xi.kind != PartitionSpec::Kind::kZeroCoordinateOfX || xi.atoms != model.fiber_alphabet()) {
    throw Error(ErrorKind::kUnsupportedModel, "partition does not match the model's fiber alphabet");
  }
}

}  // namespace

std::optional<double> TraceRow::abs_error() const {
  if (!target) return std::nullopt;
  return std::abs(estimate - *target);
}

void ConvergenceTrace::add(TraceRow row) {
  if (!rows.empty() && row.n <= rows.back().n) {
    throw Error(ErrorKind::kInvalidArgument, "trace rows must have strictly increasing n");
  }
  rows.push_back(std::move(row));
}

std::string format_number(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

void write_csv(std::ostream& os, const ConvergenceTrace& trace) {
  auto opt = [](const std::optional<double>& v) { return v ? format_number(*v) : std::string(); };
  os << kTraceCsvHeader << '\n';
  for (const TraceRow& r : trace.rows) {
    os << r.n << ',' << r.folner_size << ',' << format_number(r.estimate) << ',' << opt(r.target) << ','
       << opt(r.abs_error()) << ',' << opt(r.std_error) << '\n';
  }
}

std::string_view to_string(EntropyMethod m) {
  switch (m) {
    case EntropyMethod::kPointwiseSmb: return "pointwise-SMB";
    case EntropyMethod::kConditionalEntropy: return "conditional-entropy";
    case EntropyMethod::kExactEnumeration: return "exact-enumeration";
  }
  return "unknown";
}

EntropyReport make_report(const RdsModel& model, const PartitionSpec& xi, EntropyMethod method,
                          const ConvergenceTrace& trace) {
  EntropyReport r;
  r.model = model.describe();
  r.partition = xi.name();
  r.closed_form = fiber_entropy_closed_form(model, xi);
  r.method = method;
  for (const TraceRow& row : trace.rows) r.estimates.push_back(row.estimate);
  return r;
}

double shannon_entropy(std::span<const double> p) {
  if (p.empty()) throw Error(ErrorKind::kInvalidDistribution, "empty probability vector");
  double sum = 0.0, h = 0.0;
  for (double v : p) {
    if (!(v >= 0.0)) throw Error(ErrorKind::kInvalidDistribution, "negative probability");
    sum += v;
    if (v > 0.0) h -= v * std::log(v);
  }
  if (std::abs(sum - 1.0) > kProbabilityTolerance) {
    throw Error(ErrorKind::kInvalidDistribution, "probabilities sum to " + format_number(sum));
  }
  return h;
}

double information(const DisintegratedMeasure& mu, const PartitionSpec& xi, const FiniteSubset& f,
                   const SkewPoint& p) {
  const double lv = log_measure(mu, xi, f, p);
  if (lv == -std::numeric_limits<double>::infinity()) {
    throw Error(ErrorKind::kInfiniteInformation, "point lies in a null cell");
  }
  return 0.0 - lv;
}

double conditional_information(const DisintegratedMeasure& mu, const PartitionSpec& xi,
                               const FiniteSubset& cond_set, const SkewPoint& p) {
  if (cond_set.contains(GroupElement::identity(cond_set.tag()))) {
    throw Error(ErrorKind::kInvalidArgument, "conditioning set must not contain the identity");
  }
  const double joint = log_measure(mu, xi, with_identity(cond_set), p);
  const double cond = log_measure(mu, xi, cond_set, p);
  constexpr double kNegInf = -std::numeric_limits<double>::infinity();
  if (joint == kNegInf || cond == kNegInf) {
    throw Error(ErrorKind::kInfiniteInformation, "point lies in a null cell");
  }
  return cond - joint;
}

ChainRuleResult chain_rule_check(const DisintegratedMeasure& mu, const PartitionSpec& xi,
                                 std::span<const GroupElement> order, const SkewPoint& p) {
  if (order.empty()) throw Error(ErrorKind::kEmptySet, "chain rule needs a non-empty set");
  const FiniteSubset f(order.front().tag(), std::vector<GroupElement>(order.begin(), order.end()));
  if (f.size() != order.size()) throw Error(ErrorKind::kInvalidArgument, "enumeration repeats an element");

  ChainRuleResult r;
  r.information = information(mu, xi, f, p);
  for (std::size_t m = 0; m < order.size(); ++m) {
    const GroupElement back = inverse(order[m]);
    std::vector<GroupElement> later;
    for (std::size_t l = m + 1; l < order.size(); ++l) later.push_back(mul(order[l], back));
    const FiniteSubset cond(f.tag(), std::move(later));
    r.terms.push_back(conditional_information(mu, xi, cond, skew(mu.model(), order[m], p)));
    r.telescoped += r.terms.back();
  }
  r.residual = std::abs(r.information - r.telescoped);
  return r;
}

ChainRuleSweep chain_rule_all_orders(const DisintegratedMeasure& mu, const PartitionSpec& xi,
                                     const FiniteSubset& f, const SkewPoint& p) {
  const std::size_t k = f.size();
  if (k == 0) throw Error(ErrorKind::kEmptySet, "chain rule needs a non-empty set");
  if (k > 10) throw Error(ErrorKind::kEnumerationTooLarge, "all-orders sweep is limited to |F| <= 10");
  const double info = information(mu, xi, f, p);

  // term[i][mask]: conditional term for g_i given the elements in mask.
  const std::size_t masks = std::size_t{1} << k;
  std::vector<std::vector<double>> term(k, std::vector<double>(masks, 0.0));
  for (std::size_t i = 0; i < k; ++i) {
    const GroupElement back = inverse(f[i]);
    const SkewPoint q = skew(mu.model(), f[i], p);
    for (std::size_t mask = 0; mask < masks; ++mask) {
      if (mask & (std::size_t{1} << i)) continue;
      std::vector<GroupElement> later;
      for (std::size_t l = 0; l < k; ++l) {
        if (mask & (std::size_t{1} << l)) later.push_back(mul(f[l], back));
      }
      term[i][mask] = conditional_information(mu, xi, FiniteSubset(f.tag(), std::move(later)), q);
    }
  }

  ChainRuleSweep sweep;
  std::vector<std::size_t> perm(k);
  std::iota(perm.begin(), perm.end(), 0);
  std::vector<std::size_t> later_mask(k);
  double lo = std::numeric_limits<double>::infinity();
  double hi = -lo;
  do {
    std::size_t mask = 0;
    for (std::size_t m = k; m-- > 0;) {
      later_mask[m] = mask;
      mask |= std::size_t{1} << perm[m];
    }
    double total = 0.0;
    for (std::size_t m = 0; m < k; ++m) total += term[perm[m]][later_mask[m]];
    sweep.max_residual = std::max(sweep.max_residual, std::abs(info - total));
    lo = std::min(lo, total);
    hi = std::max(hi, total);
    ++sweep.orders;
  } while (std::next_permutation(perm.begin(), perm.end()));
  sweep.total_spread = hi - lo;
  return sweep;
}

double fiber_entropy_closed_form(const RdsModel& model, const PartitionSpec& xi) {
  require_partition(model, xi);
  switch (model.kind()) {
    case ModelKind::kTrivialBaseBernoulli:
      return shannon_entropy(model.fiber_distribution().values());
    case ModelKind::kRandomAlphabetBernoulli: {
      double h = 0.0;
      const Distribution& base = model.base_distribution();
      for (std::size_t b = 0; b < base.size(); ++b) {
        h += base[b] * shannon_entropy(model.fiber_distribution(static_cast<Symbol>(b)).values());
      }
      return h;
    }
    case ModelKind::kMarkovZ: {
      double h = 0.0;
      const auto& rows = model.transition();
      for (std::size_t i = 0; i < rows.size(); ++i) h += model.stationary()[i] * shannon_entropy(rows[i].values());
      return h;
    }
  }
  throw Error(ErrorKind::kUnsupportedModel, "unknown model kind");
}

ConvergenceTrace smb_trace(const DisintegratedMeasure& mu, const PartitionSpec& xi,
                           const FolnerSequence& seq, const SmbOptions& options) {
  const RdsModel& model = mu.model();
  require_same_group(model.tag(), seq.tag());
  require_partition(model, xi);
  if (options.trajectories == 0) throw Error(ErrorKind::kTooFewSamples, "smb_trace needs >= 1 trajectory");
  const FolnerValidation v = validate_sequence(seq);
  if (!v.ok()) {
    throw Error(ErrorKind::kHypothesisFailure,
                "Foelner sequence fails validation (identity/nesting/size condition)");
  }
  const double target = fiber_entropy_closed_form(model, xi);
  const std::size_t count = seq.size();

  // rates[n - 1][t]
  std::vector<std::vector<double>> rates(count, std::vector<double>(options.trajectories));
  parallel_for(options.trajectories, options.workers, [&](std::size_t t) {
    const SkewPoint p = model.sample_point(stream_seed(options.seed, t));
    for (std::size_t n = 1; n <= count; ++n) {
      const FiniteSubset& f = seq.at(n);
      rates[n - 1][t] = information(mu, xi, f, p) / static_cast<double>(f.size());
    }
  });

  ConvergenceTrace trace;
  for (std::size_t n = 1; n <= count; ++n) {
    const Moments m = moments(rates[n - 1]);
    trace.add({n, seq.at(n).size(), m.mean, target, m.std_error});
  }
  return trace;
}

ConvergenceTrace conditional_entropy_trace(const DisintegratedMeasure& mu, const PartitionSpec& xi,
                                           const FolnerSequence& seq,
                                           const ConditionalEntropyOptions& options) {
  const RdsModel& model = mu.model();
  require_same_group(model.tag(), seq.tag());
  require_partition(model, xi);
  if (options.samples == 0) throw Error(ErrorKind::kTooFewSamples, "conditional entropy needs >= 1 sample");
  const double target = fiber_entropy_closed_form(model, xi);
  const GroupElement e = GroupElement::identity(model.tag());
  const bool base_dependent = model.fiber_measure_depends_on_base();

  ConvergenceTrace trace;
  for (std::size_t n = 1; n <= seq.size(); ++n) {
    const FiniteSubset& f = seq.at(n);
    if (!f.contains(e)) {
      throw Error(ErrorKind::kHypothesisFailure, "F_" + std::to_string(n) + " does not contain the identity");
    }
    const FiniteSubset cond = set_difference(f, FiniteSubset::singleton(e));
    const double cells = cell_count(xi.atoms, f.size());
    // Base-dependent models enumerate once per base draw, so the draws count
    // against the budget too.
    const bool exact = cells <= static_cast<double>(kMaxEnumeration) &&
                       (!base_dependent ||
                        cells * static_cast<double>(options.samples) <= 16.0 * kMaxEnumeration);

    TraceRow row{n, f.size(), 0.0, target, std::nullopt};
    if (exact && !base_dependent) {
      const SymbolicConfiguration omega = model.sample_base(options.seed);
      row.estimate = cell_entropy(mu, omega, xi, f) - cell_entropy(mu, omega, xi, cond);
    } else {
      if (!exact && !options.allow_monte_carlo) {
        throw Error(ErrorKind::kEnumerationTooLarge,
                    "F_" + std::to_string(n) + " is too large to enumerate and Monte Carlo is disabled");
      }
      std::vector<double> values(options.samples);
      parallel_for(options.samples, options.workers, [&](std::size_t s) {
        const std::uint64_t seed = stream_seed(options.seed, s);
        if (exact) {
          const SymbolicConfiguration omega = model.sample_base(seed);
          values[s] = cell_entropy(mu, omega, xi, f) - cell_entropy(mu, omega, xi, cond);
        } else {
          values[s] = conditional_information(mu, xi, cond, model.sample_point(seed));
        }
      });
      const Moments m = moments(values);
      row.estimate = m.mean;
      row.std_error = m.std_error;
    }
    trace.add(std::move(row));
  }
  return trace;
}

}  // namespace rdsmb
