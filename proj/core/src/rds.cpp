#include "rdsmb/rds.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>
#include <sstream>

#include "rdsmb/errors.hpp"
#include "rdsmb/rng.hpp"

namespace rdsmb {
namespace {

template <typename T>
SquareMatrix<T> multiply(const SquareMatrix<T>& x, const SquareMatrix<T>& y) {
  SquareMatrix<T> out{x.n, std::vector<T>(x.n * x.n, T(0))};
  for (std::size_t i = 0; i < x.n; ++i) {
    for (std::size_t k = 0; k < x.n; ++k) {
      for (std::size_t j = 0; j < x.n; ++j) out(i, j) += x(i, k) * y(k, j);
    }
  }
  return out;
}

bool is_zero(const Rational& v) { return v == 0; }
bool is_zero(double v) { return std::abs(v) < 1e-14; }

// Solves pi P = pi, sum(pi) = 1 by Gaussian elimination on (P^T - I) with the
// last equation replaced by the normalisation.
template <typename T>
std::vector<T> solve_stationary(const SquareMatrix<T>& p) {
  const std::size_t n = p.n;
  std::vector<std::vector<T>> a(n, std::vector<T>(n + 1, T(0)));
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) a[i][j] = p(j, i) - (i == j ? T(1) : T(0));
  }
  for (std::size_t j = 0; j < n; ++j) a[n - 1][j] = T(1);
  a[n - 1][n] = T(1);

  for (std::size_t col = 0; col < n; ++col) {
    std::size_t pivot = col;
    if constexpr (std::is_same_v<T, double>) {
      for (std::size_t r = col + 1; r < n; ++r) {
        if (std::abs(a[r][col]) > std::abs(a[pivot][col])) pivot = r;
      }
    } else {
      while (pivot < n && is_zero(a[pivot][col])) ++pivot;
    }
    if (pivot == n || is_zero(a[pivot][col])) {
      throw Error(ErrorKind::kInvalidArgument,
                  "transition matrix has no unique stationary distribution");
    }
    std::swap(a[col], a[pivot]);
    for (std::size_t r = 0; r < n; ++r) {
      if (r == col || is_zero(a[r][col])) continue;
      const T factor = a[r][col] / a[col][col];
      for (std::size_t c = col; c <= n; ++c) a[r][c] -= factor * a[col][c];
    }
  }
  std::vector<T> pi(n);
  for (std::size_t i = 0; i < n; ++i) pi[i] = a[i][n] / a[i][i];
  return pi;
}

}  // namespace

std::string_view to_string(ModelKind kind) {
  switch (kind) {
    case ModelKind::kTrivialBaseBernoulli: return "trivial-base-bernoulli";
    case ModelKind::kRandomAlphabetBernoulli: return "random-alphabet-bernoulli";
    case ModelKind::kMarkovZ: return "markov-z";
  }
  return "unknown";
}

RdsModel RdsModel::trivial_base_bernoulli(GroupTag tag, Distribution fiber) {
  RdsModel m;
  m.kind_ = ModelKind::kTrivialBaseBernoulli;
  m.tag_ = tag;
  m.base_ = Distribution::uniform(1);
  m.exact_ = fiber.is_exact();
  m.fiber_.push_back(std::move(fiber));
  return m;
}

RdsModel RdsModel::random_alphabet_bernoulli(GroupTag tag, Distribution base,
                                             std::vector<Distribution> fiber_by_base) {
  if (fiber_by_base.size() != base.size()) {
    throw Error(ErrorKind::kInvalidArgument, "need one fiber distribution per base symbol");
  }
  for (const auto& d : fiber_by_base) {
    if (d.size() != fiber_by_base.front().size()) {
      throw Error(ErrorKind::kInvalidArgument, "fiber distributions must share one alphabet");
    }
  }
  RdsModel m;
  m.kind_ = ModelKind::kRandomAlphabetBernoulli;
  m.tag_ = tag;
  m.exact_ = base.is_exact() &&
             std::all_of(fiber_by_base.begin(), fiber_by_base.end(),
                         [](const Distribution& d) { return d.is_exact(); });
  m.base_ = std::move(base);
  m.fiber_ = std::move(fiber_by_base);
  return m;
}

RdsModel RdsModel::markov_z(std::vector<Distribution> rows) {
  const std::size_t n = rows.size();
  if (n == 0) throw Error(ErrorKind::kInvalidArgument, "empty transition matrix");
  for (const auto& r : rows) {
    if (r.size() != n) throw Error(ErrorKind::kInvalidArgument, "transition matrix must be square");
  }
  const bool exact = std::all_of(rows.begin(), rows.end(), [](const Distribution& d) { return d.is_exact(); });

  auto data = std::make_shared<MarkovData>();
  SquareMatrix<double> p{n, std::vector<double>(n * n)};
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) p(i, j) = rows[i][j];
  }
  if (exact) {
    SquareMatrix<Rational> pe{n, std::vector<Rational>(n * n)};
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j < n; ++j) pe(i, j) = rows[i].exact_values()[j];
    }
    data->stationary = Distribution::exact(solve_stationary(pe));
    data->exact_powers.push_back(pe);
    for (int k = 2; k <= kMaxMarkovGap; ++k) data->exact_powers.push_back(multiply(data->exact_powers.back(), pe));
  } else {
    std::vector<double> pi = solve_stationary(p);
    for (double& v : pi) v = std::max(v, 0.0);
    double sum = 0.0;
    for (double v : pi) sum += v;
    for (double& v : pi) v /= sum;
    data->stationary = Distribution::approximate(std::move(pi));
  }
  data->powers.push_back(p);
  for (int k = 2; k <= kMaxMarkovGap; ++k) data->powers.push_back(multiply(data->powers.back(), p));
  data->rows = rows;

  // pi P = pi is the stored-vector contract.
  for (std::size_t j = 0; j < n; ++j) {
    double lhs = 0.0;
    for (std::size_t i = 0; i < n; ++i) lhs += data->stationary[i] * p(i, j);
    if (std::abs(lhs - data->stationary[j]) > kProbabilityTolerance) {
      throw Error(ErrorKind::kInvalidDistribution, "stationary vector does not satisfy pi P = pi");
    }
  }

  RdsModel m;
  m.kind_ = ModelKind::kMarkovZ;
  m.tag_ = GroupTag::zd(1);
  m.base_ = Distribution::uniform(1);
  m.fiber_ = {data->stationary};
  m.exact_ = exact;
  m.markov_ = std::move(data);
  return m;
}

const Distribution& RdsModel::fiber_distribution(Symbol base_symbol) const {
  if (kind_ == ModelKind::kRandomAlphabetBernoulli) {
    if (base_symbol >= fiber_.size()) throw Error(ErrorKind::kOutOfRange, "base symbol outside alphabet");
    return fiber_[base_symbol];
  }
  return fiber_.front();
}

const std::vector<Distribution>& RdsModel::transition() const {
  if (!markov_) throw Error(ErrorKind::kUnsupportedModel, "transition() requires a MarkovZ model");
  return markov_->rows;
}

const Distribution& RdsModel::stationary() const {
  if (!markov_) throw Error(ErrorKind::kUnsupportedModel, "stationary() requires a MarkovZ model");
  return markov_->stationary;
}

const SquareMatrix<double>& RdsModel::transition_power(int k) const {
  if (!markov_) throw Error(ErrorKind::kUnsupportedModel, "transition_power() requires a MarkovZ model");
  if (k < 1 || k > kMaxMarkovGap) {
    throw Error(ErrorKind::kOutOfRange, "Markov gap " + std::to_string(k) + " exceeds " +
                                            std::to_string(kMaxMarkovGap));
  }
  return markov_->powers[static_cast<std::size_t>(k - 1)];
}

const SquareMatrix<Rational>& RdsModel::exact_transition_power(int k) const {
  if (!markov_) throw Error(ErrorKind::kUnsupportedModel, "transition_power() requires a MarkovZ model");
  if (!exact_) throw Error(ErrorKind::kInvalidArgument, "model parameters are not exact");
  if (k < 1 || k > kMaxMarkovGap) {
    throw Error(ErrorKind::kOutOfRange, "Markov gap " + std::to_string(k) + " exceeds " +
                                            std::to_string(kMaxMarkovGap));
  }
  return markov_->exact_powers[static_cast<std::size_t>(k - 1)];
}

SymbolicConfiguration RdsModel::sample_base(std::uint64_t seed) const {
  if (base_.size() == 1) return constant_configuration(tag_, 1, 0);
  return iid_configuration(tag_, base_, seed);
}

SymbolicConfiguration RdsModel::sample_fiber(const SymbolicConfiguration& omega, std::uint64_t seed) const {
  require_compatible(*this, omega);
  switch (kind_) {
    case ModelKind::kTrivialBaseBernoulli:
      return iid_configuration(tag_, fiber_.front(), seed);
    case ModelKind::kRandomAlphabetBernoulli:
      return modulated_configuration(omega, fiber_, seed);
    case ModelKind::kMarkovZ:
      return markov_configuration(markov_->rows, markov_->stationary, seed);
  }
  throw Error(ErrorKind::kUnsupportedModel, "unknown model kind");
}

SkewPoint RdsModel::sample_point(std::uint64_t seed) const {
  SymbolicConfiguration omega = sample_base(stream_seed(seed, 0));
  SymbolicConfiguration x = sample_fiber(omega, stream_seed(seed, 1));
  return {std::move(omega), std::move(x)};
}

std::string RdsModel::describe() const {
  std::ostringstream os;
  os << to_string(kind_) << " on " << tag_.name();
  switch (kind_) {
    case ModelKind::kTrivialBaseBernoulli:
      os << ", p = (" << fiber_.front().to_string() << ")";
      break;
    case ModelKind::kRandomAlphabetBernoulli:
      os << ", base = (" << base_.to_string() << ")";
      for (std::size_t b = 0; b < fiber_.size(); ++b) os << ", p" << b << " = (" << fiber_[b].to_string() << ")";
      break;
    case ModelKind::kMarkovZ:
      for (std::size_t i = 0; i < markov_->rows.size(); ++i) {
        os << ", row" << i << " = (" << markov_->rows[i].to_string() << ")";
      }
      os << ", stationary = (" << markov_->stationary.to_string() << ")";
      break;
  }
  return os.str();
}

void require_compatible(const RdsModel& model, const SymbolicConfiguration& c) {
  require_same_group(model.tag(), c.tag());
}

SymbolicConfiguration base_action(const RdsModel& model, const GroupElement& g,
                                  const SymbolicConfiguration& omega) {
  require_compatible(model, omega);
  require_same_group(model.tag(), g.tag());
  return omega.shifted(g);
}

SymbolicConfiguration fiber_map(const RdsModel& model, const GroupElement& g,
                                const SymbolicConfiguration& omega, const SymbolicConfiguration& x) {
  require_compatible(model, omega);
  require_compatible(model, x);
  require_same_group(model.tag(), g.tag());
  return x.shifted(g);
}

SkewPoint skew(const RdsModel& model, const GroupElement& g, const SkewPoint& p) {
  return {base_action(model, g, p.omega), fiber_map(model, g, p.omega, p.x)};
}

bool check_cocycle(const RdsModel& model, const GroupElement& g1, const GroupElement& g2,
                   const SkewPoint& p, const FiniteSubset& window) {
  FiberMap shift = [&model](const GroupElement& g, const SymbolicConfiguration& omega,
                            const SymbolicConfiguration& x) { return fiber_map(model, g, omega, x); };
  return check_cocycle(model, shift, g1, g2, p, window);
}

bool check_cocycle(const RdsModel& model, const FiberMap& fiber, const GroupElement& g1,
                   const GroupElement& g2, const SkewPoint& p, const FiniteSubset& window) {
  const SymbolicConfiguration g1_omega = base_action(model, g1, p.omega);
  const SymbolicConfiguration lhs = fiber(g2, g1_omega, fiber(g1, p.omega, p.x));
  const SymbolicConfiguration rhs = fiber(mul(g2, g1), p.omega, p.x);
  return lhs.agrees_on(rhs, window);
}

namespace {

// Coordinates of sup-norm <= radius ordered by sup-norm, cached per group.
std::shared_ptr<const std::vector<GroupElement>> ball_by_norm(GroupTag tag, int radius) {
  static std::mutex mutex;
  static std::map<std::pair<GroupTag, int>, std::shared_ptr<const std::vector<GroupElement>>> cache;
  std::lock_guard lock(mutex);
  auto& slot = cache[{tag, radius}];
  if (!slot) {
    const FiniteSubset ball = FiniteSubset::cube(tag, -radius, radius + 1);
    std::vector<GroupElement> v(ball.begin(), ball.end());
    std::stable_sort(v.begin(), v.end(), [](const GroupElement& a, const GroupElement& b) {
      return a.sup_norm() < b.sup_norm();
    });
    slot = std::make_shared<const std::vector<GroupElement>>(std::move(v));
  }
  return slot;
}

}  // namespace

double symbolic_distance(const SymbolicConfiguration& x, const SymbolicConfiguration& y, int radius) {
  require_same_group(x.tag(), y.tag());
  if (radius < 0) throw Error(ErrorKind::kInvalidArgument, "truncation radius must be >= 0");
  const auto ball = ball_by_norm(x.tag(), radius);
  for (const GroupElement& g : *ball) {
    if (x.at(g) != y.at(g)) return std::ldexp(1.0, -static_cast<int>(g.sup_norm()));
  }
  return 0.0;
}

double bowen_distance(const RdsModel& model, const FiniteSubset& e, const SymbolicConfiguration& omega,
                      const SymbolicConfiguration& x, const SymbolicConfiguration& y, int radius) {
  if (e.empty()) throw Error(ErrorKind::kEmptySet, "Bowen metric needs a non-empty orbit segment");
  double d = 0.0;
  for (const GroupElement& s : e) {
    d = std::max(d, symbolic_distance(fiber_map(model, s, omega, x), fiber_map(model, s, omega, y), radius));
  }
  return d;
}

}  // namespace rdsmb
