#include "rdsmb/distribution.hpp"

#include <cmath>
#include <sstream>

#include "rdsmb/errors.hpp"

namespace rdsmb {
namespace {

std::vector<double> cumulative(const std::vector<double>& p) {
  std::vector<double> cdf(p.size());
  double acc = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) cdf[i] = (acc += p[i]);
  return cdf;
}

}  // namespace

Distribution Distribution::exact(std::vector<Rational> p) {
  if (p.empty()) throw Error(ErrorKind::kInvalidDistribution, "empty probability vector");
  Rational sum = 0;
  for (const auto& v : p) {
    if (v < 0) throw Error(ErrorKind::kInvalidDistribution, "negative probability " + rdsmb::to_string(v));
    sum += v;
  }
  Distribution d;
  for (const auto& v : p) d.p_.push_back(to_double(v));
  if (sum == 1) {
    d.exact_ = std::move(p);
  } else if (std::abs(to_double(sum) - 1.0) > kProbabilityTolerance) {
    throw Error(ErrorKind::kInvalidDistribution,
                "probabilities sum to " + rdsmb::to_string(sum) + ", not 1");
  }
  d.cdf_ = cumulative(d.p_);
  return d;
}

Distribution Distribution::approximate(std::vector<double> p) {
  if (p.empty()) throw Error(ErrorKind::kInvalidDistribution, "empty probability vector");
  double sum = 0.0;
  for (double v : p) {
    if (!(v >= 0.0) || !std::isfinite(v)) {
      throw Error(ErrorKind::kInvalidDistribution, "probability entries must be finite and >= 0");
    }
    sum += v;
  }
  if (std::abs(sum - 1.0) > kProbabilityTolerance) {
    std::ostringstream os;
    os.precision(17);
    os << "probabilities sum to " << sum << ", not 1";
    throw Error(ErrorKind::kInvalidDistribution, os.str());
  }
  Distribution d;
  d.p_ = std::move(p);
  d.cdf_ = cumulative(d.p_);
  return d;
}

Distribution Distribution::uniform(std::size_t n) {
  if (n == 0) throw Error(ErrorKind::kInvalidDistribution, "empty probability vector");
  return exact(std::vector<Rational>(n, Rational(1, static_cast<long>(n))));
}

std::span<const Rational> Distribution::exact_values() const {
  if (!is_exact()) throw Error(ErrorKind::kInvalidArgument, "distribution has no exact representation");
  return exact_;
}

Symbol Distribution::sample(double u) const {
  for (std::size_t i = 0; i + 1 < cdf_.size(); ++i) {
    if (u < cdf_[i]) return static_cast<Symbol>(i);
  }
  // Rounding can leave cdf_.back() slightly below 1; fall back to the last
  // symbol with positive mass.
  for (std::size_t i = p_.size(); i-- > 0;) {
    if (p_[i] > 0.0) return static_cast<Symbol>(i);
  }
  return 0;
}

std::string Distribution::to_string() const {
  std::ostringstream os;
  os.precision(12);
  for (std::size_t i = 0; i < size(); ++i) {
    if (i) os << ", ";
    if (is_exact()) {
      os << rdsmb::to_string(exact_[i]);
    } else {
      os << p_[i];
    }
  }
  return os.str();
}

}  // namespace rdsmb
