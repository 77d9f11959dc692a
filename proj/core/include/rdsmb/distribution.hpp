#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "rdsmb/rational.hpp"

namespace rdsmb {

using Symbol = std::uint32_t;

inline constexpr double kProbabilityTolerance = 1e-12;

// Finite probability vector. Kept exactly (as rationals) when it was built
// from rationals summing to exactly one; otherwise only the double values
// are available and exact_values() throws.
class Distribution {
 public:
  Distribution() = default;

  // Entries must be >= 0 and sum to 1; a sum off by at most 1e-12 is
  // accepted but marks the distribution inexact.
  static Distribution exact(std::vector<Rational> p);
  static Distribution approximate(std::vector<double> p);
  static Distribution uniform(std::size_t n);

  std::size_t size() const { return p_.size(); }
  double operator[](std::size_t i) const { return p_[i]; }
  std::span<const double> values() const { return p_; }

  bool is_exact() const { return !exact_.empty(); }
  std::span<const Rational> exact_values() const;

  // Inverse-CDF draw from a uniform u in [0, 1). Never returns a
  // zero-probability symbol.
  Symbol sample(double u) const;

  std::string to_string() const;

 private:
  std::vector<Rational> exact_;
  std::vector<double> p_;
  std::vector<double> cdf_;
};

}  // namespace rdsmb
