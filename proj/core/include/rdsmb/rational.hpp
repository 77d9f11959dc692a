#pragma once

#include <string>
#include <string_view>

#include <boost/multiprecision/cpp_int.hpp>

namespace rdsmb {

// Exact rational used for set-cardinality ratios and for cell measures of
// models whose parameters are given as decimals or fractions.
using Rational = boost::multiprecision::cpp_rational;
using BigInt = boost::multiprecision::cpp_int;

// Parses "7", "-3", "0.7", "1.25e-3" or "1/3" into an exact rational.
// Throws Error(kInvalidArgument) on malformed input.
Rational parse_rational(std::string_view text);

inline double to_double(const Rational& r) { return r.convert_to<double>(); }

// "p/q" (or "p" when q == 1).
std::string to_string(const Rational& r);

}  // namespace rdsmb
