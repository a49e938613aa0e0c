#pragma once

#include <string_view>

#include <boost/multiprecision/cpp_int.hpp>

namespace fairdiv {

using BigInt = boost::multiprecision::cpp_int;
using Rational = boost::multiprecision::cpp_rational;

/// Parses "8", "-0.125", "1.5e-3" or "3/7" into an exact rational.
/// Decimal fractions are taken at face value, so "0.1" is exactly 1/10.
Rational parse_rational(std::string_view text);

inline BigInt numerator_of(const Rational& r) { return boost::multiprecision::numerator(r); }
inline BigInt denominator_of(const Rational& r) { return boost::multiprecision::denominator(r); }

double to_double(const Rational& r);

BigInt lcm(const BigInt& a, const BigInt& b);

}  // namespace fairdiv
