#include "fairdiv/rational.hpp"

#include <cctype>
#include <stdexcept>
#include <string>

namespace fairdiv {

namespace {

BigInt parse_digits(std::string_view digits, std::string_view whole) {
  if (digits.empty()) throw std::invalid_argument("bad number: '" + std::string(whole) + "'");
  BigInt out = 0;
  for (char c : digits) {
    if (!std::isdigit(static_cast<unsigned char>(c)))
      throw std::invalid_argument("bad number: '" + std::string(whole) + "'");
    out = out * 10 + (c - '0');
  }
  return out;
}

BigInt pow10(long k) {
  BigInt p = 1;
  for (long i = 0; i < k; ++i) p *= 10;
  return p;
}

Rational parse_decimal(std::string_view text, std::string_view whole) {
  bool negative = false;
  if (!text.empty() && (text.front() == '-' || text.front() == '+')) {
    negative = text.front() == '-';
    text.remove_prefix(1);
  }
  long exponent = 0;
  if (auto e = text.find_first_of("eE"); e != std::string_view::npos) {
    std::string_view exp_part = text.substr(e + 1);
    bool exp_neg = false;
    if (!exp_part.empty() && (exp_part.front() == '-' || exp_part.front() == '+')) {
      exp_neg = exp_part.front() == '-';
      exp_part.remove_prefix(1);
    }
    if (exp_part.size() > 6) throw std::invalid_argument("exponent out of range: '" + std::string(whole) + "'");
    exponent = static_cast<long>(parse_digits(exp_part, whole));
    if (exp_neg) exponent = -exponent;
    text = text.substr(0, e);
  }
  std::string_view int_part = text, frac_part;
  if (auto dot = text.find('.'); dot != std::string_view::npos) {
    int_part = text.substr(0, dot);
    frac_part = text.substr(dot + 1);
  }
  if (int_part.empty() && frac_part.empty())
    throw std::invalid_argument("bad number: '" + std::string(whole) + "'");
  BigInt mantissa = 0;
  if (!int_part.empty()) mantissa = parse_digits(int_part, whole);
  if (!frac_part.empty()) mantissa = mantissa * pow10(static_cast<long>(frac_part.size())) + parse_digits(frac_part, whole);
  exponent -= static_cast<long>(frac_part.size());
  Rational r = exponent >= 0 ? Rational(mantissa * pow10(exponent)) : Rational(mantissa, pow10(-exponent));
  return negative ? Rational(-r) : r;
}

}  // namespace

Rational parse_rational(std::string_view text) {
  const std::string_view whole = text;
  while (!text.empty() && std::isspace(static_cast<unsigned char>(text.front()))) text.remove_prefix(1);
  while (!text.empty() && std::isspace(static_cast<unsigned char>(text.back()))) text.remove_suffix(1);
  if (auto slash = text.find('/'); slash != std::string_view::npos) {
    Rational num = parse_decimal(text.substr(0, slash), whole);
    Rational den = parse_decimal(text.substr(slash + 1), whole);
    if (den == 0) throw std::invalid_argument("zero denominator: '" + std::string(whole) + "'");
    return num / den;
  }
  return parse_decimal(text, whole);
}

double to_double(const Rational& r) { return r.convert_to<double>(); }

BigInt lcm(const BigInt& a, const BigInt& b) {
  if (a == 0 || b == 0) return 0;
  return boost::multiprecision::abs(a / boost::multiprecision::gcd(a, b) * b);
}

}  // namespace fairdiv
