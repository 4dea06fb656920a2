#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include <cmath>
#include <stdexcept>
#include <string>

namespace inls {

/// Arbitrary-precision exact rational. Exponent arithmetic never touches floating point.
using Rational = boost::multiprecision::cpp_rational;

inline Rational rat(long long num, long long den = 1) { return Rational(num, den); }

inline std::string to_string(const Rational& q) { return q.str(); }

inline double to_double(const Rational& q) { return q.convert_to<double>(); }

/// Parses "a", "a/b" or a finite decimal such as "-0.125" exactly.
inline Rational parse_rational(const std::string& text) {
  if (text.empty()) throw std::invalid_argument("empty rational literal");
  auto slash = text.find('/');
  if (slash != std::string::npos) {
    Rational num = parse_rational(text.substr(0, slash));
    Rational den = parse_rational(text.substr(slash + 1));
    if (den == 0) throw std::invalid_argument("zero denominator in '" + text + "'");
    return num / den;
  }
  std::string digits;
  long long scale = 0;
  bool seen_dot = false;
  std::size_t i = 0;
  bool neg = false;
  if (text[0] == '-' || text[0] == '+') {
    neg = text[0] == '-';
    i = 1;
  }
  for (; i < text.size(); ++i) {
    char c = text[i];
    if (c == '.' && !seen_dot) {
      seen_dot = true;
    } else if (c >= '0' && c <= '9') {
      digits.push_back(c);
      if (seen_dot) ++scale;
    } else {
      throw std::invalid_argument("malformed rational literal '" + text + "'");
    }
  }
  if (digits.empty()) throw std::invalid_argument("malformed rational literal '" + text + "'");
  boost::multiprecision::cpp_int num(digits);
  boost::multiprecision::cpp_int den = boost::multiprecision::pow(boost::multiprecision::cpp_int(10),
                                                                  static_cast<unsigned>(scale));
  Rational q(num, den);
  return neg ? Rational(-q) : q;
}

/// Best rational approximation with denominator <= max_den (continued fractions).
/// Exact for doubles that are short decimals such as 1, 0.5, 7/3 rounded.
inline Rational rational_from_double(double x, long long max_den = 1000000) {
  if (!std::isfinite(x)) throw std::invalid_argument("non-finite value has no rational form");
  long long h0 = 0, h1 = 1, k0 = 1, k1 = 0;
  double v = x;
  for (int iter = 0; iter < 64; ++iter) {
    double a = std::floor(v);
    long long ai = static_cast<long long>(a);
    long long h2 = ai * h1 + h0;
    long long k2 = ai * k1 + k0;
    if (k2 > max_den) break;
    h0 = h1, h1 = h2, k0 = k1, k1 = k2;
    double frac = v - a;
    if (std::abs(static_cast<double>(h1) / static_cast<double>(k1) - x) <= 1e-15 * std::max(1.0, std::abs(x)))
      break;
    if (frac < 1e-300) break;
    v = 1.0 / frac;
  }
  return Rational(h1, k1);
}

}  // namespace inls
