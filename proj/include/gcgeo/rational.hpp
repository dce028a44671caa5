#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include <stdexcept>
#include <string>
#include <string_view>

namespace gcgeo {

using BigInt = boost::multiprecision::cpp_int;
using Rational = boost::multiprecision::cpp_rational;

inline Rational rat(long long num, long long den = 1) {
  if (den == 0) throw std::domain_error("rational with zero denominator");
  return Rational(num, den);
}

// Accepts "p" or "p/q" with optional sign; q must be nonzero.
inline Rational parse_rational(std::string_view text) {
  auto bad = [&] {
    return std::invalid_argument("malformed rational: '" + std::string(text) + "'");
  };
  if (text.empty()) throw bad();
  auto slash = text.find('/');
  try {
    if (slash == std::string_view::npos) return Rational(BigInt(std::string(text)));
    BigInt num{std::string(text.substr(0, slash))};
    BigInt den{std::string(text.substr(slash + 1))};
    if (den == 0) throw std::domain_error("rational with zero denominator");
    return Rational(num, den);
  } catch (const std::domain_error&) {
    throw;
  } catch (const std::exception&) {
    throw bad();
  }
}

// Canonical "p/q" (or "p" for integers); cpp_rational keeps gcd(p,q)=1, q>0.
inline std::string rational_string(const Rational& value) { return value.str(); }

}  // namespace gcgeo
