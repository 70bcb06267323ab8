#pragma once

#include <string>

#include <boost/multiprecision/cpp_int.hpp>

namespace commdeg {

using BigInt = boost::multiprecision::cpp_int;
using Rational = boost::multiprecision::cpp_rational;

inline BigInt ipow(const BigInt& base, unsigned exp) {
  return boost::multiprecision::pow(base, exp);
}

/// "num/den", or just "num" when the denominator is 1.
inline std::string to_string(const Rational& q) {
  const BigInt num = boost::multiprecision::numerator(q);
  const BigInt den = boost::multiprecision::denominator(q);
  if (den == 1) return num.str();
  return num.str() + "/" + den.str();
}

inline double to_double(const Rational& q) { return q.convert_to<double>(); }

}  // namespace commdeg
