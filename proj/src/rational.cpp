// Copyright 2026 The nocweave Authors
// SPDX-License-Identifier: Apache-2.0

#include "nocweave/rational.hpp"

#include <cmath>
#include <limits>

#include "nocweave/error.hpp"

namespace nocweave {

namespace {

BigInt parse_integer(std::string_view text) {
  if (text.empty()) throw Error("empty integer in rational literal");
  std::size_t i = 0;
  bool negative = false;
  if (text[0] == '-' || text[0] == '+') {
    negative = text[0] == '-';
    i = 1;
  }
  if (i == text.size()) throw Error("malformed rational literal");
  BigInt result = 0;
  for (; i < text.size(); ++i) {
    char c = text[i];
    if (c < '0' || c > '9') throw Error("malformed rational literal: " + std::string(text));
    result = result * 10 + (c - '0');
  }
  return negative ? BigInt(-result) : result;
}

}  // namespace

Rational parse_rational(std::string_view text) {
  auto slash = text.find('/');
  if (slash != std::string_view::npos) {
    BigInt num = parse_integer(text.substr(0, slash));
    BigInt den = parse_integer(text.substr(slash + 1));
    if (den == 0) throw Error("zero denominator in rational literal");
    return Rational(num, den);
  }
  auto dot = text.find('.');
  if (dot == std::string_view::npos) return Rational(parse_integer(text));
  std::string digits(text.substr(0, dot));
  std::string_view frac = text.substr(dot + 1);
  digits.append(frac);
  BigInt den = boost::multiprecision::pow(BigInt(10), static_cast<unsigned>(frac.size()));
  return Rational(parse_integer(digits), den);
}

std::string format_rational(const Rational& value) {
  return boost::multiprecision::numerator(value).str() + "/" +
         boost::multiprecision::denominator(value).str();
}

Rational rational_from_double(double value) {
  if (!std::isfinite(value)) throw Error("cannot represent a non-finite value exactly");
  int exponent = 0;
  double mantissa = std::frexp(value, &exponent);
  // 53 significant bits scaled to an integer
  auto scaled = static_cast<std::int64_t>(std::ldexp(mantissa, 53));
  exponent -= 53;
  Rational result{BigInt(scaled)};
  if (exponent > 0) {
    result *= Rational(BigInt(1) << exponent);
  } else if (exponent < 0) {
    result /= Rational(BigInt(1) << -exponent);
  }
  return result;
}

double to_double(const Rational& value) { return value.convert_to<double>(); }

BigInt floor(const Rational& value) {
  const BigInt& num = boost::multiprecision::numerator(value);
  const BigInt& den = boost::multiprecision::denominator(value);
  BigInt q = num / den;
  if (num % den != 0 && num < 0) q -= 1;
  return q;
}

BigInt ceil(const Rational& value) {
  const BigInt& num = boost::multiprecision::numerator(value);
  const BigInt& den = boost::multiprecision::denominator(value);
  BigInt q = num / den;
  if (num % den != 0 && num > 0) q += 1;
  return q;
}

std::int64_t to_int64(const BigInt& value) {
  if (value > std::numeric_limits<std::int64_t>::max() ||
      value < std::numeric_limits<std::int64_t>::min()) {
    throw Error("integer overflow converting " + value.str());
  }
  return value.convert_to<std::int64_t>();
}

std::int64_t ceil_to_int64(const Rational& value) { return to_int64(ceil(value)); }

}  // namespace nocweave
