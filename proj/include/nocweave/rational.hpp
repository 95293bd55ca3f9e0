// Copyright 2026 The nocweave Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <string>
#include <string_view>

#include <boost/multiprecision/cpp_int.hpp>

namespace nocweave {

using BigInt = boost::multiprecision::cpp_int;
using Rational = boost::multiprecision::cpp_rational;

/// Parses "p/q", "p" or a plain decimal such as "0.25" into an exact value.
Rational parse_rational(std::string_view text);

/// Canonical "p/q" form (always with a denominator, q > 0, reduced).
std::string format_rational(const Rational& value);

/// Exact conversion; every finite double is a dyadic rational.
Rational rational_from_double(double value);

double to_double(const Rational& value);

BigInt floor(const Rational& value);
BigInt ceil(const Rational& value);

/// ceil(value) as a machine integer; throws if it does not fit.
std::int64_t ceil_to_int64(const Rational& value);

std::int64_t to_int64(const BigInt& value);

}  // namespace nocweave
