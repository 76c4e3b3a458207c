#pragma once

#include <gmpxx.h>

#include <cstddef>
#include <string>
#include <string_view>

namespace gdm {

using Rational = mpq_class;
using BigInt = mpz_class;

/// Parses "3", "-7/12", "0.125", "1e-3" or "2.5e2" into an exact rational.
Rational parse_rational(std::string_view text);

/// Canonical "p/q" (or "p" when q == 1).
std::string to_string(const Rational& value);

inline double to_double(const Rational& value) { return value.get_d(); }

/// Exact conversion of a finite double (every double is a dyadic rational).
Rational from_double(double value);

/// Bits needed for numerator plus denominator.
std::size_t bit_size(const Rational& value);

/// Returns true and sets `root` when `value` is the square of a rational.
bool exact_sqrt(const Rational& value, Rational& root);

}  // namespace gdm
