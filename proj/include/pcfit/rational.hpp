#pragma once

#include <gmpxx.h>

#include <string>
#include <string_view>

namespace pcfit {

// All metric arithmetic is exact. Equality of maxima in the four-point
// and Kalmanson conditions is meaningless in floating point.
using Rational = mpq_class;

// Accepts integers ("3", "-4"), fractions ("7/2") and decimals ("3.5",
// "-.25"). A decimal with k fractional digits is read as m / 10^k.
// Throws std::invalid_argument on anything else.
Rational parse_rational(std::string_view text);

// Reduced fraction, "p/q" or "p" when the denominator is 1.
std::string to_string(const Rational& value);

}  // namespace pcfit
