#pragma once

#include <gmpxx.h>

#include <cstdint>
#include <string>
#include <string_view>

namespace speedprior {

/// Exact arbitrary-precision rational, always kept in canonical (reduced)
/// form. Every probability, prior mass and interval endpoint is one of these.
using Rational = mpq_class;

/// 2^exponent, exact. Negative exponents give dyadic fractions.
Rational pow2(long exponent);

/// Parses "num/den" or a bare integer. Throws std::invalid_argument.
Rational parse_rational(std::string_view text);

/// "num/den", or just "num" when the denominator is 1.
std::string to_string(const Rational& q);

std::string numerator_string(const Rational& q);
std::string denominator_string(const Rational& q);

/// Natural logarithm, rounded to double. For reporting only.
double approx_ln(const Rational& q);

double approx_double(const Rational& q);

/// Decides n <= -2 ln(q) exactly, for 0 < q. Uses a rational upper bound on e,
/// so a `true` answer is a proof; `false` can only occur when the two sides
/// agree to ~30 significant digits.
bool certified_le_minus_two_ln(std::uint64_t n, const Rational& q);
/// The same for a rational loss a/b (via q^(2b) e^a <= 1).
bool certified_le_minus_two_ln(const Rational& loss, const Rational& q);

}  // namespace speedprior
