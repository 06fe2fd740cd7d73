#pragma once

#include <boost/multiprecision/gmp.hpp>

#include <string>
#include <vector>

namespace polygame {

/// Exact arbitrary-precision rational. All polytope geometry is done in this
/// type; binary64 appears only in the iterative solvers.
using Rational = boost::multiprecision::mpq_rational;

/// Parses "42", "-7", "0.3" (exact decimal, never a binary float), or "3/10".
/// Throws Error("BadNumber") on anything else, including exponent notation.
Rational parse_rational(const std::string& text);

/// Canonical rendering: integer if the denominator is 1, "num/den" otherwise.
/// parse_rational(rational_to_string(q)) == q.
std::string rational_to_string(const Rational& q);

/// Lexicographic comparison of coordinate vectors.
bool lex_less(const std::vector<Rational>& a, const std::vector<Rational>& b);

}  // namespace polygame
