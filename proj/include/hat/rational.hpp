#pragma once

#include <gmpxx.h>

#include <string>
#include <string_view>
#include <vector>

namespace hat {

/// Exact scalar. GMP keeps every value in canonical reduced form with a
/// positive denominator, so `==` is structural equality.
using Rational = mpq_class;

/// Fixed-dimension vector of rationals.
using RVec = std::vector<Rational>;

/// Length-indexed sequence of equal-dimension vectors.
using RSeq = std::vector<RVec>;

/// Canonical "num/den" text, always with an explicit denominator ("3/1", "-1/2").
std::string to_string(const Rational& q);
std::string to_string(const RVec& v);

/// Accepts "n", "n/d" and "-n/d"; the result is canonicalised.
Rational parse_rational(std::string_view text);

Rational dot(const RVec& a, const RVec& b);
RVec zeros(std::size_t dim);

/// 2^{-k} for k >= 0.
Rational pow2_neg(unsigned k);

}  // namespace hat
