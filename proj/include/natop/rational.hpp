#pragma once

// Exact rational scalars. Backed by GMP's mpq_class, which keeps every value
// in lowest terms with a positive denominator after each operation.

#include <gmpxx.h>

#include <cstdint>
#include <string>
#include <string_view>

namespace natop {

using Rational = mpq_class;
using Integer = mpz_class;

inline Rational make_rational(std::int64_t num, std::int64_t den = 1) {
  Rational q{Integer{static_cast<long>(num)}, Integer{static_cast<long>(den)}};
  q.canonicalize();
  return q;
}

inline bool is_zero(const Rational& q) { return sgn(q) == 0; }

/// "p/q" form; integers are written without a denominator ("3", "-2").
std::string to_string(const Rational& q);

/// Accepts "p", "p/q", with optional sign. Throws std::invalid_argument on
/// malformed text or a zero denominator.
Rational parse_rational(std::string_view text);

}  // namespace natop
