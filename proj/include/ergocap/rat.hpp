#pragma once

#include <gmpxx.h>

#include <cstdint>
#include <string>
#include <string_view>

namespace ergocap {

/// Exact rational number. GMP keeps values in canonical reduced form,
/// so equality and ordering are exact.
using Rat = mpq_class;

/// Builds a canonical rational from a numerator/denominator pair.
Rat rat(long num, long den = 1);

/// Parses "p/q", an integer, or a decimal literal ("0.25") into an exact
/// rational. Throws std::invalid_argument on malformed input.
Rat rat_parse(std::string_view text);

/// Canonical serialization, always with an explicit denominator ("3/4", "0/1").
std::string rat_str(const Rat& q);

double rat_double(const Rat& q);

Rat rat_abs(const Rat& q);

/// q^k for small nonnegative k.
Rat rat_pow(const Rat& q, unsigned k);

}  // namespace ergocap
