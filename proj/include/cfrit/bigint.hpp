#pragma once

#include <string>

#include <gmpxx.h>

namespace cfrit {

/// Lowercase hex, with a leading '-' for negative values.
std::string to_hex(const mpz_class& v);
/// Accepts optional '-' and optional "0x"; throws InvalidArgument on junk.
mpz_class from_hex(const std::string& s);

/// Exact rational value of a finite double.
mpq_class exact_rational(double x);

/// Nearest integer, halves rounded away from zero.
mpz_class round_half_away(const mpq_class& v);

/// Conversion accurate to one ulp; saturates to +-inf outside the double range.
double to_double(const mpq_class& v);

/// Miller-Rabin with `reps` rounds (GMP's probable-prime test).
bool is_probable_prime(const mpz_class& v, int reps = 40);

}  // namespace cfrit
