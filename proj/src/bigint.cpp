#include "cfrit/bigint.hpp"

#include <cmath>
#include <limits>

#include "cfrit/error.hpp"

namespace cfrit {

std::string to_hex(const mpz_class& v) { return v.get_str(16); }

mpz_class from_hex(const std::string& s) {
  std::string body = s;
  bool negative = false;
  if (!body.empty() && body.front() == '-') {
    negative = true;
    body.erase(0, 1);
  }
  if (body.size() >= 2 && body[0] == '0' && (body[1] == 'x' || body[1] == 'X')) body.erase(0, 2);
  mpz_class out;
  if (body.empty() || out.set_str(body, 16) != 0)
    throw InvalidArgument("malformed hex integer '" + s.substr(0, 32) + "'");
  return negative ? mpz_class(-out) : out;
}

mpq_class exact_rational(double x) {
  if (!std::isfinite(x)) throw InvalidArgument("exact_rational: value is not finite");
  mpq_class out(x);  // mpq_set_d is exact
  return out;
}

mpz_class round_half_away(const mpq_class& v) {
  mpq_class a = abs(v);
  a += mpq_class(1, 2);
  mpz_class r = a.get_num() / a.get_den();  // floor for non-negative values
  return sgn(v) < 0 ? mpz_class(-r) : r;
}

double to_double(const mpq_class& v) {
  // Exponent of the quotient is bounded by the bit lengths; reject early
  // rather than letting mpq_get_d misbehave on huge values.
  const long num_bits = static_cast<long>(mpz_sizeinbase(v.get_num_mpz_t(), 2));
  const long den_bits = static_cast<long>(mpz_sizeinbase(v.get_den_mpz_t(), 2));
  if (sgn(v) == 0) return 0.0;
  if (num_bits - den_bits > 1025)
    return sgn(v) < 0 ? -std::numeric_limits<double>::infinity()
                      : std::numeric_limits<double>::infinity();
  if (num_bits - den_bits < -1100) return 0.0;
  // Truncate to a ~64-bit integer quotient, then to 53 bits: error < 1 ulp.
  const long shift = 64 - (num_bits - den_bits);
  mpz_class scaled;
  if (shift >= 0) {
    scaled = (v.get_num() << static_cast<mp_bitcnt_t>(shift)) / v.get_den();
  } else {
    scaled = v.get_num() / (v.get_den() << static_cast<mp_bitcnt_t>(-shift));
  }
  return std::ldexp(scaled.get_d(), static_cast<int>(-shift));
}

bool is_probable_prime(const mpz_class& v, int reps) {
  return mpz_probab_prime_p(v.get_mpz_t(), reps) > 0;
}

}  // namespace cfrit
