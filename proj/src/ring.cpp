#include "cfrit/ring.hpp"

#include <algorithm>
#include <string>

#include "cfrit/error.hpp"
#include "cfrit/ntt.hpp"

namespace cfrit {

namespace {

using u128 = unsigned __int128;

std::size_t limbs_for(unsigned bits) { return (bits + 63) / 64; }

void require_same_shape(const Poly& a, const Poly& b, const char* what) {
  if (a.degree() != b.degree() || a.bits() != b.bits())
    throw AlignmentError(std::string(what) + ": operands differ in degree or modulus");
}

// Two's-complement negation in place over `n` words.
void negate_words(std::uint64_t* w, std::size_t n) {
  std::uint64_t carry = 1;
  for (std::size_t i = 0; i < n; ++i) {
    const std::uint64_t v = ~w[i] + carry;
    carry = (carry && v == 0) ? 1 : 0;
    w[i] = v;
  }
}

}  // namespace

Poly::Poly(std::size_t degree, unsigned bits)
    : degree_(degree), bits_(bits), limbs_(limbs_for(bits)), words_(degree * limbs_for(bits), 0) {
  if (degree == 0 || (degree & (degree - 1)) != 0)
    throw InvalidArgument("ring degree must be a power of two, got " + std::to_string(degree));
  if (bits == 0) throw InvalidArgument("ring modulus must have at least one bit");
}

void Poly::normalize() {
  const unsigned top = bits_ % 64;
  if (top == 0) return;
  const std::uint64_t mask = (std::uint64_t{1} << top) - 1;
  for (std::size_t i = 0; i < degree_; ++i) coeff(i)[limbs_ - 1] &= mask;
}

void Poly::set(std::size_t i, const mpz_class& v) {
  mpz_class r;
  mpz_fdiv_r_2exp(r.get_mpz_t(), v.get_mpz_t(), bits_);
  std::uint64_t* w = coeff(i);
  std::fill(w, w + limbs_, 0);
  std::size_t count = 0;
  mpz_export(w, &count, -1, sizeof(std::uint64_t), 0, 0, r.get_mpz_t());
}

void Poly::set(std::size_t i, std::int64_t v) {
  std::uint64_t* w = coeff(i);
  const std::uint64_t fill = v < 0 ? ~std::uint64_t{0} : 0;
  w[0] = static_cast<std::uint64_t>(v);
  for (std::size_t k = 1; k < limbs_; ++k) w[k] = fill;
  const unsigned top = bits_ % 64;
  if (top != 0) w[limbs_ - 1] &= (std::uint64_t{1} << top) - 1;
}

mpz_class Poly::get(std::size_t i) const {
  mpz_class out;
  mpz_import(out.get_mpz_t(), limbs_, -1, sizeof(std::uint64_t), 0, 0, coeff(i));
  return out;
}

bool Poly::is_negative(std::size_t i) const {
  // Negative iff v > 2^(bits-1): top bit set and some lower bit set.
  const unsigned top_bit = bits_ - 1;
  const std::uint64_t* w = coeff(i);
  if (((w[top_bit / 64] >> (top_bit % 64)) & 1) == 0) return false;
  for (std::size_t k = 0; k < limbs_; ++k) {
    std::uint64_t v = w[k];
    if (k == top_bit / 64) v &= ~(std::uint64_t{1} << (top_bit % 64));
    if (v != 0) return true;
  }
  return false;
}

mpz_class Poly::get_centered(std::size_t i) const {
  mpz_class v = get(i);
  if (is_negative(i)) {
    mpz_class m;
    mpz_ui_pow_ui(m.get_mpz_t(), 2, bits_);
    v -= m;
  }
  return v;
}

Poly Poly::reduced(unsigned new_bits) const {
  if (new_bits > bits_) throw InvalidArgument("Poly::reduced: target modulus is larger");
  Poly out(degree_, new_bits);
  for (std::size_t i = 0; i < degree_; ++i) std::copy_n(coeff(i), out.limbs_, out.coeff(i));
  out.normalize();
  return out;
}

Poly Poly::lifted(unsigned new_bits) const {
  if (new_bits < bits_) throw InvalidArgument("Poly::lifted: target modulus is smaller");
  Poly out(degree_, new_bits);
  for (std::size_t i = 0; i < degree_; ++i) {
    std::uint64_t* dst = out.coeff(i);
    std::copy_n(coeff(i), limbs_, dst);
    if (is_negative(i)) {
      // Sign-extend from bit `bits_ - 1`.
      const unsigned top = bits_ % 64;
      if (top != 0) dst[limbs_ - 1] |= ~((std::uint64_t{1} << top) - 1);
      for (std::size_t k = limbs_; k < out.limbs_; ++k) dst[k] = ~std::uint64_t{0};
    }
  }
  out.normalize();
  return out;
}

Poly poly_add(const Poly& a, const Poly& b) {
  require_same_shape(a, b, "poly_add");
  Poly out(a.degree(), a.bits());
  const std::size_t n = a.limbs();
  for (std::size_t i = 0; i < a.degree(); ++i) {
    std::uint64_t carry = 0;
    for (std::size_t k = 0; k < n; ++k) {
      const u128 s = static_cast<u128>(a.coeff(i)[k]) + b.coeff(i)[k] + carry;
      out.coeff(i)[k] = static_cast<std::uint64_t>(s);
      carry = static_cast<std::uint64_t>(s >> 64);
    }
  }
  out.normalize();
  return out;
}

Poly poly_negate(const Poly& a) {
  Poly out = a;
  for (std::size_t i = 0; i < a.degree(); ++i) negate_words(out.coeff(i), out.limbs());
  out.normalize();
  return out;
}

Poly poly_sub(const Poly& a, const Poly& b) {
  require_same_shape(a, b, "poly_sub");
  return poly_add(a, poly_negate(b));
}

Poly poly_shift_left(const Poly& a, unsigned shift) {
  Poly out(a.degree(), a.bits());
  const std::size_t n = a.limbs();
  const std::size_t word_shift = shift / 64;
  const unsigned bit_shift = shift % 64;
  for (std::size_t i = 0; i < a.degree(); ++i) {
    const std::uint64_t* src = a.coeff(i);
    std::uint64_t* dst = out.coeff(i);
    for (std::size_t k = n; k-- > word_shift;) {
      const std::size_t s = k - word_shift;
      std::uint64_t v = src[s] << bit_shift;
      if (bit_shift != 0 && s > 0) v |= src[s - 1] >> (64 - bit_shift);
      dst[k] = v;
    }
  }
  out.normalize();
  return out;
}

Poly poly_shift_round(const Poly& a, unsigned shift) {
  if (shift == 0) return a;
  if (shift >= a.bits()) throw InvalidArgument("poly_shift_round: shift exceeds modulus");
  const unsigned out_bits = a.bits() - shift;
  Poly out(a.degree(), out_bits);
  const std::size_t n = a.limbs();
  std::vector<std::uint64_t> mag(n + 1);
  const std::size_t word_shift = shift / 64;
  const unsigned bit_shift = shift % 64;
  for (std::size_t i = 0; i < a.degree(); ++i) {
    const bool negative = a.is_negative(i);
    std::copy_n(a.coeff(i), n, mag.begin());
    mag[n] = 0;
    if (negative) {
      // |v| = 2^bits - v fits in `bits` bits.
      negate_words(mag.data(), n);
      const unsigned top = a.bits() % 64;
      if (top != 0) mag[n - 1] &= (std::uint64_t{1} << top) - 1;
    }
    // Add 2^(shift-1) then truncate: rounds halves away from zero on |v|.
    {
      std::size_t k = (shift - 1) / 64;
      u128 s = static_cast<u128>(mag[k]) + (std::uint64_t{1} << ((shift - 1) % 64));
      mag[k] = static_cast<std::uint64_t>(s);
      std::uint64_t carry = static_cast<std::uint64_t>(s >> 64);
      while (carry && ++k <= n) {
        mag[k] += 1;
        carry = mag[k] == 0;
      }
    }
    std::uint64_t* dst = out.coeff(i);
    for (std::size_t k = 0; k < out.limbs(); ++k) {
      const std::size_t s = k + word_shift;
      std::uint64_t v = s <= n ? mag[s] >> bit_shift : 0;
      if (bit_shift != 0 && s + 1 <= n) v |= mag[s + 1] << (64 - bit_shift);
      dst[k] = v;
    }
    if (negative) negate_words(dst, out.limbs());
  }
  out.normalize();
  return out;
}

Poly poly_mul_schoolbook(const Poly& a, const Poly& b, unsigned out_bits) {
  if (a.degree() != b.degree()) throw AlignmentError("poly_mul: degree mismatch");
  const std::size_t d = a.degree();
  std::vector<mpz_class> av(d), bv(d), acc(d);
  for (std::size_t i = 0; i < d; ++i) {
    av[i] = a.get_centered(i);
    bv[i] = b.get_centered(i);
  }
  for (std::size_t i = 0; i < d; ++i) {
    if (av[i] == 0) continue;
    for (std::size_t j = 0; j < d; ++j) {
      const std::size_t k = i + j;
      if (k < d)
        acc[k] += av[i] * bv[j];
      else
        acc[k - d] -= av[i] * bv[j];  // X^d = -1
    }
  }
  Poly out(d, out_bits);
  for (std::size_t i = 0; i < d; ++i) out.set(i, acc[i]);
  return out;
}

Poly poly_mul(const Poly& a, const Poly& b, unsigned out_bits) {
  if (a.degree() < kTransformThreshold) return poly_mul_schoolbook(a, b, out_bits);
  return NttEngine::for_degree(a.degree()).multiply(a, b, out_bits);
}

Poly poly_from_small(const std::vector<std::int64_t>& coeffs, unsigned bits) {
  Poly out(coeffs.size(), bits);
  for (std::size_t i = 0; i < coeffs.size(); ++i) out.set(i, coeffs[i]);
  return out;
}

}  // namespace cfrit
