#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include <gmpxx.h>

namespace cfrit {

/// Element of Z_{2^bits}[X]/(X^d + 1). Each coefficient is stored as
/// `limbs()` little-endian 64-bit words with the bits above `bits` kept zero.
/// The centred representative lies in (-2^(bits-1), 2^(bits-1)].
class Poly {
 public:
  Poly() = default;
  Poly(std::size_t degree, unsigned bits);

  std::size_t degree() const { return degree_; }
  unsigned bits() const { return bits_; }
  std::size_t limbs() const { return limbs_; }

  std::uint64_t* coeff(std::size_t i) { return words_.data() + i * limbs_; }
  const std::uint64_t* coeff(std::size_t i) const { return words_.data() + i * limbs_; }

  /// Stores v mod 2^bits.
  void set(std::size_t i, const mpz_class& v);
  void set(std::size_t i, std::int64_t v);
  /// Residue in [0, 2^bits).
  mpz_class get(std::size_t i) const;
  mpz_class get_centered(std::size_t i) const;
  bool is_negative(std::size_t i) const;

  /// Coefficients reduced modulo 2^new_bits (new_bits <= bits).
  Poly reduced(unsigned new_bits) const;
  /// Centred lift into a larger modulus 2^new_bits (sign extension).
  Poly lifted(unsigned new_bits) const;

  /// Clears the bits above `bits` in every coefficient.
  void normalize();

  bool operator==(const Poly& o) const {
    return degree_ == o.degree_ && bits_ == o.bits_ && words_ == o.words_;
  }

 private:
  std::size_t degree_ = 0;
  unsigned bits_ = 0;
  std::size_t limbs_ = 0;
  std::vector<std::uint64_t> words_;
};

Poly poly_add(const Poly& a, const Poly& b);
Poly poly_sub(const Poly& a, const Poly& b);
Poly poly_negate(const Poly& a);
/// a * 2^shift, modulo 2^(a.bits()).
Poly poly_shift_left(const Poly& a, unsigned shift);
/// round(centred(a) / 2^shift) with halves away from zero, modulo 2^(a.bits() - shift).
Poly poly_shift_round(const Poly& a, unsigned shift);

/// Negacyclic product modulo 2^out_bits by the quadratic definition. Reference
/// oracle for the transform path.
Poly poly_mul_schoolbook(const Poly& a, const Poly& b, unsigned out_bits);

/// Negacyclic product modulo 2^out_bits: transform-based for degree >= 1024,
/// schoolbook below. Both give identical results.
Poly poly_mul(const Poly& a, const Poly& b, unsigned out_bits);

/// Polynomial with small signed coefficients, stored modulo 2^bits.
Poly poly_from_small(const std::vector<std::int64_t>& coeffs, unsigned bits);

}  // namespace cfrit
