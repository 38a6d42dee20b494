#pragma once

#include <cstddef>
#include <cstdint>
#include <deque>
#include <mutex>
#include <vector>

#include "cfrit/ring.hpp"

namespace cfrit {

/// Degrees at or above this use the transform path in poly_mul.
inline constexpr std::size_t kTransformThreshold = 1024;

/// Residues of a polynomial modulo a prefix of the engine's primes, each row
/// in negacyclic transform domain (bit-reversed order).
struct NttForm {
  std::size_t degree = 0;
  std::size_t primes = 0;
  std::vector<std::uint64_t> data;  ///< primes x degree

  std::uint64_t* row(std::size_t p) { return data.data() + p * degree; }
  const std::uint64_t* row(std::size_t p) const { return data.data() + p * degree; }
};

/// Multi-prime negacyclic transform over 62-bit primes p = 1 (mod 65536),
/// with Garner reconstruction of the exact integer product. Exact as long as
/// the prime product exceeds twice the largest coefficient magnitude, which
/// `primes_for` guarantees.
class NttEngine {
 public:
  explicit NttEngine(std::size_t degree);

  /// Shared engine per degree (2 <= degree <= 32768).
  static const NttEngine& for_degree(std::size_t degree);

  /// Prime count for a product of centred operands of a_bits and b_bits.
  std::size_t primes_for(unsigned a_bits, unsigned b_bits) const;

  NttForm forward(const Poly& a, std::size_t primes) const;
  /// Exact centred coefficients reduced modulo 2^out_bits. Uses the first
  /// `form.primes` primes.
  Poly inverse(const NttForm& form, unsigned out_bits) const;

  /// acc += a * b pointwise, over the first acc.primes primes.
  void multiply_accumulate(NttForm& acc, const NttForm& a, const NttForm& b) const;
  NttForm pointwise(const NttForm& a, const NttForm& b, std::size_t primes) const;

  Poly multiply(const Poly& a, const Poly& b, unsigned out_bits) const;

  std::size_t degree() const { return degree_; }
  std::uint64_t prime(std::size_t i) const;

 private:
  struct PrimeTables {
    std::uint64_t p;
    std::vector<std::uint64_t> psi, psi_shoup;          // bit-reversed powers of psi
    std::vector<std::uint64_t> psi_inv, psi_inv_shoup;  // bit-reversed powers of psi^-1
    std::uint64_t n_inv, n_inv_shoup;
  };

  const PrimeTables& tables(std::size_t i) const;
  void forward_inplace(std::uint64_t* a, const PrimeTables& t) const;
  void inverse_inplace(std::uint64_t* a, const PrimeTables& t) const;

  std::size_t degree_;
  unsigned log_degree_;
  mutable std::mutex mutex_;
  mutable std::deque<PrimeTables> tables_;
};

}  // namespace cfrit
