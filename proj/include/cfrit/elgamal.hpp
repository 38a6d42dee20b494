#pragma once

#include <chrono>
#include <cstddef>

#include <gmpxx.h>

#include "cfrit/random.hpp"

namespace cfrit::elgamal {

/// Public parameters. The plaintext group G is the order-q subgroup of
/// quadratic residues modulo the safe prime p = 2q + 1.
struct PublicKey {
  mpz_class p, q, g, h;
  /// Bit length of encryption nonces; 0 draws them uniformly from Z_q.
  /// Large groups use short exponents (twice the security level).
  unsigned exponent_bits = 0;

  std::size_t bits() const { return mpz_sizeinbase(p.get_mpz_t(), 2); }
  /// Throws DomainError if the structural invariants fail (primality is checked by the loaders).
  void validate() const;
};

struct SecretKey {
  mpz_class s;
};

struct Keys {
  PublicKey pk;
  SecretKey sk;

  /// Random safe prime with `bits`-bit p. Throws GenerationTimeout once `budget` is spent.
  static Keys generate(unsigned bits, RandomSource& rng,
                       std::chrono::milliseconds budget = std::chrono::seconds(60));
  /// Keys over a caller-supplied safe prime (e.g. 23 for exhaustive tests).
  static Keys from_safe_prime(const mpz_class& p, RandomSource& rng);
  /// 3072-bit profile over the built-in safe prime; 256-bit secret and nonces.
  static Keys secure128(RandomSource& rng);
};

/// Built-in 3072-bit safe prime, primality re-verified on first use.
const mpz_class& secure128_prime();

struct Ciphertext {
  mpz_class c1, c2;
  bool operator==(const Ciphertext&) const = default;
};

/// Result of quantising a real into G.
struct EncodedScalar {
  mpz_class m;
  /// Signed offset m - (x/gamma + p [x<0]); the decoded value is x + gamma * delta.
  mpq_class delta;
  int gamma_exponent = 1;
};

/// Legendre-symbol test, equivalent to v^q = 1 (mod p) for 0 < v < p.
bool in_group(const PublicKey& pk, const mpz_class& v);

Ciphertext encrypt(const PublicKey& pk, const mpz_class& m, RandomSource& rng);
/// Deterministic encryption with a caller-chosen nonce; for tests and known-answer checks.
Ciphertext encrypt_with_nonce(const PublicKey& pk, const mpz_class& m, const mpz_class& r);
/// (1, 1): the encryption of 1 with r = 0, the neutral element of hmul.
Ciphertext trivial_one();

mpz_class decrypt(const PublicKey& pk, const SecretKey& sk, const Ciphertext& ct);

Ciphertext hmul(const Ciphertext& a, const Ciphertext& b, const mpz_class& p);

/// Nearest element of G to x/gamma + p [x<0]; ties resolve to the smaller element.
/// Requires 0 < gamma <= 1 and -q-1 < x/gamma <= q, else OverflowError.
EncodedScalar encode(double x, double gamma, const PublicKey& pk);

/// gamma_power * (m - p [m > q]).
double decode(const mpz_class& m, double gamma_power, const PublicKey& pk);
mpq_class decode_exact(const mpz_class& m, const mpq_class& gamma_power, const PublicKey& pk);

}  // namespace cfrit::elgamal
