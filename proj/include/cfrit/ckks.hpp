#pragma once

#include <cstddef>
#include <cstdint>
#include <memory>
#include <mutex>
#include <string>
#include <vector>

#include <gmpxx.h>

#include "cfrit/ntt.hpp"
#include "cfrit/random.hpp"
#include "cfrit/ring.hpp"

namespace cfrit::ckks {

/// Scheme parameters. The modulus chain is q_l = 2^(log_q0 + l * log_scale),
/// so Delta = 2^log_scale and the sensitivity is gamma_c = 2^-log_scale.
struct Params {
  std::string name = "custom";
  std::size_t degree = 4096;
  int max_level = 10;
  unsigned log_q0 = 60;
  unsigned log_scale = 40;
  double sigma = 3.2;

  double gamma() const;
  unsigned modulus_bits(int level) const { return log_q0 + static_cast<unsigned>(level) * log_scale; }
  /// Special modulus P = q_L used by relinearisation.
  unsigned special_bits() const { return modulus_bits(max_level); }
  unsigned evk_bits() const { return special_bits() + modulus_bits(max_level); }
  void validate() const;

  /// d = 4096, L = 10. Reduced security, fast.
  static Params test();
  /// d = 32768, 21 moduli {60, 40, ..., 40} plus the special modulus.
  static Params secure128();
  static Params by_name(const std::string& name);
};

struct SecretKey {
  std::vector<std::int8_t> s;  ///< coefficients in {-1, 0, 1}
};

/// Everything the evaluator may see: encryption and evaluation keys.
class PublicKey {
 public:
  Params params;
  Poly pk0, pk1;    ///< mod q_L
  Poly evk0, evk1;  ///< mod P q_L

  /// Transforms of evk0/evk1 sized for a level-L relinearisation; built once.
  const NttForm& evk_form(int which) const;

 private:
  struct Cache {
    std::once_flag once;
    NttForm forms[2];
  };
  mutable std::shared_ptr<Cache> cache_ = std::make_shared<Cache>();
};

struct Keys {
  PublicKey pub;
  SecretKey secret;

  static Keys generate(const Params& params, RandomSource& rng);
};

struct Ciphertext {
  Poly ct0, ct1;
  int level = 0;
  int scale_power = 1;
  bool operator==(const Ciphertext&) const = default;
};

/// round(x / gamma) with halves away from zero. Throws RangeError if the
/// result exceeds `limit` in magnitude.
mpz_class encode(double x, double gamma, const mpz_class& limit);
/// Encoder with the default bound q0 / 2.
mpz_class encode(double x, const Params& params);
/// value * gamma^power.
double decode(const mpz_class& value, double gamma, int power);

/// Encryption at the top level. `scale_power` records the Delta factors the
/// plaintext carries.
Ciphertext encrypt(const PublicKey& pk, const mpz_class& m, RandomSource& rng, int scale_power = 1);
/// Same as mod_align(encrypt(...), level) without materialising the top-level ciphertext.
Ciphertext encrypt_at_level(const PublicKey& pk, const mpz_class& m, int level, RandomSource& rng,
                            int scale_power = 1);

/// Noise and mask supplied by the caller; for tests.
struct EncryptionNoise {
  std::vector<std::int64_t> v, e1, e2;
};
Ciphertext encrypt_with_noise(const PublicKey& pk, const mpz_class& m, const EncryptionNoise& noise,
                              int level, int scale_power = 1);

/// Constant coefficient of ct0 + ct1 sk, centred.
mpz_class decrypt(const SecretKey& sk, const Ciphertext& ct);
/// Full decrypted polynomial (centred residues are read with get_centered).
Poly decrypt_poly(const SecretKey& sk, const Ciphertext& ct);

Ciphertext add(const Ciphertext& a, const Ciphertext& b);
/// Tensor, relinearise, rescale. Result level is one lower.
Ciphertext mult(const Ciphertext& a, const Ciphertext& b, const PublicKey& pk);
/// Tensor and relinearise only (no rescale).
Ciphertext mult_no_rescale(const Ciphertext& a, const Ciphertext& b, const PublicKey& pk);
Ciphertext rescale(const Ciphertext& ct, const Params& params);

/// Sum of products a_t * b_t at one level, accumulated as tensors in the
/// transform domain with a single relinearisation and rescale at the end.
/// Agrees with the sum of mult(a_t, b_t) up to rescale rounding.
class ProductSum {
 public:
  /// Operand in transform form; reusable across many add() calls.
  struct Operand {
    NttForm c0, c1;
    int scale_power = 1;
  };

  ProductSum(const PublicKey& pk, int level, std::size_t max_terms);

  Operand transform(const Ciphertext& ct) const;
  void add(const Operand& a, const Operand& b);
  void add(const Ciphertext& a, const Ciphertext& b);
  std::size_t terms() const { return terms_; }
  /// Relinearised and rescaled sum, one level below the operands.
  Ciphertext result() const;

 private:
  const PublicKey* pk_;
  int level_;
  std::size_t max_terms_;
  std::size_t primes_ = 0;
  std::size_t terms_ = 0;
  int scale_power_ = 0;
  NttForm d0_, d1_, d2_;
};
Ciphertext mod_align(const Ciphertext& ct, int target_level, const Params& params);

}  // namespace cfrit::ckks
