#include "cfrit/elgamal.hpp"

#include <string>

#include "cfrit/bigint.hpp"
#include "cfrit/error.hpp"

namespace cfrit::elgamal {

namespace {

// RFC 3526 3072-bit MODP prime; (p - 1) / 2 is prime and p = 7 (mod 8).
constexpr const char* kSecurePrimeHex =
    "ffffffffffffffffc90fdaa22168c234c4c6628b80dc1cd129024e088a67cc74020bbea63b139b22514a0879"
    "8e3404ddef9519b3cd3a431b302b0a6df25f14374fe1356d6d51c245e485b576625e7ec6f44c42e9a637ed6b"
    "0bff5cb6f406b7edee386bfb5a899fa5ae9f24117c4b1fe649286651ece45b3dc2007cb8a163bf0598da4836"
    "1c55d39a69163fa8fd24cf5f83655d23dca3ad961c62f356208552bb9ed529077096966d670c354e4abc9804"
    "f1746c08ca18217c32905e462e36ce3be39e772c180e86039b2783a2ec07a28fb5c55df06f4c52c9de2bcbf6"
    "955817183995497cea956ae515d2261898fa051015728e5a8aaac42dad33170d04507a33a85521abdf1cba64"
    "ecfb850458dbef0a8aea71575d060c7db3970f85a6e1e4c7abf5ae8cdb0933d71e8c94e04a25619dcee3d226"
    "1ad2ee6bf12ffa06d98a0864d87602733ec86a64521f2b18177b200cbbe117577a615d6c770988c0bad946e2"
    "08e24fa074e5ab3143db5bfce0fd108e4b82d120a93ad2caffffffffffffffff";

// Secret exponents use GMP's side-channel-silent ladder.
mpz_class powm_secret(const mpz_class& base, const mpz_class& exp, const mpz_class& mod) {
  if (exp == 0) return 1;
  mpz_class out;
  mpz_powm_sec(out.get_mpz_t(), base.get_mpz_t(), exp.get_mpz_t(), mod.get_mpz_t());
  return out;
}

mpz_class smallest_generator(const PublicKey& pk) {
  for (mpz_class g = 2; g < pk.p; ++g)
    if (in_group(pk, g)) return g;
  throw DomainError("no generator found for the quadratic-residue subgroup");
}

Keys keys_over(const mpz_class& p, const mpz_class& s) {
  Keys keys;
  keys.pk.p = p;
  keys.pk.q = (p - 1) / 2;
  keys.pk.g = smallest_generator(keys.pk);
  keys.sk.s = s;
  keys.pk.h = powm_secret(keys.pk.g, s, p);
  return keys;
}

}  // namespace

void PublicKey::validate() const {
  if (p < 5 || p != 2 * q + 1) throw DomainError("ElGamal key: p must equal 2q + 1");
  if (g <= 1 || g >= p || !in_group(*this, g)) throw DomainError("ElGamal key: g must generate G");
  if (h <= 0 || h >= p || !in_group(*this, h)) throw DomainError("ElGamal key: h must lie in G");
  if (exponent_bits > 0 && exponent_bits < 128)
    throw DomainError("ElGamal key: short exponents must have at least 128 bits");
}

const mpz_class& secure128_prime() {
  static const mpz_class p = [] {
    mpz_class v = from_hex(kSecurePrimeHex);
    if (!is_probable_prime(v, 25) || !is_probable_prime((v - 1) / 2, 25))
      throw DomainError("built-in 3072-bit modulus failed the safe-prime check");
    return v;
  }();
  return p;
}

Keys Keys::generate(unsigned bits, RandomSource& rng, std::chrono::milliseconds budget) {
  if (bits < 3) throw InvalidArgument("ElGamal: key length must be at least 3 bits");
  const auto deadline = std::chrono::steady_clock::now() + budget;
  for (std::size_t attempt = 0;; ++attempt) {
    if ((attempt & 63) == 0 && std::chrono::steady_clock::now() > deadline)
      throw GenerationTimeout("safe-prime search for " + std::to_string(bits) +
                              "-bit p exceeded its time budget");
    mpz_class q = rng.uniform_bits(bits - 1);
    mpz_setbit(q.get_mpz_t(), bits - 2);
    mpz_setbit(q.get_mpz_t(), 0);
    if (bits > 4 && mpz_fdiv_ui(q.get_mpz_t(), 3) != 2) continue;  // else 3 | 2q + 1
    if (!is_probable_prime(q, 25)) continue;
    const mpz_class p = 2 * q + 1;
    if (!is_probable_prime(p, 25)) continue;
    return from_safe_prime(p, rng);
  }
}

Keys Keys::from_safe_prime(const mpz_class& p, RandomSource& rng) {
  const mpz_class q = (p - 1) / 2;
  if (p < 5 || !is_probable_prime(p) || !is_probable_prime(q))
    throw DomainError("ElGamal: " + p.get_str() + " is not a safe prime");
  // s uniform in [1, q).
  return keys_over(p, rng.uniform_below(mpz_class(q - 1)) + 1);
}

Keys Keys::secure128(RandomSource& rng) {
  const mpz_class& p = secure128_prime();
  mpz_class s;
  do {
    s = rng.uniform_bits(256);
  } while (s == 0);
  Keys keys = keys_over(p, s);
  keys.pk.exponent_bits = 256;
  return keys;
}

bool in_group(const PublicKey& pk, const mpz_class& v) {
  if (v <= 0 || v >= pk.p) return false;
  return mpz_legendre(v.get_mpz_t(), pk.p.get_mpz_t()) == 1;
}

Ciphertext encrypt_with_nonce(const PublicKey& pk, const mpz_class& m, const mpz_class& r) {
  if (!in_group(pk, m)) throw DomainError("ElGamal: plaintext is not in the subgroup G");
  if (r < 0 || r >= pk.q) throw InvalidArgument("ElGamal: nonce must lie in Z_q");
  Ciphertext ct;
  ct.c1 = powm_secret(pk.g, r, pk.p);
  ct.c2 = powm_secret(pk.h, r, pk.p) * m % pk.p;
  return ct;
}

Ciphertext encrypt(const PublicKey& pk, const mpz_class& m, RandomSource& rng) {
  if (pk.exponent_bits > 0 && pk.exponent_bits < pk.bits() - 1)
    return encrypt_with_nonce(pk, m, rng.uniform_bits(pk.exponent_bits));
  return encrypt_with_nonce(pk, m, rng.uniform_below(pk.q));
}

Ciphertext trivial_one() { return Ciphertext{1, 1}; }

mpz_class decrypt(const PublicKey& pk, const SecretKey& sk, const Ciphertext& ct) {
  if (ct.c1 <= 0 || ct.c1 >= pk.p || ct.c2 <= 0 || ct.c2 >= pk.p)
    throw DomainError("ElGamal: ciphertext component outside [1, p)");
  mpz_class mask = powm_secret(ct.c1, sk.s, pk.p);
  mpz_invert(mask.get_mpz_t(), mask.get_mpz_t(), pk.p.get_mpz_t());
  return mask * ct.c2 % pk.p;
}

Ciphertext hmul(const Ciphertext& a, const Ciphertext& b, const mpz_class& p) {
  return Ciphertext{a.c1 * b.c1 % p, a.c2 * b.c2 % p};
}

EncodedScalar encode(double x, double gamma, const PublicKey& pk) {
  if (!(gamma > 0.0) || gamma > 1.0) throw InvalidArgument("ElGamal: sensitivity must lie in (0, 1]");
  const mpq_class scaled = exact_rational(x) / exact_rational(gamma);
  if (scaled > pk.q || scaled <= -pk.q - 1)
    throw OverflowError("ElGamal: |x/gamma| = " + std::to_string(x / gamma) +
                        " exceeds the plaintext range q (" + std::to_string(pk.bits() - 1) +
                        "-bit)");
  const bool negative = sgn(scaled) < 0;
  const mpq_class target = negative ? mpq_class(scaled + pk.p) : scaled;

  // Walk outward from the target, always testing the closer unvisited side first.
  mpz_class lo = target.get_num() / target.get_den();  // floor; target >= 0
  mpz_class hi = lo + 1;
  mpz_class m;
  for (;;) {
    const mpq_class dl = target - lo;
    const mpq_class dh = hi - target;
    if (lo >= 1 && dl <= dh) {
      if (in_group(pk, lo)) { m = lo; break; }
      --lo;
    } else if (hi < pk.p) {
      if (in_group(pk, hi)) { m = hi; break; }
      ++hi;
    } else if (lo >= 1) {
      if (in_group(pk, lo)) { m = lo; break; }
      --lo;
    } else {
      throw DomainError("ElGamal: subgroup is empty");
    }
  }
  if (negative != (m > pk.q))
    throw OverflowError("ElGamal: x/gamma lies too close to q; encoding would flip sign");
  EncodedScalar out;
  out.delta = mpq_class(m) - target;
  out.m = std::move(m);
  out.gamma_exponent = 1;
  return out;
}

mpq_class decode_exact(const mpz_class& m, const mpq_class& gamma_power, const PublicKey& pk) {
  if (m < 0 || m >= pk.p) throw DomainError("ElGamal: decode input outside [0, p)");
  const mpz_class centred = m > pk.q ? mpz_class(m - pk.p) : m;
  return gamma_power * centred;
}

double decode(const mpz_class& m, double gamma_power, const PublicKey& pk) {
  return to_double(decode_exact(m, exact_rational(gamma_power), pk));
}

}  // namespace cfrit::elgamal
