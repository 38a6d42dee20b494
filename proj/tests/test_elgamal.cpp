#include <gtest/gtest.h>

#include <chrono>
#include <cmath>
#include <set>

#include "cfrit/bigint.hpp"
#include "cfrit/elgamal.hpp"
#include "cfrit/error.hpp"
#include "support.hpp"

using namespace cfrit;
using namespace cfrit::elgamal;

namespace {

// p = 23, q = 11, g = 2, s = 3, h = 2^3 = 8.
Keys toy23() {
  Keys k;
  k.pk = PublicKey{23, 11, 2, 8};
  k.sk = SecretKey{3};
  return k;
}

const Keys& keys512() {
  static const Keys k = [] {
    SeededRandom rng(512);
    return Keys::generate(512, rng);
  }();
  return k;
}

}  // namespace

TEST(ElGamal, ToyKnownAnswer) {
  const Keys k = toy23();
  EXPECT_NO_THROW(k.pk.validate());
  // c1 = 2^5 = 9, c2 = 8^5 * 4 = 16 * 4 = 18 (mod 23).
  const Ciphertext ct = encrypt_with_nonce(k.pk, 4, 5);
  EXPECT_EQ(ct.c1, 9);
  EXPECT_EQ(ct.c2, 18);
  EXPECT_EQ(decrypt(k.pk, k.sk, ct), 4);
}

TEST(ElGamal, ToyGroupMembershipIsExhaustive) {
  const Keys k = toy23();
  std::set<int> residues;
  for (int x = 1; x < 23; ++x) residues.insert(x * x % 23);
  for (int m = 0; m < 23; ++m) EXPECT_EQ(in_group(k.pk, m), residues.count(m) == 1) << m;
  EXPECT_EQ(residues.size(), 11u);
}

TEST(ElGamal, ToyHomomorphismExhaustive) {
  const Keys k = toy23();
  for (int a = 1; a < 23; ++a) {
    if (!in_group(k.pk, a)) continue;
    for (int b = 1; b < 23; ++b) {
      if (!in_group(k.pk, b)) continue;
      const auto prod = hmul(encrypt_with_nonce(k.pk, a, a % 11), encrypt_with_nonce(k.pk, b, b % 11), 23);
      EXPECT_EQ(decrypt(k.pk, k.sk, prod), a * b % 23);
    }
  }
  EXPECT_EQ(decrypt(k.pk, k.sk, trivial_one()), 1);
}

TEST(ElGamal, FromSafePrimeFindsSmallestGenerator) {
  SeededRandom rng(1);
  const Keys k = Keys::from_safe_prime(23, rng);
  EXPECT_EQ(k.pk.g, 2);
  EXPECT_EQ(k.pk.q, 11);
  EXPECT_THROW(Keys::from_safe_prime(29, rng), DomainError);  // 14 is not prime
}

TEST(ElGamal, RejectsBadInputs) {
  const Keys k = toy23();
  EXPECT_THROW(encrypt_with_nonce(k.pk, 5, 1), DomainError);  // 5 is a non-residue mod 23
  EXPECT_THROW(encrypt_with_nonce(k.pk, 4, 11), InvalidArgument);
  EXPECT_THROW(decrypt(k.pk, k.sk, Ciphertext{0, 4}), DomainError);
  EXPECT_THROW(decrypt(k.pk, k.sk, Ciphertext{4, 23}), DomainError);
  PublicKey bad = k.pk;
  bad.h = 5;
  EXPECT_THROW(bad.validate(), DomainError);
}

TEST(ElGamal, GeneratedKeysAreSafePrimes) {
  const auto& k = keys512();
  EXPECT_EQ(k.pk.bits(), 512u);
  EXPECT_TRUE(is_probable_prime(k.pk.p));
  EXPECT_TRUE(is_probable_prime(k.pk.q));
  EXPECT_NO_THROW(k.pk.validate());
}

TEST(ElGamal, GenerationHonoursItsBudget) {
  SeededRandom rng(2);
  EXPECT_THROW(Keys::generate(4096, rng, std::chrono::milliseconds(0)), GenerationTimeout);
}

TEST(ElGamal, BuiltInPrime) {
  const mpz_class& p = secure128_prime();
  EXPECT_EQ(mpz_sizeinbase(p.get_mpz_t(), 2), 3072u);
  EXPECT_TRUE(is_probable_prime((p - 1) / 2, 10));
  EXPECT_EQ(mpz_fdiv_ui(p.get_mpz_t(), 8), 7u);
}

TEST(ElGamal, SecureProfileUsesShortNonces) {
  SeededRandom seed(3);
  const Keys k = Keys::secure128(seed);
  EXPECT_EQ(k.pk.exponent_bits, 256u);
  EXPECT_LE(mpz_sizeinbase(k.sk.s.get_mpz_t(), 2), 256u);
  cfrit::testing::RecordingRandom rng(4);
  const Ciphertext ct = encrypt(k.pk, 4, rng);
  EXPECT_EQ(rng.words.size(), 4u);
  EXPECT_EQ(decrypt(k.pk, k.sk, ct), 4);
}

TEST(ElGamal, NoncesAreFreshPerEncryption) {
  const auto& k = keys512();
  cfrit::testing::RecordingRandom rng(5);
  std::set<std::string> c1s;
  for (int i = 0; i < 200; ++i) c1s.insert(encrypt(k.pk, 4, rng).c1.get_str(16));
  EXPECT_EQ(c1s.size(), 200u);
  const std::set<std::uint64_t> distinct(rng.words.begin(), rng.words.end());
  EXPECT_EQ(distinct.size(), rng.words.size());
}

TEST(Encoder, MinusOneAtSecureSize) {
  SeededRandom seed(6);
  const Keys k = Keys::secure128(seed);
  const double gamma = std::ldexp(1.0, -40);
  const EncodedScalar e = encode(-1.0, gamma, k.pk);
  const mpz_class target = k.pk.p - (mpz_class(1) << 40);
  EXPECT_LT(abs(e.m - target), 64);
  EXPECT_EQ(mpq_class(e.m - target), e.delta);
  const double back = decode(e.m, gamma, k.pk);
  EXPECT_LE(std::abs(back + 1.0), gamma * std::abs(e.delta.get_d()) + 1e-300);
}

TEST(Encoder, ZeroMapsToTheNearestElementAboveIt) {
  const Keys k = toy23();
  const EncodedScalar e = encode(0.0, 1.0, k.pk);
  EXPECT_EQ(e.m, 1);
  EXPECT_EQ(e.delta, 1);
}

TEST(Encoder, TiesResolveToTheSmallerElement) {
  // Residues mod 23 near 10.5 are 9 and 12, both 1.5 away; 10 and 11 are not residues.
  const Keys k = toy23();
  const EncodedScalar e = encode(10.5, 1.0, k.pk);
  EXPECT_EQ(e.m, 9);
}

TEST(Encoder, RangeAndSensitivityChecks) {
  const Keys k = toy23();
  EXPECT_THROW(encode(12.0, 1.0, k.pk), OverflowError);
  EXPECT_THROW(encode(-12.5, 1.0, k.pk), OverflowError);
  EXPECT_NO_THROW(encode(10.0, 1.0, k.pk));  // nearest residue 9 stays below q
  EXPECT_THROW(encode(1.0, 0.0, k.pk), InvalidArgument);
  EXPECT_THROW(encode(1.0, 2.0, k.pk), InvalidArgument);
}

TEST(Encoder, ProductErrorShrinksWithSensitivity) {
  const auto& k = keys512();
  SeededRandom rng(7);
  const double xs[] = {1.7, -2.3, 0.41, 3.9};
  double truth = 1;
  for (double x : xs) truth *= x;
  double previous = INFINITY;
  double last = 0;
  for (int e : {10, 20, 30, 40}) {
    const double gamma = std::ldexp(1.0, -e);
    Ciphertext acc = trivial_one();
    mpq_class gk = 1;
    for (double x : xs) {
      acc = hmul(acc, encrypt(k.pk, encode(x, gamma, k.pk).m, rng), k.pk.p);
      gk *= mpq_class(gamma);
    }
    const double got = to_double(decode_exact(decrypt(k.pk, k.sk, acc), gk, k.pk));
    const double err = std::abs(got - truth);
    EXPECT_LE(err, previous) << "gamma = 2^-" << e;
    previous = err;
    last = err;
  }
  EXPECT_LE(last, 1e-9 * std::abs(truth) + 1e-12);
}
