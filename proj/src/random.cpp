#include "cfrit/random.hpp"

#include <cmath>
#include <cstring>
#include <limits>
#include <numbers>
#include <stdexcept>

#include <sodium.h>

namespace cfrit {

namespace {

void ensure_sodium() {
  static const bool ok = sodium_init() >= 0;
  if (!ok) throw std::runtime_error("libsodium initialisation failed");
}

}  // namespace

std::uint64_t RandomSource::uniform_below(std::uint64_t bound) {
  if (bound == 0) throw std::invalid_argument("uniform_below: bound must be positive");
  const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() -
                              std::numeric_limits<std::uint64_t>::max() % bound;
  for (;;) {
    const std::uint64_t r = next_u64();
    if (r < limit) return r % bound;
  }
}

mpz_class RandomSource::uniform_bits(unsigned bits) {
  mpz_class out = 0;
  unsigned remaining = bits;
  while (remaining > 0) {
    const unsigned take = remaining >= 64 ? 64 : remaining;
    std::uint64_t word = next_u64();
    if (take < 64) word &= (std::uint64_t{1} << take) - 1;
    out <<= take;
    mpz_class w;
    mpz_import(w.get_mpz_t(), 1, 1, sizeof(word), 0, 0, &word);
    out += w;
    remaining -= take;
  }
  return out;
}

mpz_class RandomSource::uniform_below(const mpz_class& bound) {
  if (bound <= 0) throw std::invalid_argument("uniform_below: bound must be positive");
  const unsigned bits = static_cast<unsigned>(mpz_sizeinbase(bound.get_mpz_t(), 2));
  for (;;) {
    mpz_class r = uniform_bits(bits);
    if (r < bound) return r;
  }
}

double RandomSource::uniform_unit() {
  return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
}

SeededRandom::SeededRandom(std::uint64_t seed) {
  ensure_sodium();
  unsigned char in[8];
  for (int i = 0; i < 8; ++i) in[i] = static_cast<unsigned char>(seed >> (8 * i));
  crypto_generichash(key_.data(), key_.size(), in, sizeof(in), nullptr, 0);
}

void SeededRandom::refill() {
  unsigned char nonce[crypto_stream_chacha20_NONCEBYTES];
  for (std::size_t i = 0; i < sizeof(nonce); ++i)
    nonce[i] = static_cast<unsigned char>(block_counter_ >> (8 * i));
  ++block_counter_;
  unsigned char bytes[sizeof(buffer_)];
  crypto_stream_chacha20(bytes, sizeof(bytes), nonce, key_.data());
  for (std::size_t i = 0; i < buffer_.size(); ++i) {
    std::uint64_t w = 0;
    for (int b = 7; b >= 0; --b) w = (w << 8) | bytes[8 * i + static_cast<std::size_t>(b)];
    buffer_[i] = w;
  }
  pos_ = 0;
}

std::uint64_t SeededRandom::next_u64() {
  if (pos_ == buffer_.size()) refill();
  return buffer_[pos_++];
}

SystemRandom::SystemRandom() { ensure_sodium(); }

std::uint64_t SystemRandom::next_u64() {
  std::uint64_t w;
  randombytes_buf(&w, sizeof(w));
  return w;
}

std::int64_t sample_gaussian(RandomSource& rng, double sigma) {
  if (sigma <= 0.0) return 0;
  const double bound = 6.0 * sigma;
  for (;;) {
    double u1 = rng.uniform_unit();
    const double u2 = rng.uniform_unit();
    if (u1 <= 0.0) u1 = 0x1.0p-53;
    const double z = std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
    const double v = z * sigma;
    if (std::fabs(v) <= bound) return static_cast<std::int64_t>(std::llround(v));
  }
}

RandomHandle::RandomHandle(std::optional<std::uint64_t> seed) {
  if (seed) seeded_.emplace(*seed);
}

RandomSource& RandomHandle::get() {
  if (seeded_) return *seeded_;
  return system_;
}

}  // namespace cfrit
