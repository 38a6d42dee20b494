#pragma once

#include <array>
#include <cstdint>
#include <optional>

#include <gmpxx.h>

namespace cfrit {

/// Injectable source of uniformly random 64-bit words. Every random draw in
/// the toolkit (keys, nonces, noise) goes through one of these.
class RandomSource {
 public:
  virtual ~RandomSource() = default;
  virtual std::uint64_t next_u64() = 0;

  /// Uniform in [0, bound) by rejection. bound > 0.
  std::uint64_t uniform_below(std::uint64_t bound);
  /// Uniform in [0, bound) for big bounds. bound > 0.
  mpz_class uniform_below(const mpz_class& bound);
  /// Uniform integer with exactly `bits` random bits (value < 2^bits).
  mpz_class uniform_bits(unsigned bits);
  /// Uniform double in [0, 1) with 53 random bits.
  double uniform_unit();
};

/// Deterministic ChaCha20 keystream. The key is BLAKE2b(seed), so two sources
/// built from the same seed produce identical streams on every platform.
class SeededRandom final : public RandomSource {
 public:
  explicit SeededRandom(std::uint64_t seed);
  std::uint64_t next_u64() override;

 private:
  void refill();

  std::array<unsigned char, 32> key_{};
  std::uint64_t block_counter_ = 0;
  std::array<std::uint64_t, 64> buffer_{};
  std::size_t pos_ = buffer_.size();
};

/// Operating-system entropy.
class SystemRandom final : public RandomSource {
 public:
  SystemRandom();
  std::uint64_t next_u64() override;
};

/// Discrete Gaussian sample (rounded continuous Gaussian, truncated at 6 sigma).
std::int64_t sample_gaussian(RandomSource& rng, double sigma);

/// Returns a seeded source when `seed` is set, otherwise system entropy.
class RandomHandle {
 public:
  explicit RandomHandle(std::optional<std::uint64_t> seed);
  RandomSource& get();

 private:
  std::optional<SeededRandom> seeded_;
  SystemRandom system_;
};

}  // namespace cfrit
