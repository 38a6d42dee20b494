#pragma once

// Test-only oracles and doubles. Nothing here calls into the code under test
// for the value it is supposed to check.

#include <cstdint>
#include <functional>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include <gmpxx.h>

#include "cfrit/frit.hpp"
#include "cfrit/plant.hpp"
#include "cfrit/random.hpp"

namespace cfrit::testing {

/// Seeded source that remembers every word it hands out.
class RecordingRandom final : public RandomSource {
 public:
  explicit RecordingRandom(std::uint64_t seed) : inner_(seed) {}
  std::uint64_t next_u64() override {
    words.push_back(inner_.next_u64());
    return words.back();
  }
  std::vector<std::uint64_t> words;

 private:
  SeededRandom inner_;
};

/// Replays a fixed list of words, then fails loudly.
class ScriptedRandom final : public RandomSource {
 public:
  explicit ScriptedRandom(std::vector<std::uint64_t> words) : words_(std::move(words)) {}
  std::uint64_t next_u64() override;

 private:
  std::vector<std::uint64_t> words_;
  std::size_t pos_ = 0;
};

// ---- exact rational linear algebra -------------------------------------

using RationalMatrix = std::vector<std::vector<mpq_class>>;

RationalMatrix to_rational(const Matrix& m);
Matrix to_double(const RationalMatrix& m);
/// Gauss-Jordan with exact pivots; nullopt when singular.
std::optional<RationalMatrix> exact_inverse(const RationalMatrix& m);
mpq_class exact_determinant(RationalMatrix m);
/// Solves (W^T W) f = -W^T Gamma exactly over the rationals.
std::optional<std::vector<mpq_class>> exact_normal_equation_gain(const Vector& gamma, const Matrix& w);

// ---- signal processing -------------------------------------------------

/// First `len` samples of the impulse response of num/den by polynomial long
/// division in z^-1 (both padded to the same order).
std::vector<double> impulse_response(const std::vector<double>& num, const std::vector<double>& den,
                                     std::size_t len);
/// Causal convolution of `x` with the impulse response.
Vector convolve(const std::vector<double>& h, const Vector& x);

// ---- polynomial ring ---------------------------------------------------

/// Negacyclic product of centred integer vectors, reduced mod 2^bits and centred.
std::vector<mpz_class> negacyclic_product(const std::vector<mpz_class>& a,
                                          const std::vector<mpz_class>& b, unsigned bits);
/// Centred representative of v mod 2^bits in (-2^(bits-1), 2^(bits-1)].
mpz_class centre(const mpz_class& v, unsigned bits);

// ---- random generators -------------------------------------------------

/// Symmetric positive definite n x n with condition number at most `max_cond`.
Matrix random_spd(std::mt19937_64& gen, std::size_t n, double max_cond);
/// Regression data with well-conditioned W.
FritData random_frit_data(std::mt19937_64& gen, std::size_t n, std::size_t N);
double uniform(std::mt19937_64& gen, double lo, double hi);
mpz_class random_mpz(std::mt19937_64& gen, unsigned bits);

// ---- property harness --------------------------------------------------

struct PropertyResult {
  std::string name;
  std::size_t cases = 0;
  std::size_t failures = 0;
  std::string first_failure;
  bool ok() const { return failures == 0 && cases > 0; }
};

/// A case returns nullopt on success or a description of the counterexample.
using PropertyCase = std::function<std::optional<std::string>(std::mt19937_64&, std::size_t)>;

PropertyResult check_property(const std::string& name, std::size_t cases, std::uint64_t seed,
                              const PropertyCase& body);

}  // namespace cfrit::testing
