#include "cfrit/ntt.hpp"

#include <algorithm>
#include <map>
#include <memory>
#include <string>

#include <gmpxx.h>

#include "cfrit/bigint.hpp"
#include "cfrit/error.hpp"

namespace cfrit {

namespace {

using u128 = unsigned __int128;

constexpr std::size_t kMaxDegree = 32768;
constexpr std::uint64_t kPrimeStep = 2 * kMaxDegree;

std::uint64_t mulmod(std::uint64_t a, std::uint64_t b, std::uint64_t p) {
  return static_cast<std::uint64_t>(static_cast<u128>(a) * b % p);
}

std::uint64_t powmod(std::uint64_t b, std::uint64_t e, std::uint64_t p) {
  std::uint64_t r = 1;
  b %= p;
  while (e) {
    if (e & 1) r = mulmod(r, b, p);
    b = mulmod(b, b, p);
    e >>= 1;
  }
  return r;
}

std::uint64_t shoup(std::uint64_t w, std::uint64_t p) {
  return static_cast<std::uint64_t>((static_cast<u128>(w) << 64) / p);
}

// a * w mod p for any 64-bit a, given w' = floor(w 2^64 / p).
inline std::uint64_t mul_shoup(std::uint64_t a, std::uint64_t w, std::uint64_t w_shoup,
                               std::uint64_t p) {
  const auto q = static_cast<std::uint64_t>((static_cast<u128>(a) * w_shoup) >> 64);
  std::uint64_t r = a * w - q * p;
  return r >= p ? r - p : r;
}

inline std::uint64_t add_mod(std::uint64_t a, std::uint64_t b, std::uint64_t p) {
  const std::uint64_t s = a + b;
  return s >= p ? s - p : s;
}

inline std::uint64_t sub_mod(std::uint64_t a, std::uint64_t b, std::uint64_t p) {
  return a >= b ? a - b : a + p - b;
}

unsigned bit_reverse(unsigned v, unsigned bits) {
  unsigned r = 0;
  for (unsigned i = 0; i < bits; ++i) r |= ((v >> i) & 1u) << (bits - 1 - i);
  return r;
}

// Descending primes in (2^61, 2^62) congruent to 1 mod 2^16, shared by all degrees.
std::uint64_t nth_prime(std::size_t i) {
  static std::mutex mutex;
  static std::vector<std::uint64_t> primes;
  std::lock_guard<std::mutex> lock(mutex);
  std::uint64_t candidate =
      primes.empty() ? ((std::uint64_t{1} << 62) / kPrimeStep) * kPrimeStep + 1 : primes.back();
  while (primes.size() <= i) {
    candidate -= kPrimeStep;
    if (candidate < (std::uint64_t{1} << 61)) throw CapacityError("NTT prime pool exhausted");
    if (is_probable_prime(mpz_class(static_cast<unsigned long>(candidate)), 30))
      primes.push_back(candidate);
  }
  return primes[i];
}

// Primitive 2d-th root of unity modulo p.
std::uint64_t find_psi(std::uint64_t p, std::size_t degree) {
  const std::uint64_t order = 2 * degree;
  for (std::uint64_t x = 2;; ++x) {
    const std::uint64_t psi = powmod(x, (p - 1) / order, p);
    if (powmod(psi, degree, p) == p - 1) return psi;
  }
}

// Constants for Garner reconstruction over the first t primes and output width.
struct GarnerPlan {
  std::vector<std::uint64_t> primes;
  std::vector<std::vector<std::uint64_t>> inv, inv_shoup;  // p_j^-1 mod p_i, j < i
  std::vector<std::uint64_t> half_digits;                  // mixed-radix digits of floor(P/2)
  std::vector<std::vector<std::uint64_t>> radix_low;       // prod_{j<i} p_j mod 2^(64 limbs)
  std::vector<std::uint64_t> modulus_low;                  // P mod 2^(64 limbs)
};

std::vector<std::uint64_t> low_words(const mpz_class& v, std::size_t limbs) {
  mpz_class r;
  mpz_fdiv_r_2exp(r.get_mpz_t(), v.get_mpz_t(), 64 * limbs);
  std::vector<std::uint64_t> out(limbs, 0);
  std::size_t count = 0;
  mpz_export(out.data(), &count, -1, sizeof(std::uint64_t), 0, 0, r.get_mpz_t());
  return out;
}

std::shared_ptr<const GarnerPlan> garner_plan(const NttEngine& engine, std::size_t t,
                                              std::size_t limbs) {
  static std::mutex mutex;
  static std::map<std::pair<std::size_t, std::size_t>, std::shared_ptr<const GarnerPlan>> cache;
  {
    std::lock_guard<std::mutex> lock(mutex);
    auto it = cache.find({t, limbs});
    if (it != cache.end()) return it->second;
  }
  auto plan = std::make_shared<GarnerPlan>();
  plan->primes.resize(t);
  for (std::size_t i = 0; i < t; ++i) plan->primes[i] = engine.prime(i);
  plan->inv.assign(t, {});
  plan->inv_shoup.assign(t, {});
  for (std::size_t i = 0; i < t; ++i) {
    const std::uint64_t pi = plan->primes[i];
    for (std::size_t j = 0; j < i; ++j) {
      const std::uint64_t v = powmod(plan->primes[j] % pi, pi - 2, pi);
      plan->inv[i].push_back(v);
      plan->inv_shoup[i].push_back(shoup(v, pi));
    }
  }
  mpz_class P = 1;
  for (std::size_t i = 0; i < t; ++i) {
    plan->radix_low.push_back(low_words(P, limbs));
    P *= static_cast<unsigned long>(plan->primes[i]);
  }
  plan->modulus_low = low_words(P, limbs);
  mpz_class half = P / 2;
  plan->half_digits.resize(t);
  for (std::size_t i = 0; i < t; ++i) {
    const auto pi = static_cast<unsigned long>(plan->primes[i]);
    plan->half_digits[i] = mpz_fdiv_ui(half.get_mpz_t(), pi);
    half /= pi;
  }
  std::lock_guard<std::mutex> lock(mutex);
  return cache.emplace(std::make_pair(t, limbs), std::move(plan)).first->second;
}

}  // namespace

NttEngine::NttEngine(std::size_t degree) : degree_(degree), log_degree_(0) {
  if (degree < 2 || degree > kMaxDegree || (degree & (degree - 1)) != 0)
    throw InvalidArgument("NTT degree must be a power of two in [2, 32768], got " +
                          std::to_string(degree));
  while ((std::size_t{1} << log_degree_) < degree) ++log_degree_;
}

const NttEngine& NttEngine::for_degree(std::size_t degree) {
  static std::mutex mutex;
  static std::map<std::size_t, std::unique_ptr<NttEngine>> engines;
  std::lock_guard<std::mutex> lock(mutex);
  auto& slot = engines[degree];
  if (!slot) slot = std::make_unique<NttEngine>(degree);
  return *slot;
}

std::uint64_t NttEngine::prime(std::size_t i) const { return nth_prime(i); }

std::size_t NttEngine::primes_for(unsigned a_bits, unsigned b_bits) const {
  // |coeff| <= d 2^(a-1) 2^(b-1); each prime exceeds 2^61.
  const unsigned need = a_bits + b_bits + log_degree_ + 2;
  return (need + 60) / 61;
}

const NttEngine::PrimeTables& NttEngine::tables(std::size_t i) const {
  std::lock_guard<std::mutex> lock(mutex_);
  while (tables_.size() <= i) {
    PrimeTables t;
    t.p = nth_prime(tables_.size());
    const std::uint64_t psi = find_psi(t.p, degree_);
    const std::uint64_t psi_inv = powmod(psi, t.p - 2, t.p);
    t.psi.resize(degree_);
    t.psi_inv.resize(degree_);
    std::uint64_t pw = 1, pw_inv = 1;
    std::vector<std::uint64_t> powers(degree_), inv_powers(degree_);
    for (std::size_t k = 0; k < degree_; ++k) {
      powers[k] = pw;
      inv_powers[k] = pw_inv;
      pw = mulmod(pw, psi, t.p);
      pw_inv = mulmod(pw_inv, psi_inv, t.p);
    }
    for (std::size_t k = 0; k < degree_; ++k) {
      const unsigned r = bit_reverse(static_cast<unsigned>(k), log_degree_);
      t.psi[k] = powers[r];
      t.psi_inv[k] = inv_powers[r];
    }
    t.psi_shoup.resize(degree_);
    t.psi_inv_shoup.resize(degree_);
    for (std::size_t k = 0; k < degree_; ++k) {
      t.psi_shoup[k] = shoup(t.psi[k], t.p);
      t.psi_inv_shoup[k] = shoup(t.psi_inv[k], t.p);
    }
    t.n_inv = powmod(degree_, t.p - 2, t.p);
    t.n_inv_shoup = shoup(t.n_inv, t.p);
    tables_.push_back(std::move(t));
  }
  return tables_[i];
}

void NttEngine::forward_inplace(std::uint64_t* a, const PrimeTables& t) const {
  const std::uint64_t p = t.p;
  std::size_t len = degree_;
  for (std::size_t m = 1; m < degree_; m <<= 1) {
    len >>= 1;
    for (std::size_t i = 0; i < m; ++i) {
      const std::size_t j1 = 2 * i * len;
      const std::uint64_t w = t.psi[m + i], ws = t.psi_shoup[m + i];
      for (std::size_t j = j1; j < j1 + len; ++j) {
        const std::uint64_t u = a[j];
        const std::uint64_t v = mul_shoup(a[j + len], w, ws, p);
        a[j] = add_mod(u, v, p);
        a[j + len] = sub_mod(u, v, p);
      }
    }
  }
}

void NttEngine::inverse_inplace(std::uint64_t* a, const PrimeTables& t) const {
  const std::uint64_t p = t.p;
  std::size_t len = 1;
  for (std::size_t m = degree_; m > 1; m >>= 1) {
    const std::size_t h = m / 2;
    std::size_t j1 = 0;
    for (std::size_t i = 0; i < h; ++i) {
      const std::uint64_t w = t.psi_inv[h + i], ws = t.psi_inv_shoup[h + i];
      for (std::size_t j = j1; j < j1 + len; ++j) {
        const std::uint64_t u = a[j];
        const std::uint64_t v = a[j + len];
        a[j] = add_mod(u, v, p);
        a[j + len] = mul_shoup(sub_mod(u, v, p), w, ws, p);
      }
      j1 += 2 * len;
    }
    len <<= 1;
  }
  for (std::size_t j = 0; j < degree_; ++j) a[j] = mul_shoup(a[j], t.n_inv, t.n_inv_shoup, p);
}

NttForm NttEngine::forward(const Poly& a, std::size_t primes) const {
  if (a.degree() != degree_) throw AlignmentError("NTT: polynomial degree mismatch");
  NttForm out;
  out.degree = degree_;
  out.primes = primes;
  out.data.resize(primes * degree_);
  const std::size_t limbs = a.limbs();
  std::vector<char> negative(degree_);
  for (std::size_t k = 0; k < degree_; ++k) negative[k] = a.is_negative(k);
  for (std::size_t pi = 0; pi < primes; ++pi) {
    const PrimeTables& t = tables(pi);
    const std::uint64_t p = t.p;
    // 2^bits mod p, subtracted from residues of negative coefficients.
    std::uint64_t wrap = 1;
    for (unsigned b = 0; b < a.bits(); ++b) wrap = add_mod(wrap, wrap, p);
    std::uint64_t* row = out.row(pi);
    for (std::size_t k = 0; k < degree_; ++k) {
      const std::uint64_t* w = a.coeff(k);
      u128 r = 0;
      for (std::size_t l = limbs; l-- > 0;) r = ((r << 64) | w[l]) % p;
      std::uint64_t v = static_cast<std::uint64_t>(r);
      if (negative[k]) v = sub_mod(v, wrap, p);
      row[k] = v;
    }
    forward_inplace(row, t);
  }
  return out;
}

Poly NttEngine::inverse(const NttForm& form, unsigned out_bits) const {
  if (form.degree != degree_) throw AlignmentError("NTT: transform degree mismatch");
  const std::size_t t = form.primes;
  NttForm work = form;
  for (std::size_t pi = 0; pi < t; ++pi) inverse_inplace(work.row(pi), tables(pi));

  Poly out(degree_, out_bits);
  const std::size_t limbs = out.limbs();
  const auto plan = garner_plan(*this, t, limbs);
  std::vector<std::uint64_t> digits(t);
  std::vector<std::uint64_t> acc(limbs);
  for (std::size_t k = 0; k < degree_; ++k) {
    for (std::size_t i = 0; i < t; ++i) {
      const std::uint64_t pi = plan->primes[i];
      std::uint64_t x = work.row(i)[k];
      for (std::size_t j = 0; j < i; ++j) {
        std::uint64_t aj = digits[j];
        if (aj >= pi) aj -= pi;
        x = sub_mod(x, aj, pi);
        x = mul_shoup(x, plan->inv[i][j], plan->inv_shoup[i][j], pi);
      }
      digits[i] = x;
    }
    bool negative = false;
    for (std::size_t i = t; i-- > 0;) {
      if (digits[i] != plan->half_digits[i]) {
        negative = digits[i] > plan->half_digits[i];
        break;
      }
    }
    std::fill(acc.begin(), acc.end(), 0);
    for (std::size_t i = 0; i < t; ++i) {
      const std::uint64_t dgt = digits[i];
      if (dgt == 0) continue;
      const std::vector<std::uint64_t>& radix = plan->radix_low[i];
      std::uint64_t carry = 0;
      for (std::size_t l = 0; l < limbs; ++l) {
        const u128 s = static_cast<u128>(dgt) * radix[l] + acc[l] + carry;
        acc[l] = static_cast<std::uint64_t>(s);
        carry = static_cast<std::uint64_t>(s >> 64);
      }
    }
    if (negative) {
      std::uint64_t borrow = 0;
      for (std::size_t l = 0; l < limbs; ++l) {
        const std::uint64_t m = plan->modulus_low[l];
        const std::uint64_t d1 = acc[l] - m;
        const std::uint64_t b1 = acc[l] < m;
        const std::uint64_t d2 = d1 - borrow;
        const std::uint64_t b2 = d1 < borrow;
        acc[l] = d2;
        borrow = b1 | b2;
      }
    }
    std::copy(acc.begin(), acc.end(), out.coeff(k));
  }
  out.normalize();
  return out;
}

void NttEngine::multiply_accumulate(NttForm& acc, const NttForm& a, const NttForm& b) const {
  if (a.primes < acc.primes || b.primes < acc.primes || a.degree != degree_ ||
      b.degree != degree_ || acc.degree != degree_)
    throw AlignmentError("NTT: transform shapes do not match");
  for (std::size_t pi = 0; pi < acc.primes; ++pi) {
    const std::uint64_t p = tables(pi).p;
    std::uint64_t* r = acc.row(pi);
    const std::uint64_t* x = a.row(pi);
    const std::uint64_t* y = b.row(pi);
    for (std::size_t k = 0; k < degree_; ++k) r[k] = add_mod(r[k], mulmod(x[k], y[k], p), p);
  }
}

NttForm NttEngine::pointwise(const NttForm& a, const NttForm& b, std::size_t primes) const {
  NttForm out;
  out.degree = degree_;
  out.primes = primes;
  out.data.assign(primes * degree_, 0);
  multiply_accumulate(out, a, b);
  return out;
}

Poly NttEngine::multiply(const Poly& a, const Poly& b, unsigned out_bits) const {
  const std::size_t t = primes_for(a.bits(), b.bits());
  return inverse(pointwise(forward(a, t), forward(b, t), t), out_bits);
}

}  // namespace cfrit
