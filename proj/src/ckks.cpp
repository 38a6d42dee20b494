#include "cfrit/ckks.hpp"

#include <cmath>
#include <string>

#include "cfrit/bigint.hpp"
#include "cfrit/error.hpp"

namespace cfrit::ckks {

namespace {

Poly uniform_poly(std::size_t degree, unsigned bits, RandomSource& rng) {
  Poly out(degree, bits);
  for (std::size_t i = 0; i < degree; ++i) {
    std::uint64_t* w = out.coeff(i);
    for (std::size_t k = 0; k < out.limbs(); ++k) w[k] = rng.next_u64();
  }
  out.normalize();
  return out;
}

std::vector<std::int64_t> gaussian_vector(std::size_t degree, double sigma, RandomSource& rng) {
  std::vector<std::int64_t> out(degree);
  for (auto& v : out) v = sample_gaussian(rng, sigma);
  return out;
}

Poly secret_poly(const SecretKey& sk, unsigned bits) {
  Poly out(sk.s.size(), bits);
  for (std::size_t i = 0; i < sk.s.size(); ++i) out.set(i, static_cast<std::int64_t>(sk.s[i]));
  return out;
}

void check_level(const Params& params, int level) {
  if (level < 0 || level > params.max_level)
    throw InvalidArgument("CKKS level " + std::to_string(level) + " outside [0, " +
                          std::to_string(params.max_level) + "]");
}

void check_ciphertext(const Ciphertext& ct) {
  if (ct.ct0.degree() != ct.ct1.degree() || ct.ct0.bits() != ct.ct1.bits())
    throw AlignmentError("CKKS ciphertext components differ in shape");
}

}  // namespace

double Params::gamma() const { return std::ldexp(1.0, -static_cast<int>(log_scale)); }

void Params::validate() const {
  if (degree < 2 || degree > 32768 || (degree & (degree - 1)) != 0)
    throw InvalidArgument("CKKS: ring degree must be a power of two in [2, 32768]");
  if (max_level < 0) throw InvalidArgument("CKKS: maximum level must be non-negative");
  if (log_scale == 0 || log_q0 <= log_scale)
    throw InvalidArgument("CKKS: base modulus must exceed the scale");
  if (!(sigma >= 0.0)) throw InvalidArgument("CKKS: sigma must be non-negative");
}

Params Params::test() {
  Params p;
  p.name = "test";
  p.degree = 4096;
  p.max_level = 10;
  return p;
}

Params Params::secure128() {
  Params p;
  p.name = "secure128";
  p.degree = 32768;
  p.max_level = 20;
  return p;
}

Params Params::by_name(const std::string& name) {
  if (name == "test") return test();
  if (name == "secure128") return secure128();
  throw InvalidArgument("unknown CKKS profile '" + name + "'");
}

const NttForm& PublicKey::evk_form(int which) const {
  std::call_once(cache_->once, [this] {
    const auto& engine = NttEngine::for_degree(params.degree);
    const std::size_t t = engine.primes_for(params.modulus_bits(params.max_level), params.evk_bits());
    cache_->forms[0] = engine.forward(evk0, t);
    cache_->forms[1] = engine.forward(evk1, t);
  });
  return cache_->forms[which];
}

Keys Keys::generate(const Params& params, RandomSource& rng) {
  params.validate();
  const std::size_t d = params.degree;
  Keys keys;
  keys.secret.s.resize(d);
  for (auto& c : keys.secret.s) c = static_cast<std::int8_t>(static_cast<int>(rng.uniform_below(3)) - 1);

  PublicKey& pub = keys.pub;
  pub.params = params;
  const unsigned qL = params.modulus_bits(params.max_level);
  const Poly s_q = secret_poly(keys.secret, qL);
  pub.pk1 = uniform_poly(d, qL, rng);
  const Poly e = poly_from_small(gaussian_vector(d, params.sigma, rng), qL);
  pub.pk0 = poly_add(poly_negate(poly_mul(pub.pk1, s_q, qL)), e);

  const unsigned qe = params.evk_bits();
  const Poly s_e = secret_poly(keys.secret, qe);
  pub.evk1 = uniform_poly(d, qe, rng);
  const Poly e2 = poly_from_small(gaussian_vector(d, params.sigma, rng), qe);
  const Poly s_sq = poly_mul(s_e, s_e, qe);
  pub.evk0 = poly_add(poly_add(poly_negate(poly_mul(pub.evk1, s_e, qe)), e2),
                      poly_shift_left(s_sq, params.special_bits()));
  return keys;
}

mpz_class encode(double x, double gamma, const mpz_class& limit) {
  if (!(gamma > 0.0)) throw InvalidArgument("CKKS: sensitivity must be positive");
  const mpz_class v = round_half_away(exact_rational(x) / exact_rational(gamma));
  if (abs(v) > limit)
    throw RangeError("CKKS: encoding of " + std::to_string(x) + " exceeds the plaintext bound");
  return v;
}

mpz_class encode(double x, const Params& params) {
  mpz_class limit = 1;
  limit <<= params.log_q0 - 1;
  return encode(x, params.gamma(), limit);
}

double decode(const mpz_class& value, double gamma, int power) {
  mpq_class g = exact_rational(gamma);
  mpq_class out(value);
  for (int i = 0; i < power; ++i) out *= g;
  for (int i = 0; i > power; --i) out /= g;
  return to_double(out);
}

Ciphertext encrypt_with_noise(const PublicKey& pk, const mpz_class& m, const EncryptionNoise& noise,
                              int level, int scale_power) {
  const Params& params = pk.params;
  check_level(params, level);
  const std::size_t d = params.degree;
  if (noise.v.size() != d || noise.e1.size() != d || noise.e2.size() != d)
    throw DimensionError("CKKS: noise vectors must have ring degree entries");
  const unsigned bits = params.modulus_bits(level);
  const Poly pk0 = pk.pk0.reduced(bits);
  const Poly pk1 = pk.pk1.reduced(bits);
  const Poly v = poly_from_small(noise.v, 3);
  Poly msg = poly_from_small(noise.e1, bits);
  Poly shift(d, bits);
  shift.set(0, m);
  msg = poly_add(msg, shift);
  Ciphertext ct;
  ct.ct0 = poly_add(poly_mul(v, pk0, bits), msg);
  ct.ct1 = poly_add(poly_mul(v, pk1, bits), poly_from_small(noise.e2, bits));
  ct.level = level;
  ct.scale_power = scale_power;
  return ct;
}

Ciphertext encrypt_at_level(const PublicKey& pk, const mpz_class& m, int level, RandomSource& rng,
                            int scale_power) {
  const std::size_t d = pk.params.degree;
  EncryptionNoise noise;
  noise.v.resize(d);
  for (auto& c : noise.v) c = static_cast<std::int64_t>(rng.next_u64() & 1);
  noise.e1 = gaussian_vector(d, pk.params.sigma, rng);
  noise.e2 = gaussian_vector(d, pk.params.sigma, rng);
  return encrypt_with_noise(pk, m, noise, level, scale_power);
}

Ciphertext encrypt(const PublicKey& pk, const mpz_class& m, RandomSource& rng, int scale_power) {
  return encrypt_at_level(pk, m, pk.params.max_level, rng, scale_power);
}

Poly decrypt_poly(const SecretKey& sk, const Ciphertext& ct) {
  check_ciphertext(ct);
  if (sk.s.size() != ct.ct0.degree()) throw DimensionError("CKKS: secret key degree mismatch");
  const unsigned bits = ct.ct0.bits();
  return poly_add(ct.ct0, poly_mul(ct.ct1, secret_poly(sk, 2), bits));
}

mpz_class decrypt(const SecretKey& sk, const Ciphertext& ct) {
  return decrypt_poly(sk, ct).get_centered(0);
}

Ciphertext add(const Ciphertext& a, const Ciphertext& b) {
  check_ciphertext(a);
  check_ciphertext(b);
  if (a.level != b.level || a.scale_power != b.scale_power || a.ct0.bits() != b.ct0.bits())
    throw AlignmentError("CKKS add: operands at level/scale " + std::to_string(a.level) + "/" +
                         std::to_string(a.scale_power) + " and " + std::to_string(b.level) + "/" +
                         std::to_string(b.scale_power));
  return Ciphertext{poly_add(a.ct0, b.ct0), poly_add(a.ct1, b.ct1), a.level, a.scale_power};
}

namespace {

// (d0, d1, d2) -> (d0, d1) + round(d2 * evk / P) mod q_l.
Ciphertext relinearize(const Poly& d0, const Poly& d1, const Poly& d2, int level, int scale_power,
                       const PublicKey& pk) {
  const Params& params = pk.params;
  const unsigned bits = params.modulus_bits(level);
  const auto& engine = NttEngine::for_degree(params.degree);
  const std::size_t te = engine.primes_for(bits, params.evk_bits());
  const NttForm d2f = engine.forward(d2, te);
  const unsigned wide = params.special_bits() + bits;
  const Poly r0 = poly_shift_round(engine.inverse(engine.pointwise(d2f, pk.evk_form(0), te), wide),
                                   params.special_bits());
  const Poly r1 = poly_shift_round(engine.inverse(engine.pointwise(d2f, pk.evk_form(1), te), wide),
                                   params.special_bits());
  return Ciphertext{poly_add(d0, r0), poly_add(d1, r1), level, scale_power};
}

void check_operand(const Ciphertext& ct, const Params& params, const char* what) {
  check_ciphertext(ct);
  if (ct.ct0.bits() != params.modulus_bits(ct.level) || ct.ct0.degree() != params.degree)
    throw AlignmentError(std::string("CKKS ") + what + ": ciphertext does not match the key parameters");
}

}  // namespace

Ciphertext mult_no_rescale(const Ciphertext& a, const Ciphertext& b, const PublicKey& pk) {
  const Params& params = pk.params;
  check_operand(a, params, "mult");
  check_operand(b, params, "mult");
  if (a.level != b.level)
    throw AlignmentError("CKKS mult: operands at levels " + std::to_string(a.level) + " and " +
                         std::to_string(b.level));
  const unsigned bits = params.modulus_bits(a.level);
  const auto& engine = NttEngine::for_degree(params.degree);

  const std::size_t t = engine.primes_for(bits, bits);
  const NttForm a0 = engine.forward(a.ct0, t), a1 = engine.forward(a.ct1, t);
  const NttForm b0 = engine.forward(b.ct0, t), b1 = engine.forward(b.ct1, t);
  NttForm cross = engine.pointwise(a0, b1, t);
  engine.multiply_accumulate(cross, a1, b0);
  return relinearize(engine.inverse(engine.pointwise(a0, b0, t), bits), engine.inverse(cross, bits),
                     engine.inverse(engine.pointwise(a1, b1, t), bits), a.level,
                     a.scale_power + b.scale_power, pk);
}

ProductSum::ProductSum(const PublicKey& pk, int level, std::size_t max_terms)
    : pk_(&pk), level_(level), max_terms_(max_terms) {
  check_level(pk.params, level);
  if (level < 1) throw DepthError("CKKS product sum: operands at level 0", 1, level);
  if (max_terms == 0) throw InvalidArgument("CKKS product sum: max_terms must be positive");
  const auto& engine = NttEngine::for_degree(pk.params.degree);
  const unsigned bits = pk.params.modulus_bits(level);
  unsigned growth = 0;
  while ((std::size_t{1} << growth) < max_terms) ++growth;
  primes_ = engine.primes_for(bits, bits + growth);
}

ProductSum::Operand ProductSum::transform(const Ciphertext& ct) const {
  check_operand(ct, pk_->params, "product sum");
  if (ct.level != level_)
    throw AlignmentError("CKKS product sum: operand at level " + std::to_string(ct.level) +
                         ", expected " + std::to_string(level_));
  const auto& engine = NttEngine::for_degree(pk_->params.degree);
  return Operand{engine.forward(ct.ct0, primes_), engine.forward(ct.ct1, primes_), ct.scale_power};
}

void ProductSum::add(const Operand& a, const Operand& b) {
  if (terms_ == max_terms_)
    throw CapacityError("CKKS product sum: more than " + std::to_string(max_terms_) + " terms");
  if (terms_ > 0 && a.scale_power + b.scale_power != scale_power_)
    throw AlignmentError("CKKS product sum: terms carry different scales");
  const auto& engine = NttEngine::for_degree(pk_->params.degree);
  if (terms_ == 0) {
    scale_power_ = a.scale_power + b.scale_power;
    d0_ = engine.pointwise(a.c0, b.c0, primes_);
    d1_ = engine.pointwise(a.c0, b.c1, primes_);
    engine.multiply_accumulate(d1_, a.c1, b.c0);
    d2_ = engine.pointwise(a.c1, b.c1, primes_);
  } else {
    engine.multiply_accumulate(d0_, a.c0, b.c0);
    engine.multiply_accumulate(d1_, a.c0, b.c1);
    engine.multiply_accumulate(d1_, a.c1, b.c0);
    engine.multiply_accumulate(d2_, a.c1, b.c1);
  }
  ++terms_;
}

void ProductSum::add(const Ciphertext& a, const Ciphertext& b) { add(transform(a), transform(b)); }

Ciphertext ProductSum::result() const {
  if (terms_ == 0) throw InvalidArgument("CKKS product sum: no terms");
  const auto& engine = NttEngine::for_degree(pk_->params.degree);
  const unsigned bits = pk_->params.modulus_bits(level_);
  return rescale(relinearize(engine.inverse(d0_, bits), engine.inverse(d1_, bits),
                             engine.inverse(d2_, bits), level_, scale_power_, *pk_),
                 pk_->params);
}

Ciphertext rescale(const Ciphertext& ct, const Params& params) {
  check_ciphertext(ct);
  if (ct.level < 1) throw DepthError("CKKS rescale: ciphertext is at level 0", 1, ct.level);
  return Ciphertext{poly_shift_round(ct.ct0, params.log_scale),
                    poly_shift_round(ct.ct1, params.log_scale), ct.level - 1, ct.scale_power - 1};
}

Ciphertext mult(const Ciphertext& a, const Ciphertext& b, const PublicKey& pk) {
  if (a.level < 1 || b.level < 1)
    throw DepthError("CKKS mult: modulus chain exhausted (level 0)", 1, std::min(a.level, b.level));
  return rescale(mult_no_rescale(a, b, pk), pk.params);
}

Ciphertext mod_align(const Ciphertext& ct, int target_level, const Params& params) {
  check_ciphertext(ct);
  if (target_level < 0) throw InvalidArgument("CKKS mod_align: negative target level");
  if (target_level > ct.level)
    throw AlignmentError("CKKS mod_align: target level " + std::to_string(target_level) +
                         " is above the current level " + std::to_string(ct.level));
  if (target_level == ct.level) return ct;
  const unsigned bits = params.modulus_bits(target_level);
  return Ciphertext{ct.ct0.reduced(bits), ct.ct1.reduced(bits), target_level, ct.scale_power};
}

}  // namespace cfrit::ckks
