#include "cfrit/profiles.hpp"

#include <cmath>

#include "cfrit/error.hpp"

namespace cfrit {

ElGamalProfile elgamal_profile(const std::string& name) {
  if (name == "test") return {"test", 512, std::ldexp(1.0, -40)};
  if (name == "secure128") return {"secure128", 3072, std::ldexp(1.0, -40)};
  throw InvalidArgument("unknown ElGamal profile '" + name + "' (expected test or secure128)");
}

elgamal::Keys make_elgamal_keys(const ElGamalProfile& profile, RandomSource& rng) {
  if (profile.name == "secure128") return elgamal::Keys::secure128(rng);
  return elgamal::Keys::generate(profile.bits, rng);
}

ckks::Params ckks_profile(const std::string& name) { return ckks::Params::by_name(name); }

}  // namespace cfrit
