#pragma once

#include <string>

#include "cfrit/ckks.hpp"
#include "cfrit/elgamal.hpp"
#include "cfrit/random.hpp"

namespace cfrit {

/// Named ElGamal parameter bundle.
struct ElGamalProfile {
  std::string name;
  unsigned bits = 0;         ///< bit length of p
  double sensitivity = 0.0;  ///< gamma_e
};

/// "test": fresh 512-bit safe prime. "secure128": built-in 3072-bit prime.
/// Both use gamma_e = 2^-40.
ElGamalProfile elgamal_profile(const std::string& name);
elgamal::Keys make_elgamal_keys(const ElGamalProfile& profile, RandomSource& rng);

/// "test" or "secure128"; gamma_c = 2^-40 in both.
ckks::Params ckks_profile(const std::string& name);

}  // namespace cfrit
