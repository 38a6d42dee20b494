#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include <gmpxx.h>

#include "cfrit/ckks.hpp"
#include "cfrit/cofactor.hpp"
#include "cfrit/elgamal.hpp"
#include "cfrit/frit.hpp"

namespace cfrit {

/// gamma exponents carried by each decrypted entry.
struct ExponentLedger {
  /// omega[k](j, i): exponent of Enc(Phi_k(j, i)).
  std::vector<std::vector<std::vector<int>>> omega;
  /// xi[j][l]: exponent of element l of term j (omega + 3).
  std::vector<std::vector<int>> xi;
};

/// Omega_k(j, i) = (n - 1) + 1 + [sgn sigma_k = -1] + [i + j odd].
ExponentLedger exponent_table(const SignedPermutationTable& table, std::size_t n);

/// Client-to-server payload for the ElGamal pipeline. Holds public material only.
struct ElGamalDatasetD {
  elgamal::PublicKey pk;
  std::size_t n = 0, N = 0;
  double sensitivity = 0.0;
  std::vector<elgamal::Ciphertext> gamma;  ///< n*N
  std::vector<elgamal::Ciphertext> w;      ///< n*N x n, row-major
  std::vector<elgamal::Ciphertext> psi;    ///< n x n, row-major
  elgamal::Ciphertext det_inv;
  elgamal::Ciphertext minus_one;
};

struct ElGamalDatasetF {
  std::size_t n = 0, N = 0;
  double sensitivity = 0.0;
  std::vector<std::vector<elgamal::Ciphertext>> terms;  ///< M rows of n
  ExponentLedger ledger;
};

struct CkksDatasetD {
  ckks::PublicKey pk;
  std::size_t n = 0, N = 0;
  double sensitivity = 0.0;
  std::vector<ckks::Ciphertext> gamma;
  std::vector<ckks::Ciphertext> w;
  std::vector<ckks::Ciphertext> psi;
  ckks::Ciphertext det_inv;
  ckks::Ciphertext minus_one;
};

struct CkksDatasetF {
  ckks::Params params;
  std::size_t n = 0, N = 0;
  double sensitivity = 0.0;
  std::vector<ckks::Ciphertext> gain;  ///< n
};

using EncryptedDatasetD = std::variant<ElGamalDatasetD, CkksDatasetD>;
using EncryptedDatasetF = std::variant<ElGamalDatasetF, CkksDatasetF>;

std::string scheme_name(const EncryptedDatasetD& d);
std::string scheme_name(const EncryptedDatasetF& f);

/// Encodes and encrypts every entry of Gamma, W, Psi, plus det(Psi)^-1 and -1.
/// Throws OverflowError naming the first entry outside the plaintext range.
ElGamalDatasetD client_prepare_elgamal(const FritData& data, const elgamal::PublicKey& pk,
                                       double sensitivity, RandomSource& rng);

/// Levels consumed by server_tune_ckks for order n.
int ckks_required_depth(std::size_t n);

/// Same for CKKS at sensitivity gamma_c. Ciphertexts are produced at `level`
/// (default: the depth the server needs, which keeps D small).
CkksDatasetD client_prepare_ckks(const FritData& data, const ckks::PublicKey& pk, RandomSource& rng,
                                 std::optional<int> level = std::nullopt);

/// Homomorphic gain terms; ElGamal multiplications only, no key material beyond D.
ElGamalDatasetF server_tune_elgamal(const ElGamalDatasetD& d);
/// Homomorphic gain, summed over all terms into one ciphertext per gain element.
/// Throws DepthError when the dataset level is below ckks_required_depth(n).
CkksDatasetF server_tune_ckks(const CkksDatasetD& d);
EncryptedDatasetF server_tune(const EncryptedDatasetD& d);

/// Exact sum of gamma^xi-decoded terms, one rational per gain element. `gamma`
/// is the client's own sensitivity, not the value echoed back in F.
std::vector<mpq_class> client_finalize_elgamal_exact(const ElGamalDatasetF& f,
                                                     const elgamal::PublicKey& pk,
                                                     const elgamal::SecretKey& sk, double gamma);
GainVector client_finalize_elgamal(const ElGamalDatasetF& f, const elgamal::PublicKey& pk,
                                   const elgamal::SecretKey& sk, double gamma);
/// Decrypts each gain element and decodes with gamma^scale_power.
GainVector client_finalize_ckks(const CkksDatasetF& f, const ckks::SecretKey& sk, double gamma);

}  // namespace cfrit
