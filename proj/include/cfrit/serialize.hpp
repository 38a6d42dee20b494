#pragma once

#include <filesystem>
#include <string>

#include <json.hpp>

#include "cfrit/ckks.hpp"
#include "cfrit/confidential.hpp"
#include "cfrit/elgamal.hpp"
#include "cfrit/frit.hpp"
#include "cfrit/plant.hpp"

namespace cfrit {

using Json = nlohmann::json;

/// Output of `simulate`: the plant, the gain that produced the log, the log
/// itself and the regression window.
struct LogDocument {
  std::string example;
  PlantModel plant;
  GainVector F_ini;
  SignalLog log;
  std::size_t window_start = 0;
  std::size_t N = 0;
};

// Malformed documents raise ProtocolError with code "bad_payload".

Json plant_to_json(const PlantModel& plant);
PlantModel plant_from_json(const Json& j);
Json log_to_json(const LogDocument& doc);
LogDocument log_from_json(const Json& j);
Json hd_to_json(const DesiredClosedLoop& hd);
DesiredClosedLoop hd_from_json(const Json& j);
Json gain_to_json(const GainVector& F);
GainVector gain_from_json(const Json& j);

Json to_json(const elgamal::PublicKey& pk);
elgamal::PublicKey elgamal_public_from_json(const Json& j);
Json to_json(const elgamal::SecretKey& sk);
elgamal::SecretKey elgamal_secret_from_json(const Json& j);
Json to_json(const elgamal::Ciphertext& ct);
elgamal::Ciphertext elgamal_ciphertext_from_json(const Json& j);

Json to_json(const ckks::Params& params);
ckks::Params ckks_params_from_json(const Json& j);
/// Coefficients as centred, sign-prefixed lowercase hex.
Json poly_to_json(const Poly& p);
Poly poly_from_json(const Json& j, std::size_t degree, unsigned bits);
Json to_json(const ckks::PublicKey& pk);
ckks::PublicKey ckks_public_from_json(const Json& j);
Json to_json(const ckks::SecretKey& sk);
ckks::SecretKey ckks_secret_from_json(const Json& j);
Json to_json(const ckks::Ciphertext& ct);
ckks::Ciphertext ckks_ciphertext_from_json(const Json& j, const ckks::Params& params);

/// Envelope {scheme, n, N, sensitivity, ...payload}.
Json to_json(const EncryptedDatasetD& d);
EncryptedDatasetD dataset_d_from_json(const Json& j);
/// ElGamal results add a `manifest` with M and the exponent ledger; CKKS
/// results carry the parameters needed to parse their ciphertexts.
Json to_json(const EncryptedDatasetF& f);
EncryptedDatasetF dataset_f_from_json(const Json& j);

Json read_json_file(const std::filesystem::path& path);
void write_json_file(const std::filesystem::path& path, const Json& j);

/// Every object key in `j` (recursively) that names secret-key material.
std::vector<std::string> find_secret_fields(const Json& j);
/// Same scan over raw serialized text.
std::vector<std::string> find_secret_fields(const std::string& text);

}  // namespace cfrit
