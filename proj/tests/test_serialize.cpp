#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>

#include "cfrit/bigint.hpp"
#include "cfrit/error.hpp"
#include "cfrit/serialize.hpp"
#include "cfrit/setups.hpp"

using namespace cfrit;

namespace {

bool throws_bad_payload(const std::function<void()>& f) {
  try {
    f();
  } catch (const ProtocolError& e) {
    return e.code() == "bad_payload";
  }
  return false;
}

}  // namespace

TEST(Serialize, LogDocumentRoundTrip) {
  const auto s = example2();
  LogDocument doc{s.name, s.plant, s.F_ini, s.simulate(), s.window_start, s.N};
  const LogDocument back = log_from_json(Json::parse(log_to_json(doc).dump()));
  EXPECT_EQ(back.example, doc.example);
  EXPECT_EQ(back.plant.A, doc.plant.A);
  EXPECT_EQ(back.plant.B, doc.plant.B);
  EXPECT_EQ(back.F_ini, doc.F_ini);
  EXPECT_EQ(back.log.x, doc.log.x);
  EXPECT_EQ(back.log.u, doc.log.u);
  EXPECT_EQ(back.log.v, doc.log.v);
  EXPECT_EQ(back.N, doc.N);
  // A log document doubles as a plant document.
  EXPECT_EQ(plant_from_json(log_to_json(doc)).A, doc.plant.A);
}

TEST(Serialize, ReferenceModelAndGain) {
  const auto hd = example1().hd;
  const auto back = hd_from_json(Json::parse(hd_to_json(hd).dump()));
  ASSERT_EQ(back.components.size(), 2u);
  EXPECT_EQ(back.components[1].numerator, hd.components[1].numerator);
  EXPECT_EQ(back.components[1].denominator, hd.components[1].denominator);
  const GainVector F = (GainVector(3) << 0.1, -1e-300, 12345.678).finished();
  EXPECT_EQ(gain_from_json(Json::parse(gain_to_json(F).dump())), F);
}

TEST(Serialize, MalformedDocumentsAreBadPayload) {
  EXPECT_TRUE(throws_bad_payload([] { gain_from_json(Json::parse(R"({"F": "x"})")); }));
  EXPECT_THROW(plant_from_json(Json::parse(R"({"A": [[1, 2]], "B": [1]})")), DimensionError);
  EXPECT_TRUE(throws_bad_payload([] { hd_from_json(Json::parse(R"({"components": 3})")); }));
  EXPECT_TRUE(throws_bad_payload([] { dataset_d_from_json(Json::parse(R"({"scheme": "elgamal"})")); }));
  try {
    dataset_d_from_json(Json::parse(R"({"scheme": "paillier", "n": 1, "N": 1})"));
    FAIL();
  } catch (const ProtocolError& e) {
    EXPECT_EQ(e.code(), "unsupported_scheme");
  }
}

TEST(Serialize, ElGamalKeysRoundTrip) {
  SeededRandom rng(1);
  const auto keys = elgamal::Keys::secure128(rng);
  const auto pk = elgamal_public_from_json(Json::parse(to_json(keys.pk).dump()));
  EXPECT_EQ(pk.p, keys.pk.p);
  EXPECT_EQ(pk.h, keys.pk.h);
  EXPECT_EQ(pk.exponent_bits, 256u);
  EXPECT_EQ(elgamal_secret_from_json(to_json(keys.sk)).s, keys.sk.s);
  Json tampered = to_json(keys.pk);
  tampered["h"] = to_hex(keys.pk.p - 1);  // -1 is a non-residue
  EXPECT_TRUE(throws_bad_payload([&] { elgamal_public_from_json(tampered); }));
}

TEST(Serialize, CkksKeysAndCiphertextsRoundTrip) {
  ckks::Params p;
  p.degree = 32;
  p.max_level = 2;
  SeededRandom rng(2);
  const auto keys = ckks::Keys::generate(p, rng);
  const auto pub = ckks_public_from_json(Json::parse(to_json(keys.pub).dump()));
  EXPECT_EQ(pub.pk0, keys.pub.pk0);
  EXPECT_EQ(pub.evk1, keys.pub.evk1);
  EXPECT_EQ(ckks_secret_from_json(to_json(keys.secret)).s, keys.secret.s);
  const auto ct = ckks::encrypt(keys.pub, 42, rng, 2);
  EXPECT_EQ(ckks_ciphertext_from_json(Json::parse(to_json(ct).dump()), p), ct);
}

TEST(Serialize, SecretFieldScanner) {
  const Json clean = Json::parse(R"({"public_key": {"p": "17"}, "note": "sk"})");
  EXPECT_TRUE(find_secret_fields(clean).empty());
  EXPECT_TRUE(find_secret_fields(clean.dump()).empty());
  const Json dirty = Json::parse(R"({"payload": [{"x": 1}, {"secret_key": "ab"}], "s": 1})");
  EXPECT_EQ(find_secret_fields(dirty).size(), 2u);
  EXPECT_EQ(find_secret_fields(dirty.dump()).size(), 2u);
  EXPECT_EQ(find_secret_fields(std::string(R"({"sk" : [1]})")).size(), 1u);
}

TEST(Serialize, FilesAreCreatedWithParents) {
  const auto dir = std::filesystem::temp_directory_path() / "cfrit_serialize_test" / "nested";
  std::filesystem::remove_all(dir.parent_path());
  write_json_file(dir / "g.json", gain_to_json(GainVector::Ones(2)));
  EXPECT_EQ(gain_from_json(read_json_file(dir / "g.json")), GainVector::Ones(2));
  EXPECT_THROW(read_json_file(dir / "missing.json"), Error);
  std::filesystem::remove_all(dir.parent_path());
}
