#include "cfrit/serialize.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <cctype>
#include <set>
#include <sstream>

#include "cfrit/bigint.hpp"
#include "cfrit/error.hpp"

namespace cfrit {

namespace {

ProtocolError bad_payload(const std::string& what) { return ProtocolError("bad_payload", what); }

const Json& field(const Json& j, const char* name) {
  if (!j.is_object()) throw bad_payload(std::string("expected an object holding '") + name + "'");
  auto it = j.find(name);
  if (it == j.end()) throw bad_payload(std::string("missing field '") + name + "'");
  return *it;
}

template <typename T>
T get(const Json& j, const char* name) {
  try {
    return field(j, name).get<T>();
  } catch (const Json::exception& e) {
    throw bad_payload(std::string("field '") + name + "': " + e.what());
  }
}

Json vector_json(const Eigen::Ref<const Eigen::VectorXd>& v) {
  return Json(std::vector<double>(v.data(), v.data() + v.size()));
}

Vector vector_from(const Json& j, const char* name) {
  const auto values = get<std::vector<double>>(j, name);
  return Eigen::Map<const Vector>(values.data(), static_cast<Eigen::Index>(values.size()));
}

Json matrix_json(const Matrix& m) {
  Json rows = Json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    Json row = Json::array();
    for (Eigen::Index c = 0; c < m.cols(); ++c) row.push_back(m(r, c));
    rows.push_back(std::move(row));
  }
  return rows;
}

Matrix matrix_from(const Json& j, const char* name) {
  const auto rows = get<std::vector<std::vector<double>>>(j, name);
  if (rows.empty()) return Matrix(0, 0);
  Matrix m(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(rows.front().size()));
  for (std::size_t r = 0; r < rows.size(); ++r) {
    if (rows[r].size() != rows.front().size())
      throw bad_payload(std::string("field '") + name + "' is a ragged matrix");
    for (std::size_t c = 0; c < rows[r].size(); ++c)
      m(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = rows[r][c];
  }
  return m;
}

mpz_class hex_field(const Json& j, const char* name) {
  const auto s = get<std::string>(j, name);
  try {
    return from_hex(s);
  } catch (const Error&) {
    throw bad_payload(std::string("field '") + name + "' is not a hex integer");
  }
}

void negate_mod(std::vector<std::uint64_t>& w, unsigned bits) {
  std::uint64_t carry = 1;
  for (auto& x : w) {
    x = ~x + carry;
    carry = (carry && x == 0) ? 1 : 0;
  }
  const unsigned top = bits % 64;
  if (top != 0) w.back() &= (std::uint64_t{1} << top) - 1;
}

std::string coeff_hex(const Poly& p, std::size_t i) {
  std::vector<std::uint64_t> w(p.coeff(i), p.coeff(i) + p.limbs());
  const bool negative = p.is_negative(i);
  if (negative) negate_mod(w, p.bits());
  std::size_t top = w.size();
  while (top > 0 && w[top - 1] == 0) --top;
  if (top == 0) return "0";
  std::string out = negative ? "-" : "";
  char buf[24];
  std::snprintf(buf, sizeof(buf), "%llx", static_cast<unsigned long long>(w[top - 1]));
  out += buf;
  for (std::size_t k = top - 1; k-- > 0;) {
    std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(w[k]));
    out += buf;
  }
  return out;
}

int hex_digit(char c) {
  if (c >= '0' && c <= '9') return c - '0';
  if (c >= 'a' && c <= 'f') return c - 'a' + 10;
  if (c >= 'A' && c <= 'F') return c - 'A' + 10;
  return -1;
}

void coeff_from_hex(Poly& p, std::size_t i, const std::string& s) {
  std::size_t pos = 0;
  const bool negative = !s.empty() && s[0] == '-';
  if (negative) pos = 1;
  if (pos == s.size()) throw bad_payload("empty polynomial coefficient");
  std::vector<std::uint64_t> w(p.limbs() + 1, 0);
  std::size_t bit = 0;
  for (std::size_t k = s.size(); k-- > pos; bit += 4) {
    const int d = hex_digit(s[k]);
    if (d < 0) throw bad_payload("malformed polynomial coefficient '" + s.substr(0, 32) + "'");
    if (d == 0) continue;
    if (bit / 64 >= w.size()) throw bad_payload("polynomial coefficient exceeds its modulus");
    w[bit / 64] |= static_cast<std::uint64_t>(d) << (bit % 64);
  }
  // Magnitude must lie within the centred range (-2^(bits-1), 2^(bits-1)].
  mpz_class mag;
  mpz_import(mag.get_mpz_t(), w.size(), -1, sizeof(std::uint64_t), 0, 0, w.data());
  if (mpz_sizeinbase(mag.get_mpz_t(), 2) > p.bits() ||
      (mag != 0 && mpz_sizeinbase(mag.get_mpz_t(), 2) == p.bits() &&
       (negative || mpz_scan1(mag.get_mpz_t(), 0) != p.bits() - 1)))
    throw bad_payload("polynomial coefficient outside the centred range");
  w.pop_back();
  if (negative) negate_mod(w, p.bits());
  std::copy(w.begin(), w.end(), p.coeff(i));
}

Json ledger_json(const ExponentLedger& ledger, std::size_t M) {
  return Json{{"M", M}, {"omega", ledger.omega}, {"xi", ledger.xi}};
}

template <typename Ct, typename ToJson>
Json ct_list(const std::vector<Ct>& cts, ToJson&& to) {
  Json out = Json::array();
  for (const auto& ct : cts) out.push_back(to(ct));
  return out;
}

template <typename Ct, typename ToJson>
Json ct_matrix(const std::vector<Ct>& cts, std::size_t cols, ToJson&& to) {
  Json out = Json::array();
  for (std::size_t r = 0; r * cols < cts.size(); ++r) {
    Json row = Json::array();
    for (std::size_t c = 0; c < cols; ++c) row.push_back(to(cts[r * cols + c]));
    out.push_back(std::move(row));
  }
  return out;
}

template <typename Ct, typename FromJson>
std::vector<Ct> ct_list_from(const Json& j, const char* name, FromJson&& from) {
  const Json& arr = field(j, name);
  if (!arr.is_array()) throw bad_payload(std::string("field '") + name + "' must be an array");
  std::vector<Ct> out;
  out.reserve(arr.size());
  for (const auto& e : arr) out.push_back(from(e));
  return out;
}

template <typename Ct, typename FromJson>
std::vector<Ct> ct_matrix_from(const Json& j, const char* name, std::size_t cols, FromJson&& from) {
  const Json& arr = field(j, name);
  if (!arr.is_array()) throw bad_payload(std::string("field '") + name + "' must be an array");
  std::vector<Ct> out;
  for (const auto& row : arr) {
    if (!row.is_array() || row.size() != cols)
      throw bad_payload(std::string("field '") + name + "' has a row of the wrong width");
    for (const auto& e : row) out.push_back(from(e));
  }
  return out;
}

}  // namespace

Json plant_to_json(const PlantModel& plant) {
  return Json{{"A", matrix_json(plant.A)},
              {"B", vector_json(plant.B)},
              {"sampling_period", plant.sampling_period}};
}

PlantModel plant_from_json(const Json& j) {
  PlantModel plant;
  plant.A = matrix_from(j, "A");
  plant.B = vector_from(j, "B");
  plant.sampling_period = j.contains("sampling_period") ? get<double>(j, "sampling_period") : 0.0;
  plant.validate();
  return plant;
}

Json log_to_json(const LogDocument& doc) {
  Json j = plant_to_json(doc.plant);
  j["example"] = doc.example;
  j["F_ini"] = vector_json(doc.F_ini.transpose());
  j["x"] = matrix_json(doc.log.x);
  j["u"] = vector_json(doc.log.u);
  j["v"] = vector_json(doc.log.v);
  j["window_start"] = doc.window_start;
  j["N"] = doc.N;
  return j;
}

LogDocument log_from_json(const Json& j) {
  LogDocument doc;
  doc.plant = plant_from_json(j);
  doc.example = j.contains("example") ? get<std::string>(j, "example") : "";
  if (j.contains("F_ini")) doc.F_ini = vector_from(j, "F_ini").transpose();
  doc.log.x = matrix_from(j, "x");
  doc.log.u = vector_from(j, "u");
  doc.log.v = vector_from(j, "v");
  if (doc.log.x.rows() == 0) doc.log.x = Matrix(0, doc.plant.A.rows());
  doc.log.validate();
  if (doc.log.order() != doc.plant.order())
    throw bad_payload("log state dimension differs from the plant order");
  doc.window_start = j.contains("window_start") ? get<std::size_t>(j, "window_start") : 0;
  doc.N = j.contains("N") ? get<std::size_t>(j, "N") : doc.log.steps() - doc.window_start;
  return doc;
}

Json hd_to_json(const DesiredClosedLoop& hd) {
  Json comps = Json::array();
  for (const auto& tf : hd.components) comps.push_back({{"num", tf.numerator}, {"den", tf.denominator}});
  return Json{{"components", comps}};
}

DesiredClosedLoop hd_from_json(const Json& j) {
  DesiredClosedLoop hd;
  const Json& comps = field(j, "components");
  if (!comps.is_array()) throw bad_payload("'components' must be an array");
  for (const auto& c : comps) {
    TransferFunction tf{get<std::vector<double>>(c, "num"), get<std::vector<double>>(c, "den")};
    tf.validate();
    hd.components.push_back(std::move(tf));
  }
  return hd;
}

Json gain_to_json(const GainVector& F) { return Json{{"F", vector_json(F.transpose())}}; }

GainVector gain_from_json(const Json& j) { return vector_from(j, "F").transpose(); }

Json to_json(const elgamal::PublicKey& pk) {
  Json j{{"scheme", "elgamal"}, {"p", to_hex(pk.p)}, {"q", to_hex(pk.q)},
         {"g", to_hex(pk.g)},   {"h", to_hex(pk.h)}};
  if (pk.exponent_bits > 0) j["exponent_bits"] = pk.exponent_bits;
  return j;
}

elgamal::PublicKey elgamal_public_from_json(const Json& j) {
  elgamal::PublicKey pk{hex_field(j, "p"), hex_field(j, "q"), hex_field(j, "g"), hex_field(j, "h")};
  try {
    if (j.contains("exponent_bits")) pk.exponent_bits = j.at("exponent_bits").get<unsigned>();
    pk.validate();
  } catch (const Error& e) {
    throw bad_payload(e.what());
  } catch (const Json::exception& e) {
    throw bad_payload(e.what());
  }
  return pk;
}

Json to_json(const elgamal::SecretKey& sk) { return Json{{"scheme", "elgamal"}, {"s", to_hex(sk.s)}}; }

elgamal::SecretKey elgamal_secret_from_json(const Json& j) { return {hex_field(j, "s")}; }

Json to_json(const elgamal::Ciphertext& ct) { return Json{{"c1", to_hex(ct.c1)}, {"c2", to_hex(ct.c2)}}; }

elgamal::Ciphertext elgamal_ciphertext_from_json(const Json& j) {
  return {hex_field(j, "c1"), hex_field(j, "c2")};
}

Json to_json(const ckks::Params& params) {
  return Json{{"name", params.name},          {"degree", params.degree},
              {"max_level", params.max_level}, {"log_q0", params.log_q0},
              {"log_scale", params.log_scale}, {"sigma", params.sigma}};
}

ckks::Params ckks_params_from_json(const Json& j) {
  ckks::Params p;
  p.name = get<std::string>(j, "name");
  p.degree = get<std::size_t>(j, "degree");
  p.max_level = get<int>(j, "max_level");
  p.log_q0 = get<unsigned>(j, "log_q0");
  p.log_scale = get<unsigned>(j, "log_scale");
  p.sigma = get<double>(j, "sigma");
  try {
    p.validate();
  } catch (const Error& e) {
    throw bad_payload(e.what());
  }
  return p;
}

Json poly_to_json(const Poly& p) {
  std::vector<std::string> coeffs(p.degree());
  for (std::size_t i = 0; i < p.degree(); ++i) coeffs[i] = coeff_hex(p, i);
  return Json(std::move(coeffs));
}

Poly poly_from_json(const Json& j, std::size_t degree, unsigned bits) {
  if (!j.is_array() || j.size() != degree)
    throw bad_payload("polynomial must be an array of " + std::to_string(degree) + " coefficients");
  Poly p(degree, bits);
  for (std::size_t i = 0; i < degree; ++i) {
    if (!j[i].is_string()) throw bad_payload("polynomial coefficients must be hex strings");
    coeff_from_hex(p, i, j[i].get_ref<const std::string&>());
  }
  return p;
}

Json to_json(const ckks::PublicKey& pk) {
  return Json{{"scheme", "ckks"},
              {"params", to_json(pk.params)},
              {"pk0", poly_to_json(pk.pk0)},
              {"pk1", poly_to_json(pk.pk1)},
              {"evk0", poly_to_json(pk.evk0)},
              {"evk1", poly_to_json(pk.evk1)}};
}

ckks::PublicKey ckks_public_from_json(const Json& j) {
  ckks::PublicKey pk;
  pk.params = ckks_params_from_json(field(j, "params"));
  const auto& P = pk.params;
  const unsigned qL = P.modulus_bits(P.max_level);
  pk.pk0 = poly_from_json(field(j, "pk0"), P.degree, qL);
  pk.pk1 = poly_from_json(field(j, "pk1"), P.degree, qL);
  pk.evk0 = poly_from_json(field(j, "evk0"), P.degree, P.evk_bits());
  pk.evk1 = poly_from_json(field(j, "evk1"), P.degree, P.evk_bits());
  return pk;
}

Json to_json(const ckks::SecretKey& sk) {
  std::vector<int> coeffs(sk.s.begin(), sk.s.end());
  return Json{{"scheme", "ckks"}, {"sk", coeffs}};
}

ckks::SecretKey ckks_secret_from_json(const Json& j) {
  ckks::SecretKey sk;
  for (int c : get<std::vector<int>>(j, "sk")) {
    if (c < -1 || c > 1) throw bad_payload("CKKS secret coefficients must lie in {-1, 0, 1}");
    sk.s.push_back(static_cast<std::int8_t>(c));
  }
  return sk;
}

Json to_json(const ckks::Ciphertext& ct) {
  return Json{{"level", ct.level},
              {"scale_power", ct.scale_power},
              {"ct0", poly_to_json(ct.ct0)},
              {"ct1", poly_to_json(ct.ct1)}};
}

ckks::Ciphertext ckks_ciphertext_from_json(const Json& j, const ckks::Params& params) {
  ckks::Ciphertext ct;
  ct.level = get<int>(j, "level");
  ct.scale_power = get<int>(j, "scale_power");
  if (ct.level < 0 || ct.level > params.max_level) throw bad_payload("ciphertext level out of range");
  const unsigned bits = params.modulus_bits(ct.level);
  ct.ct0 = poly_from_json(field(j, "ct0"), params.degree, bits);
  ct.ct1 = poly_from_json(field(j, "ct1"), params.degree, bits);
  return ct;
}

Json to_json(const EncryptedDatasetD& d) {
  if (const auto* e = std::get_if<ElGamalDatasetD>(&d)) {
    auto to = [](const elgamal::Ciphertext& c) { return to_json(c); };
    return Json{{"scheme", "elgamal"},
                {"n", e->n},
                {"N", e->N},
                {"sensitivity", e->sensitivity},
                {"public_key", to_json(e->pk)},
                {"gamma", ct_list(e->gamma, to)},
                {"w", ct_matrix(e->w, e->n, to)},
                {"psi", ct_matrix(e->psi, e->n, to)},
                {"det_inv", to_json(e->det_inv)},
                {"minus_one", to_json(e->minus_one)}};
  }
  const auto& c = std::get<CkksDatasetD>(d);
  auto to = [](const ckks::Ciphertext& ct) { return to_json(ct); };
  return Json{{"scheme", "ckks"},
              {"n", c.n},
              {"N", c.N},
              {"sensitivity", c.sensitivity},
              {"public_key", to_json(c.pk)},
              {"gamma", ct_list(c.gamma, to)},
              {"w", ct_matrix(c.w, c.n, to)},
              {"psi", ct_matrix(c.psi, c.n, to)},
              {"det_inv", to_json(c.det_inv)},
              {"minus_one", to_json(c.minus_one)}};
}

EncryptedDatasetD dataset_d_from_json(const Json& j) {
  const auto scheme = get<std::string>(j, "scheme");
  const auto n = get<std::size_t>(j, "n");
  const auto N = get<std::size_t>(j, "N");
  if (n == 0 || N == 0) throw bad_payload("dataset dimensions must be positive");
  if (scheme == "elgamal") {
    ElGamalDatasetD d;
    d.n = n;
    d.N = N;
    d.sensitivity = get<double>(j, "sensitivity");
    d.pk = elgamal_public_from_json(field(j, "public_key"));
    auto from = [](const Json& e) { return elgamal_ciphertext_from_json(e); };
    d.gamma = ct_list_from<elgamal::Ciphertext>(j, "gamma", from);
    d.w = ct_matrix_from<elgamal::Ciphertext>(j, "w", n, from);
    d.psi = ct_matrix_from<elgamal::Ciphertext>(j, "psi", n, from);
    d.det_inv = from(field(j, "det_inv"));
    d.minus_one = from(field(j, "minus_one"));
    return d;
  }
  if (scheme == "ckks") {
    CkksDatasetD d;
    d.n = n;
    d.N = N;
    d.sensitivity = get<double>(j, "sensitivity");
    d.pk = ckks_public_from_json(field(j, "public_key"));
    const ckks::Params params = d.pk.params;
    auto from = [&](const Json& e) { return ckks_ciphertext_from_json(e, params); };
    d.gamma = ct_list_from<ckks::Ciphertext>(j, "gamma", from);
    d.w = ct_matrix_from<ckks::Ciphertext>(j, "w", n, from);
    d.psi = ct_matrix_from<ckks::Ciphertext>(j, "psi", n, from);
    d.det_inv = from(field(j, "det_inv"));
    d.minus_one = from(field(j, "minus_one"));
    return d;
  }
  throw ProtocolError("unsupported_scheme", "unknown scheme '" + scheme + "'");
}

Json to_json(const EncryptedDatasetF& f) {
  if (const auto* e = std::get_if<ElGamalDatasetF>(&f)) {
    Json terms = Json::array();
    for (const auto& row : e->terms) {
      Json r = Json::array();
      for (const auto& ct : row) r.push_back(to_json(ct));
      terms.push_back(std::move(r));
    }
    return Json{{"scheme", "elgamal"},
                {"n", e->n},
                {"N", e->N},
                {"sensitivity", e->sensitivity},
                {"terms", std::move(terms)},
                {"manifest", ledger_json(e->ledger, e->terms.size())}};
  }
  const auto& c = std::get<CkksDatasetF>(f);
  auto to = [](const ckks::Ciphertext& ct) { return to_json(ct); };
  return Json{{"scheme", "ckks"},
              {"n", c.n},
              {"N", c.N},
              {"sensitivity", c.sensitivity},
              {"params", to_json(c.params)},
              {"gain", ct_list(c.gain, to)}};
}

EncryptedDatasetF dataset_f_from_json(const Json& j) {
  const auto scheme = get<std::string>(j, "scheme");
  if (scheme == "elgamal") {
    ElGamalDatasetF f;
    f.n = get<std::size_t>(j, "n");
    f.N = get<std::size_t>(j, "N");
    f.sensitivity = get<double>(j, "sensitivity");
    const Json& terms = field(j, "terms");
    if (!terms.is_array()) throw bad_payload("'terms' must be an array");
    for (const auto& row : terms) {
      if (!row.is_array() || row.size() != f.n) throw bad_payload("term row has the wrong width");
      std::vector<elgamal::Ciphertext> r;
      for (const auto& e : row) r.push_back(elgamal_ciphertext_from_json(e));
      f.terms.push_back(std::move(r));
    }
    if (!j.contains("manifest")) throw ProtocolError("ElGamal result carries no exponent ledger");
    const Json& manifest = field(j, "manifest");
    if (get<std::size_t>(manifest, "M") != f.terms.size())
      throw ProtocolError("manifest term count does not match the payload");
    f.ledger.omega = get<std::vector<std::vector<std::vector<int>>>>(manifest, "omega");
    f.ledger.xi = get<std::vector<std::vector<int>>>(manifest, "xi");
    return f;
  }
  if (scheme == "ckks") {
    CkksDatasetF f;
    f.n = get<std::size_t>(j, "n");
    f.N = get<std::size_t>(j, "N");
    f.sensitivity = get<double>(j, "sensitivity");
    f.params = ckks_params_from_json(field(j, "params"));
    const ckks::Params params = f.params;
    f.gain = ct_list_from<ckks::Ciphertext>(
        j, "gain", [&](const Json& e) { return ckks_ciphertext_from_json(e, params); });
    return f;
  }
  throw ProtocolError("unsupported_scheme", "unknown scheme '" + scheme + "'");
}

Json read_json_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InvalidArgument("cannot open '" + path.string() + "'");
  try {
    return Json::parse(in);
  } catch (const Json::exception& e) {
    throw bad_payload("'" + path.string() + "' is not valid JSON: " + e.what());
  }
}

void write_json_file(const std::filesystem::path& path, const Json& j) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw InvalidArgument("cannot write '" + path.string() + "'");
  out << j.dump() << '\n';
  if (!out) throw InvalidArgument("write to '" + path.string() + "' failed");
}

namespace {

const std::set<std::string>& secret_names() {
  static const std::set<std::string> names{"s", "sk", "secret", "secret_key"};
  return names;
}

void scan(const Json& j, const std::string& path, std::vector<std::string>& hits) {
  if (j.is_object()) {
    for (auto it = j.begin(); it != j.end(); ++it) {
      const std::string child = path + "/" + it.key();
      if (secret_names().count(it.key())) hits.push_back(child);
      scan(it.value(), child, hits);
    }
  } else if (j.is_array()) {
    for (std::size_t i = 0; i < j.size(); ++i) {
      // Polynomials and ciphertext lists hold no objects below strings.
      if (!j[i].is_structured()) break;
      scan(j[i], path + "/" + std::to_string(i), hits);
    }
  }
}

}  // namespace

std::vector<std::string> find_secret_fields(const Json& j) {
  std::vector<std::string> hits;
  scan(j, "", hits);
  return hits;
}

std::vector<std::string> find_secret_fields(const std::string& text) {
  // A key is a quoted name followed by ':'; values never are.
  std::vector<std::string> hits;
  for (const auto& name : secret_names()) {
    const std::string quoted = "\"" + name + "\"";
    for (auto pos = text.find(quoted); pos != std::string::npos; pos = text.find(quoted, pos + 1)) {
      auto next = pos + quoted.size();
      while (next < text.size() && std::isspace(static_cast<unsigned char>(text[next]))) ++next;
      if (next < text.size() && text[next] == ':') hits.push_back(name);
    }
  }
  return hits;
}

}  // namespace cfrit
