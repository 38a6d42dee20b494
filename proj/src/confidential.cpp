#include "cfrit/confidential.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "cfrit/bigint.hpp"
#include "cfrit/error.hpp"

namespace cfrit {

namespace {

std::size_t at(std::size_t row, std::size_t col, std::size_t cols) { return row * cols + col; }

// Original (row, col) of entry (l, c) of the minor that drops row i and column j.
std::pair<std::size_t, std::size_t> minor_source(std::size_t l, std::size_t c, std::size_t i,
                                                 std::size_t j) {
  return {l < i ? l : l + 1, c < j ? c : c + 1};
}

void check_frit_data(const FritData& data) {
  if (data.n == 0 || data.N == 0 || data.Gamma.size() != static_cast<Eigen::Index>(data.n * data.N) ||
      data.W.rows() != data.Gamma.size() || data.W.cols() != static_cast<Eigen::Index>(data.n) ||
      data.Psi.rows() != data.W.cols() || data.Psi.cols() != data.W.cols())
    throw DimensionError("client_prepare: inconsistent FRIT data shapes");
  if (!std::isfinite(data.det_psi_inv) || data.det_psi_inv == 0.0)
    throw SingularMatrixError("client_prepare: Psi is singular", std::numeric_limits<double>::infinity());
}

// Runs `encode_one` over every entry, tagging range failures with the entry name.
template <typename Ct, typename Fn>
void encrypt_all(const FritData& data, Fn&& encode_one, std::vector<Ct>& gamma, std::vector<Ct>& w,
                 std::vector<Ct>& psi, Ct& det_inv, Ct& minus_one) {
  auto guarded = [&](double x, const std::string& name) {
    try {
      return encode_one(x);
    } catch (const OverflowError& e) {
      throw OverflowError(name + ": " + e.what());
    } catch (const RangeError& e) {
      throw RangeError(name + ": " + e.what());
    }
  };
  const std::size_t rows = data.n * data.N;
  for (std::size_t i = 0; i < rows; ++i)
    gamma.push_back(guarded(data.Gamma(static_cast<Eigen::Index>(i)), "Gamma[" + std::to_string(i) + "]"));
  for (std::size_t i = 0; i < rows; ++i)
    for (std::size_t l = 0; l < data.n; ++l)
      w.push_back(guarded(data.W(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(l)),
                          "W[" + std::to_string(i) + "][" + std::to_string(l) + "]"));
  for (std::size_t i = 0; i < data.n; ++i)
    for (std::size_t j = 0; j < data.n; ++j)
      psi.push_back(guarded(data.Psi(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)),
                            "Psi[" + std::to_string(i) + "][" + std::to_string(j) + "]"));
  det_inv = guarded(data.det_psi_inv, "det(Psi)^-1");
  minus_one = guarded(-1.0, "-1");
}

void check_dataset_shapes(std::size_t n, std::size_t N, std::size_t gamma, std::size_t w,
                          std::size_t psi) {
  if (n == 0 || N == 0 || gamma != n * N || w != n * N * n || psi != n * n)
    throw ProtocolError("dataset D has inconsistent shapes");
}

}  // namespace

ExponentLedger exponent_table(const SignedPermutationTable& table, std::size_t n) {
  if (n == 0 || table.n != n) throw InvalidArgument("exponent_table: order mismatch");
  ExponentLedger ledger;
  for (const auto& row : table.rows) {
    std::vector<std::vector<int>> omega(n, std::vector<int>(n));
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j)
        omega[j][i] = static_cast<int>(n - 1) + 1 + (row.sign < 0 ? 1 : 0) + ((i + j) % 2 ? 1 : 0);
    ledger.omega.push_back(std::move(omega));
  }
  return ledger;
}

namespace {

// Full ledger for order n and window N: omega per permutation, xi per term.
ExponentLedger term_ledger(std::size_t n, std::size_t N) {
  ExponentLedger ledger = exponent_table(signed_permutations(n), n);
  ledger.xi.assign(term_count(n, N), {});
  for (std::size_t i = 0; i < n * N; ++i)
    for (std::size_t l = 0; l < n; ++l)
      for (std::size_t k = 0; k < ledger.omega.size(); ++k) {
        auto& xi = ledger.xi[term_index(k + 1, i + 1, l + 1, n, N) - 1];
        for (std::size_t m = 0; m < n; ++m) xi.push_back(ledger.omega[k][l][m] + 3);
      }
  return ledger;
}

}  // namespace

std::string scheme_name(const EncryptedDatasetD& d) {
  return std::holds_alternative<ElGamalDatasetD>(d) ? "elgamal" : "ckks";
}

std::string scheme_name(const EncryptedDatasetF& f) {
  return std::holds_alternative<ElGamalDatasetF>(f) ? "elgamal" : "ckks";
}

ElGamalDatasetD client_prepare_elgamal(const FritData& data, const elgamal::PublicKey& pk,
                                       double sensitivity, RandomSource& rng) {
  check_frit_data(data);
  ElGamalDatasetD d;
  d.pk = pk;
  d.n = data.n;
  d.N = data.N;
  d.sensitivity = sensitivity;
  auto encode_one = [&](double x) {
    return elgamal::encrypt(pk, elgamal::encode(x, sensitivity, pk).m, rng);
  };
  encrypt_all(data, encode_one, d.gamma, d.w, d.psi, d.det_inv, d.minus_one);
  return d;
}

ElGamalDatasetF server_tune_elgamal(const ElGamalDatasetD& d) {
  check_dataset_shapes(d.n, d.N, d.gamma.size(), d.w.size(), d.psi.size());
  const std::size_t n = d.n;
  const mpz_class& p = d.pk.p;
  const auto table = signed_permutations(n);

  ElGamalDatasetF f;
  f.n = n;
  f.N = d.N;
  f.sensitivity = d.sensitivity;
  f.ledger = term_ledger(n, d.N);

  // Enc(Phi_k(j, i)) per permutation, row-major in (j, i).
  std::vector<std::vector<elgamal::Ciphertext>> phi(table.rows.size());
  for (std::size_t k = 0; k < table.rows.size(); ++k) {
    const auto& sigma = table.rows[k];
    phi[k].resize(n * n);
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j < n; ++j) {
        elgamal::Ciphertext ct = elgamal::trivial_one();
        for (std::size_t l = 0; l + 1 < n; ++l) {
          const auto [r, c] = minor_source(l, sigma.perm[l], i, j);
          ct = elgamal::hmul(ct, d.psi[at(r, c, n)], p);
        }
        if (sigma.sign < 0) ct = elgamal::hmul(ct, d.minus_one, p);
        if ((i + j) % 2) ct = elgamal::hmul(ct, d.minus_one, p);
        phi[k][at(j, i, n)] = elgamal::hmul(ct, d.det_inv, p);
      }
    }
  }

  const std::size_t rows = n * d.N;
  f.terms.assign(term_count(n, d.N), {});
  for (std::size_t i = 0; i < rows; ++i) {
    const elgamal::Ciphertext neg_gamma = elgamal::hmul(d.minus_one, d.gamma[i], p);
    for (std::size_t l = 0; l < n; ++l) {
      const elgamal::Ciphertext base = elgamal::hmul(neg_gamma, d.w[at(i, l, n)], p);
      for (std::size_t k = 0; k < table.rows.size(); ++k) {
        const std::size_t j = term_index(k + 1, i + 1, l + 1, n, d.N) - 1;
        for (std::size_t m = 0; m < n; ++m) f.terms[j].push_back(elgamal::hmul(base, phi[k][at(l, m, n)], p));
      }
    }
  }
  return f;
}

std::vector<mpq_class> client_finalize_elgamal_exact(const ElGamalDatasetF& f,
                                                     const elgamal::PublicKey& pk,
                                                     const elgamal::SecretKey& sk, double gamma) {
  if (f.n == 0 || f.N == 0 || f.terms.size() != term_count(f.n, f.N))
    throw ProtocolError("ElGamal result has the wrong number of terms");
  // The exponents follow from (n, N) alone; a ledger that disagrees was altered.
  const ExponentLedger expected = term_ledger(f.n, f.N);
  if (f.ledger.xi != expected.xi || f.ledger.omega != expected.omega)
    throw ProtocolError("ElGamal exponent ledger does not match the term layout");
  const mpq_class g = exact_rational(gamma);
  std::vector<mpq_class> sum(f.n, 0);
  std::vector<mpq_class> powers{mpq_class(1)};
  for (std::size_t j = 0; j < f.terms.size(); ++j) {
    if (f.terms[j].size() != f.n)
      throw ProtocolError("ElGamal result term " + std::to_string(j) + " has the wrong width");
    for (std::size_t l = 0; l < f.n; ++l) {
      const int xi = f.ledger.xi[j][l];
      while (powers.size() <= static_cast<std::size_t>(xi)) powers.push_back(powers.back() * g);
      sum[l] += elgamal::decode_exact(elgamal::decrypt(pk, sk, f.terms[j][l]), powers[xi], pk);
    }
  }
  return sum;
}

GainVector client_finalize_elgamal(const ElGamalDatasetF& f, const elgamal::PublicKey& pk,
                                   const elgamal::SecretKey& sk, double gamma) {
  const auto exact = client_finalize_elgamal_exact(f, pk, sk, gamma);
  GainVector out(static_cast<Eigen::Index>(exact.size()));
  for (std::size_t l = 0; l < exact.size(); ++l) out(static_cast<Eigen::Index>(l)) = to_double(exact[l]);
  return out;
}

int ckks_required_depth(std::size_t n) {
  if (n == 0) throw InvalidArgument("ckks_required_depth: n must be positive");
  // -Phi entries: cofactor chain, the permutation sign, then the signed
  // determinant Enc(-1) x Enc(det^-1) which is itself one level deep. The
  // Gamma x W factor needs one level; the final product one more.
  const int c = n >= 2 ? static_cast<int>(n) - 2 : 0;
  const int s = c + (n >= 3 ? 1 : 0);
  const int phi = n == 1 ? 1 : std::max(1, s) + 1;
  return phi + 1;
}

CkksDatasetD client_prepare_ckks(const FritData& data, const ckks::PublicKey& pk, RandomSource& rng,
                                 std::optional<int> level) {
  check_frit_data(data);
  const int lvl = level.value_or(std::min(ckks_required_depth(data.n), pk.params.max_level));
  if (lvl < 0 || lvl > pk.params.max_level)
    throw InvalidArgument("client_prepare: level " + std::to_string(lvl) + " outside the chain");
  CkksDatasetD d;
  d.pk = pk;
  d.n = data.n;
  d.N = data.N;
  d.sensitivity = pk.params.gamma();
  auto encode_one = [&](double x) {
    return ckks::encrypt_at_level(pk, ckks::encode(x, pk.params), lvl, rng);
  };
  encrypt_all(data, encode_one, d.gamma, d.w, d.psi, d.det_inv, d.minus_one);
  return d;
}

CkksDatasetF server_tune_ckks(const CkksDatasetD& d) {
  check_dataset_shapes(d.n, d.N, d.gamma.size(), d.w.size(), d.psi.size());
  const std::size_t n = d.n;
  const auto& pk = d.pk;
  const auto& params = pk.params;
  const int top = d.minus_one.level;
  const int depth = ckks_required_depth(n);
  if (top < depth)
    throw DepthError("CKKS dataset provides " + std::to_string(top) + " levels, tuning order " +
                         std::to_string(n) + " needs " + std::to_string(depth),
                     depth, top);
  auto align = [&](const ckks::Ciphertext& ct, int level) {
    return ckks::mod_align(ct, std::min(level, ct.level), params);
  };
  auto mul = [&](const ckks::Ciphertext& a, const ckks::Ciphertext& b) {
    const int level = std::min(a.level, b.level);
    return ckks::mult(align(a, level), align(b, level), pk);
  };

  const auto table = signed_permutations(n);
  const ckks::Ciphertext neg_det = mul(d.det_inv, d.minus_one);
  std::vector<std::vector<ckks::Ciphertext>> phi(table.rows.size());
  int phi_level = top;
  for (std::size_t k = 0; k < table.rows.size(); ++k) {
    const auto& sigma = table.rows[k];
    phi[k].resize(n * n);
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j < n; ++j) {
        std::optional<ckks::Ciphertext> cof;
        for (std::size_t l = 0; l + 1 < n; ++l) {
          const auto [r, c] = minor_source(l, sigma.perm[l], i, j);
          const auto& entry = d.psi[at(r, c, n)];
          cof = cof ? mul(*cof, entry) : entry;
        }
        if (sigma.sign < 0) cof = mul(*cof, d.minus_one);
        // The term's leading -1 is folded in here: -(-1)^(i+j) det^-1.
        const ckks::Ciphertext& det = (i + j) % 2 ? d.det_inv : neg_det;
        ckks::Ciphertext entry = cof ? mul(det, *cof) : det;
        phi_level = std::min(phi_level, entry.level);
        phi[k][at(j, i, n)] = std::move(entry);
      }
    }
  }
  for (auto& per_k : phi)
    for (auto& ct : per_k) ct = align(ct, phi_level);

  CkksDatasetF f;
  f.params = params;
  f.n = n;
  f.N = d.N;
  f.sensitivity = d.sensitivity;
  const std::size_t rows = n * d.N;
  const int term_level = std::min(phi_level, top - 1);

  // Every term Gamma_i W_il (-Phi_k(l, m)) is a tensor product; the tensors are
  // summed exactly in the transform domain and relinearised once per element,
  // so the result does not depend on the summation order.
  const std::size_t per_element = rows * n * table.rows.size();
  std::vector<ckks::ProductSum> acc;
  for (std::size_t m = 0; m < n; ++m) acc.emplace_back(pk, term_level, per_element);
  std::vector<ckks::ProductSum::Operand> phi_forms;
  for (const auto& per_k : phi)
    for (const auto& ct : per_k) phi_forms.push_back(acc[0].transform(align(ct, term_level)));
  for (std::size_t i = 0; i < rows; ++i) {
    for (std::size_t l = 0; l < n; ++l) {
      const auto b = acc[0].transform(align(mul(d.gamma[i], d.w[at(i, l, n)]), term_level));
      for (std::size_t k = 0; k < table.rows.size(); ++k)
        for (std::size_t m = 0; m < n; ++m) acc[m].add(b, phi_forms[k * n * n + at(l, m, n)]);
    }
  }
  for (auto& sum : acc) f.gain.push_back(sum.result());
  return f;
}

EncryptedDatasetF server_tune(const EncryptedDatasetD& d) {
  if (const auto* e = std::get_if<ElGamalDatasetD>(&d)) return server_tune_elgamal(*e);
  return server_tune_ckks(std::get<CkksDatasetD>(d));
}

GainVector client_finalize_ckks(const CkksDatasetF& f, const ckks::SecretKey& sk, double gamma) {
  if (f.gain.size() != f.n || f.n == 0) throw ProtocolError("CKKS result has the wrong width");
  GainVector out(static_cast<Eigen::Index>(f.n));
  for (std::size_t m = 0; m < f.n; ++m)
    out(static_cast<Eigen::Index>(m)) =
        ckks::decode(ckks::decrypt(sk, f.gain[m]), gamma, f.gain[m].scale_power);
  return out;
}

}  // namespace cfrit
