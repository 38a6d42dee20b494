#include "support.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

#include <Eigen/Dense>

namespace cfrit::testing {

std::uint64_t ScriptedRandom::next_u64() {
  if (pos_ == words_.size()) throw std::logic_error("ScriptedRandom: script exhausted");
  return words_[pos_++];
}

RationalMatrix to_rational(const Matrix& m) {
  RationalMatrix out(static_cast<std::size_t>(m.rows()),
                     std::vector<mpq_class>(static_cast<std::size_t>(m.cols())));
  for (Eigen::Index r = 0; r < m.rows(); ++r)
    for (Eigen::Index c = 0; c < m.cols(); ++c) out[r][c] = mpq_class(m(r, c));
  return out;
}

Matrix to_double(const RationalMatrix& m) {
  Matrix out(static_cast<Eigen::Index>(m.size()),
             static_cast<Eigen::Index>(m.empty() ? 0 : m[0].size()));
  for (std::size_t r = 0; r < m.size(); ++r)
    for (std::size_t c = 0; c < m[r].size(); ++c) out(r, c) = m[r][c].get_d();
  return out;
}

std::optional<RationalMatrix> exact_inverse(const RationalMatrix& m) {
  const std::size_t n = m.size();
  RationalMatrix a = m;
  RationalMatrix inv(n, std::vector<mpq_class>(n, 0));
  for (std::size_t i = 0; i < n; ++i) inv[i][i] = 1;
  for (std::size_t col = 0; col < n; ++col) {
    std::size_t pivot = col;
    while (pivot < n && a[pivot][col] == 0) ++pivot;
    if (pivot == n) return std::nullopt;
    std::swap(a[pivot], a[col]);
    std::swap(inv[pivot], inv[col]);
    const mpq_class p = a[col][col];
    for (std::size_t c = 0; c < n; ++c) {
      a[col][c] /= p;
      inv[col][c] /= p;
    }
    for (std::size_t r = 0; r < n; ++r) {
      if (r == col || a[r][col] == 0) continue;
      const mpq_class f = a[r][col];
      for (std::size_t c = 0; c < n; ++c) {
        a[r][c] -= f * a[col][c];
        inv[r][c] -= f * inv[col][c];
      }
    }
  }
  return inv;
}

mpq_class exact_determinant(RationalMatrix a) {
  const std::size_t n = a.size();
  mpq_class det = 1;
  for (std::size_t col = 0; col < n; ++col) {
    std::size_t pivot = col;
    while (pivot < n && a[pivot][col] == 0) ++pivot;
    if (pivot == n) return 0;
    if (pivot != col) {
      std::swap(a[pivot], a[col]);
      det = -det;
    }
    det *= a[col][col];
    for (std::size_t r = col + 1; r < n; ++r) {
      const mpq_class f = a[r][col] / a[col][col];
      for (std::size_t c = col; c < n; ++c) a[r][c] -= f * a[col][c];
    }
  }
  return det;
}

std::optional<std::vector<mpq_class>> exact_normal_equation_gain(const Vector& gamma,
                                                                 const Matrix& w) {
  const auto rows = static_cast<std::size_t>(w.rows());
  const auto n = static_cast<std::size_t>(w.cols());
  RationalMatrix psi(n, std::vector<mpq_class>(n, 0));
  std::vector<mpq_class> rhs(n, 0);
  for (std::size_t r = 0; r < rows; ++r) {
    const mpq_class g(gamma(r));
    for (std::size_t i = 0; i < n; ++i) {
      const mpq_class wi(w(r, i));
      rhs[i] -= wi * g;
      for (std::size_t j = 0; j < n; ++j) psi[i][j] += wi * mpq_class(w(r, j));
    }
  }
  const auto inv = exact_inverse(psi);
  if (!inv) return std::nullopt;
  std::vector<mpq_class> f(n, 0);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) f[i] += (*inv)[i][j] * rhs[j];
  return f;
}

std::vector<double> impulse_response(const std::vector<double>& num, const std::vector<double>& den,
                                     std::size_t len) {
  // num(z)/den(z) with equal-length coefficient lists is a power series in z^-1.
  std::vector<double> b(den.size(), 0.0);
  std::copy(num.begin(), num.end(), b.end() - static_cast<std::ptrdiff_t>(num.size()));
  std::vector<double> h(len, 0.0);
  for (std::size_t k = 0; k < len; ++k) {
    double acc = k < b.size() ? b[k] : 0.0;
    for (std::size_t i = 1; i < den.size() && i <= k; ++i) acc -= den[i] * h[k - i];
    h[k] = acc / den[0];
  }
  return h;
}

Vector convolve(const std::vector<double>& h, const Vector& x) {
  Vector y = Vector::Zero(x.size());
  for (Eigen::Index k = 0; k < x.size(); ++k)
    for (Eigen::Index i = 0; i <= k && static_cast<std::size_t>(i) < h.size(); ++i)
      y(k) += h[static_cast<std::size_t>(i)] * x(k - i);
  return y;
}

mpz_class centre(const mpz_class& v, unsigned bits) {
  mpz_class mod = 1;
  mod <<= bits;
  mpz_class r = v % mod;
  if (r < 0) r += mod;
  if (r > mod / 2) r -= mod;
  return r;
}

std::vector<mpz_class> negacyclic_product(const std::vector<mpz_class>& a,
                                          const std::vector<mpz_class>& b, unsigned bits) {
  const std::size_t d = a.size();
  std::vector<mpz_class> out(d, 0);
  for (std::size_t i = 0; i < d; ++i)
    for (std::size_t j = 0; j < d; ++j) {
      if (i + j < d)
        out[i + j] += a[i] * b[j];
      else
        out[i + j - d] -= a[i] * b[j];
    }
  for (auto& c : out) c = centre(c, bits);
  return out;
}

double uniform(std::mt19937_64& gen, double lo, double hi) {
  return std::uniform_real_distribution<double>(lo, hi)(gen);
}

mpz_class random_mpz(std::mt19937_64& gen, unsigned bits) {
  mpz_class out = 0;
  for (unsigned done = 0; done < bits; done += 64) {
    const unsigned take = std::min(64u, bits - done);
    std::uint64_t w = gen();
    if (take < 64) w &= (std::uint64_t{1} << take) - 1;
    out <<= take;
    out += mpz_class(std::to_string(w));
  }
  return out;
}

Matrix random_spd(std::mt19937_64& gen, std::size_t n, double max_cond) {
  const auto N = static_cast<Eigen::Index>(n);
  Matrix a(N, N);
  for (Eigen::Index r = 0; r < N; ++r)
    for (Eigen::Index c = 0; c < N; ++c) a(r, c) = uniform(gen, -1.0, 1.0);
  const Eigen::HouseholderQR<Matrix> qr(a);
  const Matrix q = qr.householderQ();
  // Eigenvalues log-uniform in [1, max_cond].
  Vector eig(N);
  for (Eigen::Index i = 0; i < N; ++i) eig(i) = std::exp(uniform(gen, 0.0, std::log(max_cond)));
  eig(0) = 1.0;
  const double scale = std::exp(uniform(gen, -3.0, 3.0));
  Matrix spd = scale * q * eig.asDiagonal() * q.transpose();
  return 0.5 * (spd + spd.transpose());
}

FritData random_frit_data(std::mt19937_64& gen, std::size_t n, std::size_t N) {
  const auto rows = static_cast<Eigen::Index>(n * N);
  Matrix w(rows, static_cast<Eigen::Index>(n));
  Vector g(rows);
  for (;;) {
    for (Eigen::Index r = 0; r < rows; ++r) {
      g(r) = uniform(gen, -2.0, 2.0);
      for (Eigen::Index c = 0; c < w.cols(); ++c) w(r, c) = uniform(gen, -2.0, 2.0);
    }
    Eigen::JacobiSVD<Matrix> svd(w);
    const auto& sv = svd.singularValues();
    if (sv(sv.size() - 1) > 1e-2 * sv(0)) break;
  }
  return FritData::from_regression(g, w);
}

PropertyResult check_property(const std::string& name, std::size_t cases, std::uint64_t seed,
                              const PropertyCase& body) {
  PropertyResult result;
  result.name = name;
  std::mt19937_64 gen(seed);
  for (std::size_t i = 0; i < cases; ++i) {
    ++result.cases;
    std::optional<std::string> failure;
    try {
      failure = body(gen, i);
    } catch (const std::exception& e) {
      failure = std::string("threw: ") + e.what();
    }
    if (failure) {
      if (result.failures++ == 0) {
        std::ostringstream os;
        os << "case " << i << " (seed " << seed << "): " << *failure;
        result.first_failure = os.str();
      }
    }
  }
  return result;
}

}  // namespace cfrit::testing
