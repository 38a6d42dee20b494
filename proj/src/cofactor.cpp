#include "cfrit/cofactor.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

#include "cfrit/error.hpp"

namespace cfrit {

namespace {

int parity_sign(const std::vector<std::size_t>& p) {
  std::size_t inversions = 0;
  for (std::size_t a = 0; a < p.size(); ++a)
    for (std::size_t b = a + 1; b < p.size(); ++b)
      if (p[a] > p[b]) ++inversions;
  return inversions % 2 == 0 ? 1 : -1;
}

void check_order(std::size_t n, std::size_t max_order) {
  if (n == 0) throw InvalidArgument("matrix order must be at least 1");
  if (n > max_order)
    throw CapacityError("order " + std::to_string(n) + " exceeds the cofactor cap of " +
                        std::to_string(max_order) + " ((n-1)! terms grow factorially)");
}

}  // namespace

SignedPermutationTable signed_permutations(std::size_t n, std::size_t max_order) {
  check_order(n, max_order);
  SignedPermutationTable table;
  table.n = n;
  std::vector<std::size_t> p(n - 1);
  std::iota(p.begin(), p.end(), std::size_t{0});
  do {
    table.rows.push_back({p, parity_sign(p)});
  } while (std::next_permutation(p.begin(), p.end()));
  return table;
}

Matrix minor_matrix(const Matrix& psi, std::size_t row, std::size_t col) {
  const auto n = static_cast<std::size_t>(psi.rows());
  Matrix out(static_cast<Eigen::Index>(n - 1), static_cast<Eigen::Index>(n - 1));
  for (std::size_t r = 0, ro = 0; r < n; ++r) {
    if (r == row) continue;
    for (std::size_t c = 0, co = 0; c < n; ++c) {
      if (c == col) continue;
      out(static_cast<Eigen::Index>(ro), static_cast<Eigen::Index>(co)) =
          psi(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c));
      ++co;
    }
    ++ro;
  }
  return out;
}

std::vector<Matrix> phi_matrices(const Matrix& psi, const SignedPermutationTable& table) {
  if (psi.rows() != psi.cols() || static_cast<std::size_t>(psi.rows()) != table.n)
    throw DimensionError("phi_matrices: Psi must be square of the table's order");
  const std::size_t n = table.n;
  const double det = psi.determinant();
  if (det == 0.0 || !std::isfinite(det))
    throw SingularMatrixError("phi_matrices: Psi is singular", std::numeric_limits<double>::infinity());
  const double det_inv = 1.0 / det;

  std::vector<Matrix> phis;
  phis.reserve(table.rows.size());
  for (const auto& row : table.rows) {
    Matrix phi(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j < n; ++j) {
        const Matrix minor = minor_matrix(psi, i, j);
        double prod = 1.0;
        for (std::size_t l = 0; l + 1 < n; ++l)
          prod *= minor(static_cast<Eigen::Index>(l), static_cast<Eigen::Index>(row.perm[l]));
        const double sign = ((i + j) % 2 == 0 ? 1.0 : -1.0) * row.sign;
        phi(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(i)) = det_inv * sign * prod;
      }
    }
    phis.push_back(std::move(phi));
  }
  return phis;
}

std::size_t term_index(std::size_t k, std::size_t i, std::size_t l, std::size_t n, std::size_t N) {
  const std::size_t perms = n == 0 ? 0 : term_count(n, N) / (n * n * std::max<std::size_t>(N, 1));
  if (n == 0 || N == 0 || k < 1 || k > perms || i < 1 || i > n * N || l < 1 || l > n)
    throw InvalidArgument("term_index: (" + std::to_string(k) + ", " + std::to_string(i) + ", " +
                          std::to_string(l) + ") outside the index box for n = " + std::to_string(n) +
                          ", N = " + std::to_string(N));
  return (k - 1) * n * n * N + (i - 1) * n + l;
}

std::size_t term_count(std::size_t n, std::size_t N) {
  std::size_t fact = 1;
  for (std::size_t f = 2; f < n; ++f) fact *= f;
  return fact * n * n * N;
}

std::vector<GainVector> gain_terms(const FritData& data, const std::vector<Matrix>& phis) {
  const auto n = static_cast<Eigen::Index>(data.n);
  const auto rows = data.W.rows();
  if (data.Gamma.size() != rows || data.W.cols() != n)
    throw DimensionError("gain_terms: inconsistent FRIT data");
  for (const auto& phi : phis)
    if (phi.rows() != n || phi.cols() != n) throw DimensionError("gain_terms: Phi shape mismatch");

  std::vector<GainVector> terms;
  terms.reserve(phis.size() * static_cast<std::size_t>(rows * n));
  for (const auto& phi : phis)
    for (Eigen::Index i = 0; i < rows; ++i)
      for (Eigen::Index l = 0; l < n; ++l)
        terms.push_back(-data.Gamma(i) * data.W(i, l) * phi.row(l));
  return terms;
}

Matrix invert_via_cofactors(const Matrix& psi, std::size_t max_order) {
  if (psi.rows() != psi.cols()) throw DimensionError("invert_via_cofactors: matrix is not square");
  const auto table = signed_permutations(static_cast<std::size_t>(psi.rows()), max_order);
  Matrix sum = Matrix::Zero(psi.rows(), psi.cols());
  for (const auto& phi : phi_matrices(psi, table)) sum += phi;
  return sum;
}

double leibniz_determinant(const Matrix& m, std::size_t max_order) {
  if (m.rows() != m.cols()) throw DimensionError("leibniz_determinant: matrix is not square");
  const auto n = static_cast<std::size_t>(m.rows());
  check_order(n, max_order);
  std::vector<std::size_t> p(n);
  std::iota(p.begin(), p.end(), std::size_t{0});
  double det = 0.0;
  do {
    double prod = parity_sign(p);
    for (std::size_t r = 0; r < n; ++r)
      prod *= m(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(p[r]));
    det += prod;
  } while (std::next_permutation(p.begin(), p.end()));
  return det;
}

}  // namespace cfrit
