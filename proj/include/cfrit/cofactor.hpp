#pragma once

#include <cstddef>
#include <vector>

#include "cfrit/frit.hpp"

namespace cfrit {

inline constexpr std::size_t kDefaultMaxOrder = 6;

struct SignedPermutation {
  std::vector<std::size_t> perm;  ///< 0-based permutation of {0..n-2}
  int sign = 1;
};

/// All (n-1)! permutations of {0..n-2} in lexicographic order with parities.
struct SignedPermutationTable {
  std::size_t n = 0;
  std::vector<SignedPermutation> rows;
};

SignedPermutationTable signed_permutations(std::size_t n, std::size_t max_order = kDefaultMaxOrder);

/// Ψ with row `row` and column `col` removed.
Matrix minor_matrix(const Matrix& psi, std::size_t row, std::size_t col);

/// Phi_k(j, i) = det(Psi)^-1 (-1)^(i+j) sgn(sigma_k) prod_l minor_ij(l, sigma_k(l)).
/// Summing over k yields Psi^-1.
std::vector<Matrix> phi_matrices(const Matrix& psi, const SignedPermutationTable& table);

/// 1-based flat index j(k, i, l) = (k-1) n^2 N + (i-1) n + l.
std::size_t term_index(std::size_t k, std::size_t i, std::size_t l, std::size_t n, std::size_t N);
/// (n-1)! * n^2 * N.
std::size_t term_count(std::size_t n, std::size_t N);

/// Row vectors -Gamma_i W_il Phi_k.row(l), ordered by term_index.
std::vector<GainVector> gain_terms(const FritData& data, const std::vector<Matrix>& phis);

Matrix invert_via_cofactors(const Matrix& psi, std::size_t max_order = kDefaultMaxOrder);

/// Leibniz determinant over the full symmetric group; n <= max_order.
double leibniz_determinant(const Matrix& m, std::size_t max_order = kDefaultMaxOrder);

}  // namespace cfrit
