#include <gtest/gtest.h>

#include <random>

#include "cfrit/cofactor.hpp"
#include "cfrit/error.hpp"
#include "cfrit/setups.hpp"
#include "support.hpp"

using namespace cfrit;

TEST(Permutations, LexicographicWithParity) {
  const auto t3 = signed_permutations(3);
  ASSERT_EQ(t3.rows.size(), 2u);
  EXPECT_EQ(t3.rows[0].perm, (std::vector<std::size_t>{0, 1}));
  EXPECT_EQ(t3.rows[0].sign, 1);
  EXPECT_EQ(t3.rows[1].perm, (std::vector<std::size_t>{1, 0}));
  EXPECT_EQ(t3.rows[1].sign, -1);

  const auto t4 = signed_permutations(4);
  ASSERT_EQ(t4.rows.size(), 6u);
  const int signs[] = {1, -1, -1, 1, 1, -1};
  for (std::size_t k = 0; k < 6; ++k) EXPECT_EQ(t4.rows[k].sign, signs[k]) << k;
  EXPECT_EQ(t4.rows[3].perm, (std::vector<std::size_t>{1, 2, 0}));

  const auto t1 = signed_permutations(1);
  ASSERT_EQ(t1.rows.size(), 1u);
  EXPECT_TRUE(t1.rows[0].perm.empty());
}

TEST(Permutations, CapacityCap) {
  EXPECT_NO_THROW(signed_permutations(6));
  EXPECT_THROW(signed_permutations(7), CapacityError);
  EXPECT_THROW(signed_permutations(0), InvalidArgument);
}

TEST(Cofactor, TwoByTwoInverse) {
  Matrix psi(2, 2);
  psi << 2, 1, 1, 2;
  Matrix expect(2, 2);
  expect << 2.0 / 3, -1.0 / 3, -1.0 / 3, 2.0 / 3;
  EXPECT_LT((invert_via_cofactors(psi) - expect).cwiseAbs().maxCoeff(), 1e-15);
  const auto phis = phi_matrices(psi, signed_permutations(2));
  ASSERT_EQ(phis.size(), 1u);
  EXPECT_LT((phis[0] - expect).cwiseAbs().maxCoeff(), 1e-15);
}

TEST(Cofactor, MinorAndDeterminant) {
  Matrix m(3, 3);
  m << 1, 2, 3, 4, 5, 6, 7, 8, 10;
  Matrix minor(2, 2);
  minor << 1, 3, 7, 10;
  EXPECT_EQ(minor_matrix(m, 1, 1), minor);
  EXPECT_DOUBLE_EQ(leibniz_determinant(m), -3.0);
  EXPECT_DOUBLE_EQ(leibniz_determinant(Matrix::Constant(1, 1, 4.0)), 4.0);
}

TEST(Cofactor, TermCountsAndIndices) {
  EXPECT_EQ(term_count(2, 50), 200u);
  EXPECT_EQ(term_count(3, 30), 540u);
  EXPECT_EQ(term_count(1, 7), 7u);
  EXPECT_EQ(term_index(1, 1, 1, 2, 50), 1u);
  EXPECT_EQ(term_index(1, 100, 2, 2, 50), 200u);
  EXPECT_EQ(term_index(2, 1, 1, 3, 30), 271u);
  EXPECT_EQ(term_index(2, 90, 3, 3, 30), 540u);
  EXPECT_THROW(term_index(0, 1, 1, 2, 5), InvalidArgument);
  EXPECT_THROW(term_index(1, 11, 1, 2, 5), InvalidArgument);
}

TEST(Cofactor, TermsSumToTheGain) {
  const auto setup = example1();
  const FritData data = make_frit_data(setup.simulate(), setup.hd, 0, setup.N);
  const auto terms = gain_terms(data, phi_matrices(data.Psi, signed_permutations(2)));
  ASSERT_EQ(terms.size(), 200u);
  GainVector sum = GainVector::Zero(2);
  for (const auto& t : terms) sum += t;
  EXPECT_LT((sum - frit_gain(data)).cwiseAbs().maxCoeff(), 1e-9);
}

TEST(Cofactor, TermsSumToTheGainForOrderThree) {
  std::mt19937_64 gen(3);
  const FritData data = cfrit::testing::random_frit_data(gen, 3, 6);
  const auto terms = gain_terms(data, phi_matrices(data.Psi, signed_permutations(3)));
  ASSERT_EQ(terms.size(), term_count(3, 6));
  GainVector sum = GainVector::Zero(3);
  for (const auto& t : terms) sum += t;
  EXPECT_LT((sum - frit_gain(data)).cwiseAbs().maxCoeff(), 1e-9);
}
