#include <gtest/gtest.h>

#include <cmath>
#include <complex>

#include "cfrit/error.hpp"
#include "cfrit/plant.hpp"
#include "cfrit/setups.hpp"

using namespace cfrit;

TEST(Plant, ExampleOneFirstStepsByHand) {
  // x(k+1) = [[1,1],[0,-2]] x + [0,1] u, u = [-0.8, 2] x + v, pulse on k = 1..5.
  const auto setup = example1();
  const SignalLog log = setup.simulate();
  ASSERT_EQ(log.steps(), 50u);
  EXPECT_EQ(log.x.row(0), Eigen::RowVector2d(0, 0));
  EXPECT_EQ(log.x.row(1), Eigen::RowVector2d(0, 0));
  EXPECT_EQ(log.u(1), 1.0);
  EXPECT_EQ(log.x.row(2), Eigen::RowVector2d(0, 1));
  EXPECT_DOUBLE_EQ(log.u(2), 3.0);
  EXPECT_EQ(log.x.row(3), Eigen::RowVector2d(1, 1));
  EXPECT_DOUBLE_EQ(log.u(3), 2.2);
  EXPECT_DOUBLE_EQ(log.x(4, 0), 2.0);
  EXPECT_NEAR(log.x(4, 1), 0.2, 1e-15);
}

TEST(Plant, ExcitationPulse) {
  const Vector v = excitation_pulse(8);
  EXPECT_EQ(v, (Vector(8) << 0, 1, 1, 1, 1, 1, 0, 0).finished());
  EXPECT_THROW(excitation_pulse(5), InvalidArgument);
}

TEST(Plant, RejectsMismatchedShapes) {
  PlantModel p{Matrix::Identity(2, 2), Vector::Ones(3), 1.0};
  EXPECT_THROW(p.validate(), DimensionError);
  p.B = Vector::Ones(2);
  EXPECT_THROW(simulate_closed_loop(p, GainVector::Zero(3), excitation_pulse(10)), DimensionError);
  EXPECT_THROW(simulate_closed_loop(p, GainVector::Zero(2), Vector()), InvalidArgument);
  EXPECT_THROW(closed_loop_poles(p, GainVector::Zero(1)), DimensionError);
  PlantModel rect{Matrix::Zero(2, 3), Vector::Zero(2), 1.0};
  EXPECT_THROW(rect.validate(), DimensionError);
}

TEST(Plant, ExampleOnePolesUnderIdealGain) {
  // A + B [-0.5, 1.5] = [[1, 1], [-0.5, -0.5]]: trace 0.5, determinant 0.
  const auto poles = closed_loop_poles(example1().plant, (GainVector(2) << -0.5, 1.5).finished());
  ASSERT_EQ(poles.size(), 2u);
  EXPECT_NEAR(std::abs(poles[0]), 0.0, 1e-12);
  EXPECT_NEAR(poles[1].real(), 0.5, 1e-12);
}

TEST(Plant, ExampleOneInitialPolesAreComplex) {
  // z^2 - z + 0.8 = 0.
  const auto poles = closed_loop_poles(example1().plant, example1().F_ini);
  ASSERT_EQ(poles.size(), 2u);
  EXPECT_NEAR(poles[0].real(), 0.5, 1e-12);
  EXPECT_NEAR(std::abs(poles[0].imag()), std::sqrt(0.55), 1e-12);
  EXPECT_NEAR(poles[0].imag(), -poles[1].imag(), 1e-12);
}

TEST(Plant, PoleDistancePairsOptimally) {
  std::vector<std::complex<double>> a{{0, 0}, {1, 0}}, b{{1, 0}, {0, 0.1}};
  EXPECT_NEAR(pole_distance(a, b), 0.1, 1e-15);
  EXPECT_THROW(pole_distance(a, {{0, 0}}), InvalidArgument);
}

TEST(Plant, ExampleTwoShape) {
  const auto setup = example2();
  EXPECT_EQ(setup.plant.order(), 3u);
  EXPECT_EQ(setup.N, 30u);
  EXPECT_EQ(setup.simulate().steps(), 30u);
  EXPECT_THROW(example_by_id(3), InvalidArgument);
}
