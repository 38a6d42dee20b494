#pragma once

#include <complex>
#include <cstddef>
#include <vector>

#include <Eigen/Dense>

namespace cfrit {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
/// State-feedback gain F (1 x n), used as u = F x + v.
using GainVector = Eigen::RowVectorXd;

/// Discrete-time single-input plant x(k+1) = A x(k) + B u(k).
struct PlantModel {
  Matrix A;
  Vector B;
  double sampling_period = 0.0;  ///< seconds; metadata only

  std::size_t order() const { return static_cast<std::size_t>(A.rows()); }
  /// Throws DimensionError unless A is square, B matches, n >= 1.
  void validate() const;
};

/// Closed-loop record. Row k of `x` is x(k)^T.
struct SignalLog {
  Matrix x;  ///< steps x n
  Vector u;
  Vector v;

  std::size_t steps() const { return static_cast<std::size_t>(u.size()); }
  std::size_t order() const { return static_cast<std::size_t>(x.cols()); }
  void validate() const;
};

/// Runs u(k) = F x(k) + v(k), x(k+1) = A x(k) + B u(k) from x(0) = 0.
SignalLog simulate_closed_loop(const PlantModel& plant, const GainVector& F,
                               const Vector& v);

/// v(0) = 0, v(k) = 1 for 1 <= k <= 5, zero afterwards. total_steps >= 6.
Vector excitation_pulse(std::size_t total_steps);

/// Eigenvalues of A + B F, with multiplicity.
std::vector<std::complex<double>> closed_loop_poles(const PlantModel& plant,
                                                    const GainVector& F);

/// l2 norm of pole differences under the best pairing of the two multisets
/// (brute force over permutations; at most 8 poles).
double pole_distance(const std::vector<std::complex<double>>& a,
                     const std::vector<std::complex<double>>& b);

}  // namespace cfrit
