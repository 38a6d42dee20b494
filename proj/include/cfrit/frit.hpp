#pragma once

#include <cstddef>
#include <vector>

#include "cfrit/plant.hpp"

namespace cfrit {

/// Rational transfer function in z, coefficients in descending powers.
struct TransferFunction {
  std::vector<double> numerator;
  std::vector<double> denominator;

  /// Throws InvalidArgument unless den[0] != 0 and deg num <= deg den.
  void validate() const;
};

/// Desired closed loop from v to each state component.
struct DesiredClosedLoop {
  std::vector<TransferFunction> components;
};

/// Regression data of the state-feedback FRIT problem.
struct FritData {
  Vector Gamma;  ///< length n*N, block j holds x_j - H_dj u over the window
  Matrix W;      ///< (n*N) x n, block j holds H_dj x^T over the window
  Matrix Psi;    ///< W^T W
  double det_psi_inv = 0.0;
  std::size_t n = 0;
  std::size_t N = 0;

  /// Builds Psi and its determinant reciprocal from Gamma and W.
  static FritData from_regression(Vector gamma, Matrix w);
};

/// Zero-initial-condition response of `tf` to `input`.
Vector filter_signal(const TransferFunction& tf, const Vector& input);

Vector build_gamma(const SignalLog& log, const DesiredClosedLoop& hd, std::size_t window_start,
                   std::size_t N);
Matrix build_w(const SignalLog& log, const DesiredClosedLoop& hd, std::size_t window_start,
               std::size_t N);
FritData make_frit_data(const SignalLog& log, const DesiredClosedLoop& hd,
                        std::size_t window_start, std::size_t N);

inline constexpr double kDefaultConditionBound = 1e12;

/// F* = -Gamma^T W (W^T W)^{-1}, solved by column-pivoting QR on W.
/// Throws SingularMatrixError when cond(Psi) exceeds `condition_bound`.
GainVector frit_gain(const FritData& data, double condition_bound = kDefaultConditionBound);

/// Pseudo exogenous signal u(k) - F x(k).
Vector fictitious_reference(const SignalLog& log, const GainVector& F);

/// J(F) = || x - H_d (u - F x) ||_2 over [window_start, window_start + N).
double objective(const SignalLog& log, const DesiredClosedLoop& hd, const GainVector& F,
                 std::size_t window_start, std::size_t N);

}  // namespace cfrit
