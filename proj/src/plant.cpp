#include "cfrit/plant.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

#include <Eigen/Eigenvalues>

#include "cfrit/error.hpp"

namespace cfrit {

void PlantModel::validate() const {
  if (A.rows() < 1 || A.rows() != A.cols())
    throw DimensionError("plant: A must be square with n >= 1, got " + std::to_string(A.rows()) +
                         "x" + std::to_string(A.cols()));
  if (B.size() != A.rows())
    throw DimensionError("plant: B has " + std::to_string(B.size()) + " rows, A has " +
                         std::to_string(A.rows()));
}

void SignalLog::validate() const {
  if (x.rows() != u.size() || u.size() != v.size())
    throw DimensionError("signal log: x, u, v lengths differ");
}

SignalLog simulate_closed_loop(const PlantModel& plant, const GainVector& F, const Vector& v) {
  plant.validate();
  const Eigen::Index n = plant.A.rows();
  if (F.size() != n)
    throw DimensionError("simulate: gain has " + std::to_string(F.size()) +
                         " entries, plant order is " + std::to_string(n));
  if (v.size() == 0) throw InvalidArgument("simulate: excitation sequence is empty");

  const Eigen::Index steps = v.size();
  SignalLog log;
  log.x = Matrix::Zero(steps, n);
  log.u = Vector::Zero(steps);
  log.v = v;
  Vector state = Vector::Zero(n);
  for (Eigen::Index k = 0; k < steps; ++k) {
    log.x.row(k) = state.transpose();
    const double input = F.dot(state) + v(k);
    log.u(k) = input;
    state = plant.A * state + plant.B * input;
  }
  return log;
}

Vector excitation_pulse(std::size_t total_steps) {
  if (total_steps < 6)
    throw InvalidArgument("excitation_pulse: need at least 6 steps, got " +
                          std::to_string(total_steps));
  Vector v = Vector::Zero(static_cast<Eigen::Index>(total_steps));
  v.segment(1, 5).setOnes();
  return v;
}

std::vector<std::complex<double>> closed_loop_poles(const PlantModel& plant, const GainVector& F) {
  plant.validate();
  if (F.size() != plant.A.rows())
    throw DimensionError("closed_loop_poles: gain/plant dimension mismatch");
  const Matrix closed = plant.A + plant.B * F;
  Eigen::EigenSolver<Matrix> solver(closed, /*computeEigenvectors=*/false);
  if (solver.info() != Eigen::Success) throw Error("eigen", "eigenvalue iteration did not converge");
  const auto values = solver.eigenvalues();
  std::vector<std::complex<double>> out(values.data(), values.data() + values.size());
  std::sort(out.begin(), out.end(), [](auto a, auto b) {
    return a.real() != b.real() ? a.real() < b.real() : a.imag() < b.imag();
  });
  return out;
}

double pole_distance(const std::vector<std::complex<double>>& a,
                     const std::vector<std::complex<double>>& b) {
  if (a.size() != b.size())
    throw InvalidArgument("pole_distance: pole lists differ in length (" +
                          std::to_string(a.size()) + " vs " + std::to_string(b.size()) + ")");
  if (a.size() > 8) throw InvalidArgument("pole_distance: at most 8 poles supported");
  std::vector<std::size_t> perm(a.size());
  std::iota(perm.begin(), perm.end(), std::size_t{0});
  double best = std::numeric_limits<double>::infinity();
  do {
    double sq = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) sq += std::norm(a[i] - b[perm[i]]);
    best = std::min(best, sq);
  } while (std::next_permutation(perm.begin(), perm.end()));
  return std::sqrt(best);
}

}  // namespace cfrit
