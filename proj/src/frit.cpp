#include "cfrit/frit.hpp"

#include <cmath>
#include <limits>
#include <string>

#include <Eigen/QR>
#include <Eigen/SVD>

#include "cfrit/error.hpp"

namespace cfrit {

void TransferFunction::validate() const {
  if (denominator.empty() || denominator.front() == 0.0)
    throw InvalidArgument("transfer function: leading denominator coefficient must be nonzero");
  if (numerator.empty()) throw InvalidArgument("transfer function: empty numerator");
  if (numerator.size() > denominator.size())
    throw InvalidArgument("transfer function is improper (deg num " +
                          std::to_string(numerator.size() - 1) + " > deg den " +
                          std::to_string(denominator.size() - 1) + ")");
}

FritData FritData::from_regression(Vector gamma, Matrix w) {
  if (w.cols() < 1 || gamma.size() != w.rows() || w.rows() % w.cols() != 0)
    throw DimensionError("FRIT data: Gamma must have n*N entries and W must be (n*N) x n");
  FritData data;
  data.n = static_cast<std::size_t>(w.cols());
  data.N = static_cast<std::size_t>(w.rows() / w.cols());
  data.Psi = w.transpose() * w;
  data.Gamma = std::move(gamma);
  data.W = std::move(w);
  const double det = data.Psi.determinant();
  data.det_psi_inv = det != 0.0 ? 1.0 / det : std::numeric_limits<double>::infinity();
  return data;
}

Vector filter_signal(const TransferFunction& tf, const Vector& input) {
  tf.validate();
  if (input.size() == 0) throw InvalidArgument("filter_signal: empty input");
  const std::size_t order = tf.denominator.size();
  // Left-pad the numerator so both polynomials are indexed by the same delay.
  std::vector<double> num(order - tf.numerator.size(), 0.0);
  num.insert(num.end(), tf.numerator.begin(), tf.numerator.end());
  const double a0 = tf.denominator.front();

  Vector y = Vector::Zero(input.size());
  for (Eigen::Index k = 0; k < input.size(); ++k) {
    double acc = 0.0;
    for (std::size_t i = 0; i < order && static_cast<Eigen::Index>(i) <= k; ++i) {
      const auto back = k - static_cast<Eigen::Index>(i);
      acc += num[i] * input(back);
      if (i > 0) acc -= tf.denominator[i] * y(back);
    }
    y(k) = acc / a0;
  }
  return y;
}

namespace {

void check_window(const SignalLog& log, const DesiredClosedLoop& hd, std::size_t start,
                  std::size_t N) {
  log.validate();
  if (hd.components.size() != log.order())
    throw DimensionError("desired closed loop has " + std::to_string(hd.components.size()) +
                         " components, plant order is " + std::to_string(log.order()));
  if (N == 0 || start + N > log.steps())
    throw RangeError("window [" + std::to_string(start) + ", " + std::to_string(start + N) +
                     ") does not fit a log of " + std::to_string(log.steps()) + " steps");
}

}  // namespace

Vector build_gamma(const SignalLog& log, const DesiredClosedLoop& hd, std::size_t window_start,
                   std::size_t N) {
  check_window(log, hd, window_start, N);
  const auto n = log.order();
  const auto s = static_cast<Eigen::Index>(window_start);
  const auto len = static_cast<Eigen::Index>(N);
  Vector gamma(static_cast<Eigen::Index>(n * N));
  for (std::size_t j = 0; j < n; ++j) {
    const Vector filtered_u = filter_signal(hd.components[j], log.u);
    const auto col = static_cast<Eigen::Index>(j);
    gamma.segment(col * len, len) = log.x.col(col).segment(s, len) - filtered_u.segment(s, len);
  }
  return gamma;
}

Matrix build_w(const SignalLog& log, const DesiredClosedLoop& hd, std::size_t window_start,
               std::size_t N) {
  check_window(log, hd, window_start, N);
  const auto n = static_cast<Eigen::Index>(log.order());
  const auto s = static_cast<Eigen::Index>(window_start);
  const auto len = static_cast<Eigen::Index>(N);
  Matrix w(n * len, n);
  for (Eigen::Index j = 0; j < n; ++j) {
    for (Eigen::Index c = 0; c < n; ++c) {
      const Vector filtered = filter_signal(hd.components[static_cast<std::size_t>(j)], log.x.col(c));
      w.block(j * len, c, len, 1) = filtered.segment(s, len);
    }
  }
  return w;
}

FritData make_frit_data(const SignalLog& log, const DesiredClosedLoop& hd,
                        std::size_t window_start, std::size_t N) {
  return FritData::from_regression(build_gamma(log, hd, window_start, N),
                                   build_w(log, hd, window_start, N));
}

GainVector frit_gain(const FritData& data, double condition_bound) {
  if (data.W.cols() < 1 || data.Gamma.size() != data.W.rows())
    throw DimensionError("frit_gain: inconsistent Gamma/W shapes");
  Eigen::JacobiSVD<Matrix> svd(data.W);
  const auto& sv = svd.singularValues();
  const double smin = sv(sv.size() - 1);
  const double cond =
      smin > 0.0 ? (sv(0) / smin) * (sv(0) / smin) : std::numeric_limits<double>::infinity();
  if (!(cond <= condition_bound))
    throw SingularMatrixError("frit_gain: Psi = W^T W is singular or ill-conditioned (cond ~ " +
                                  std::to_string(cond) + ")",
                              cond);
  const Vector f = data.W.colPivHouseholderQr().solve(-data.Gamma);
  return f.transpose();
}

Vector fictitious_reference(const SignalLog& log, const GainVector& F) {
  log.validate();
  if (static_cast<std::size_t>(F.size()) != log.order())
    throw DimensionError("fictitious_reference: gain/log dimension mismatch");
  return log.u - log.x * F.transpose();
}

double objective(const SignalLog& log, const DesiredClosedLoop& hd, const GainVector& F,
                 std::size_t window_start, std::size_t N) {
  check_window(log, hd, window_start, N);
  const Vector vt = fictitious_reference(log, F);
  const auto s = static_cast<Eigen::Index>(window_start);
  const auto len = static_cast<Eigen::Index>(N);
  double sq = 0.0;
  for (std::size_t j = 0; j < log.order(); ++j) {
    const Vector model = filter_signal(hd.components[j], vt);
    sq += (log.x.col(static_cast<Eigen::Index>(j)).segment(s, len) - model.segment(s, len))
              .squaredNorm();
  }
  return std::sqrt(sq);
}

}  // namespace cfrit
