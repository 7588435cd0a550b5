#include "shockshell/spline.hpp"

#include <algorithm>
#include <vector>

#include "shockshell/errors.hpp"

namespace shockshell {

namespace {

// d/dx of the Lagrange interpolant through nodes xs[0..m) evaluated at xs[at].
double lagrange_slope_at_node(const double* xs, const double* ys, int m, int at) {
  double slope = 0.0;
  for (int j = 0; j < m; ++j) {
    double weight = 0.0;
    if (j == at) {
      for (int k = 0; k < m; ++k) {
        if (k != at) weight += 1.0 / (xs[at] - xs[k]);
      }
    } else {
      double num = 1.0;
      double den = 1.0;
      for (int k = 0; k < m; ++k) {
        if (k == j) continue;
        den *= xs[j] - xs[k];
        if (k != at) num *= xs[at] - xs[k];
      }
      weight = num / den;
    }
    slope += weight * ys[j];
  }
  return slope;
}

}  // namespace

CubicSpline::CubicSpline(Eigen::VectorXd x, Eigen::VectorXd y) : x_(std::move(x)), y_(std::move(y)) {
  if (x_.size() != y_.size() || x_.size() == 0) {
    throw InvariantViolation("spline needs matching, non-empty knot and value arrays");
  }
  const Eigen::Index n = x_.size();
  if (n > 1 && x_[1] < x_[0]) {
    x_.reverseInPlace();
    y_.reverseInPlace();
    descending_ = true;
  }
  for (Eigen::Index i = 1; i < n; ++i) {
    if (!(x_[i] > x_[i - 1])) {
      throw InvariantViolation("spline knots must be strictly monotone");
    }
  }
  slope_ = Eigen::VectorXd::Zero(n);
  if (n == 1) {
    return;
  }
  const int m = static_cast<int>(std::min<Eigen::Index>(4, n));
  slope_[0] = lagrange_slope_at_node(x_.data(), y_.data(), m, 0);
  slope_[n - 1] = lagrange_slope_at_node(x_.data() + (n - m), y_.data() + (n - m), m, m - 1);
  if (n == 2) {
    return;
  }

  // Interior slopes from C2 continuity; Thomas algorithm.
  const Eigen::Index k = n - 2;
  std::vector<double> lower(k), diag(k), upper(k), rhs(k);
  for (Eigen::Index j = 0; j < k; ++j) {
    const Eigen::Index i = j + 1;
    const double hl = x_[i] - x_[i - 1];
    const double hr = x_[i + 1] - x_[i];
    const double dl = (y_[i] - y_[i - 1]) / hl;
    const double dr = (y_[i + 1] - y_[i]) / hr;
    lower[j] = hr;
    diag[j] = 2.0 * (hl + hr);
    upper[j] = hl;
    rhs[j] = 3.0 * (hr * dl + hl * dr);
  }
  rhs[0] -= lower[0] * slope_[0];
  rhs[k - 1] -= upper[k - 1] * slope_[n - 1];
  for (Eigen::Index j = 1; j < k; ++j) {
    const double w = lower[j] / diag[j - 1];
    diag[j] -= w * upper[j - 1];
    rhs[j] -= w * rhs[j - 1];
  }
  slope_[k] = rhs[k - 1] / diag[k - 1];
  for (Eigen::Index j = k - 2; j >= 0; --j) {
    slope_[j + 1] = (rhs[j] - upper[j] * slope_[j + 2]) / diag[j];
  }
}

Eigen::Index CubicSpline::locate(double x) const {
  const double* begin = x_.data();
  const double* end = begin + x_.size();
  const auto it = std::upper_bound(begin, end, x);
  const Eigen::Index i = static_cast<Eigen::Index>(it - begin) - 1;
  return std::clamp<Eigen::Index>(i, 0, x_.size() - 2);
}

double CubicSpline::value(double x) const {
  if (x_.size() == 1) return y_[0];
  const Eigen::Index i = locate(x);
  const double h = x_[i + 1] - x_[i];
  const double t = (x - x_[i]) / h;
  const double t2 = t * t;
  const double t3 = t2 * t;
  return (2 * t3 - 3 * t2 + 1) * y_[i] + (t3 - 2 * t2 + t) * h * slope_[i] + (-2 * t3 + 3 * t2) * y_[i + 1] +
         (t3 - t2) * h * slope_[i + 1];
}

double CubicSpline::derivative(double x) const {
  if (x_.size() == 1) return 0.0;
  const Eigen::Index i = locate(x);
  const double h = x_[i + 1] - x_[i];
  const double t = (x - x_[i]) / h;
  const double t2 = t * t;
  return (6 * t2 - 6 * t) / h * y_[i] + (3 * t2 - 4 * t + 1) * slope_[i] + (-6 * t2 + 6 * t) / h * y_[i + 1] +
         (3 * t2 - 2 * t) * slope_[i + 1];
}

}  // namespace shockshell
