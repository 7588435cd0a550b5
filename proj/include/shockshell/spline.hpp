#pragma once

#include <Eigen/Core>

namespace shockshell {

/// C2 cubic spline through (x_i, y_i) on a strictly monotone grid (either
/// direction). End slopes come from the cubic through the four nearest nodes,
/// so the interpolant is fourth-order accurate up to the boundary.
class CubicSpline {
 public:
  CubicSpline() = default;
  CubicSpline(Eigen::VectorXd x, Eigen::VectorXd y);

  double operator()(double x) const { return value(x); }
  double value(double x) const;
  double derivative(double x) const;

  const Eigen::VectorXd& knots() const { return x_; }
  const Eigen::VectorXd& values() const { return y_; }
  Eigen::Index size() const { return x_.size(); }
  bool empty() const { return x_.size() == 0; }

 private:
  Eigen::Index locate(double x) const;

  Eigen::VectorXd x_;
  Eigen::VectorXd y_;
  Eigen::VectorXd slope_;  // first derivative at the knots
  bool descending_ = false;
};

}  // namespace shockshell
