#pragma once

// Transport of differential forms along a vector field transverse to the
// slices x0 = const:
//
//   L_X omega + f omega = theta,   omega|_{x0=0} = omega0,
//
// on [0, 1] x T^2 (a periodic chart of side 2 pi standing in for a closed
// surface). For a straightened field X = X0 d/dx0 the Lie derivative splits
// into scalar ODEs in x0: components carrying the index 0 decouple,
//
//   d0 w_0.. + (d0 X0 / X0 + f / X0) w_0.. = theta_0.. / X0,
//
// and the purely spatial ones pick up the solved 0-components through the
// spatial gradient of X0. A general transverse field is reduced to this case
// by straighten_flow.

#include <Eigen/Core>
#include <array>
#include <cstdint>
#include <functional>
#include <numbers>

namespace shockshell {

struct ChartGrid {
  int n_t = 65;  // samples on x0 in [0, 1], endpoints included
  int n_x = 32;  // samples per periodic direction

  static constexpr double period = 2.0 * std::numbers::pi;

  double dt() const { return 1.0 / (n_t - 1); }
  double dx() const { return period / n_x; }
  double t(int k) const { return k * dt(); }
  double x(int i) const { return i * dx(); }
  Eigen::Index slice_size() const { return static_cast<Eigen::Index>(n_x) * n_x; }
  Eigen::Index size() const { return n_t * slice_size(); }
  Eigen::Index index(int k, int i, int j) const { return (static_cast<Eigen::Index>(k) * n_x + i) * n_x + j; }

  /// Throws InvariantViolation unless n_t, n_x >= 16.
  void validate() const;
  bool operator==(const ChartGrid&) const = default;
};

/// Scalar samples on a ChartGrid, x0 slowest.
struct ScalarField {
  ChartGrid grid;
  Eigen::VectorXd values;

  ScalarField() = default;
  ScalarField(const ChartGrid& g, double fill = 0.0);

  double operator()(int k, int i, int j) const { return values[grid.index(k, i, j)]; }
  double& operator()(int k, int i, int j) { return values[grid.index(k, i, j)]; }

  static ScalarField sample(const ChartGrid& g, const std::function<double(double, double, double)>& fn);
};

/// Second-order finite differences in x0 (one-sided at the ends).
ScalarField time_derivative(const ScalarField& field);
/// Fourth-order centered periodic differences; direction 1 or 2.
ScalarField spatial_derivative(const ScalarField& field, int direction);
/// Cubic Lagrange interpolation (periodic in space, clamped stencil in x0).
double interpolate(const ScalarField& field, double t, double x1, double x2);

/// Index tuples of the stored components.
using IndexTuple = std::array<int, 2>;
/// Degree 1: (0), (1), (2). Degree 2: (0,1), (0,2), (1,2).
IndexTuple component_indices(int degree, int c);
/// True when component c carries the index 0.
inline bool has_time_index(int degree, int c) { return degree == 1 ? c == 0 : c < 2; }

/// An r-form (r in {1, 2}) with components stored for increasing index
/// tuples. On a 3-dimensional chart both degrees have three components.
struct FormField {
  int degree = 1;
  ChartGrid grid;
  std::array<Eigen::VectorXd, 3> components;

  static FormField zero(const ChartGrid& g, int degree);

  /// omega_{a b} with antisymmetry applied (degree 2 only).
  double value(int a, int b, Eigen::Index point) const;
  /// max over components and points.
  double max_norm() const;
};

FormField linear_combination(double a, const FormField& p, double b, const FormField& q);

/// Initial data on the x0 = 0 slice.
struct FormSlice {
  int degree = 1;
  int n_x = 0;
  std::array<Eigen::VectorXd, 3> components;

  static FormSlice zero(int n_x, int degree);
  static FormSlice of(const FormField& field, int k);
  double max_norm() const;
};

FormSlice linear_combination(double a, const FormSlice& p, double b, const FormSlice& q);

struct TransportProblem {
  ScalarField X0;
  ScalarField f;
  FormField theta;
  FormSlice omega0;

  /// Throws NotTransverse if X0 <= eps and InvariantViolation on mismatched
  /// grids or degrees.
  void validate(double eps = 1e-12) const;
};

struct TransportOptions {
  unsigned threads = 1;
};

/// Solves the component ODEs along x0 at every spatial point with an
/// exponential trapezoidal rule (exact for constant coefficients, second
/// order in general).
FormField transport_form(const TransportProblem& problem, const TransportOptions& options = {});

/// max |L_X omega + f omega - theta| over points with 0 < x0 < 1, where L_X is
/// the centered difference of pullbacks along X = X0 d/dx0 with step
/// s = sqrt(eps) / max|X0|. omega is interpolated in x0 by cubic splines.
double lie_residual(const FormField& omega, const ScalarField& X0, const ScalarField& f, const FormField& theta);

struct VectorField {
  std::array<ScalarField, 3> components;  // dx^0(X), dx^1(X), dx^2(X)
  const ChartGrid& grid() const { return components[0].grid; }
};

/// Samples of the straightening map Phi (Phi(phi_t(P)) = (t, P) for the flow
/// phi of X / X^0) and of its inverse, together with the straightened
/// coefficient X0 o Phi^{-1}. Spatial positions are wrapped into [0, 2 pi).
struct FlowStraightening {
  ChartGrid grid;
  /// Phi at each grid point: the x0 = 0 footpoint of the trajectory.
  std::array<ScalarField, 2> phi;
  /// Phi^{-1} at each grid point (t_k, P): position at time t_k of the
  /// trajectory started at (0, P).
  std::array<ScalarField, 2> phi_inverse;
  /// dx^0(X) o Phi^{-1}; Phi_* X = straightened_X0 d/dx0.
  ScalarField straightened_X0;
};

struct StraightenOptions {
  double rel_tol = 1e-12;
  double eps = 1e-12;
  unsigned threads = 1;
};

/// Throws NotTransverse if dx^0(X) <= eps anywhere on the grid.
FlowStraightening straighten_flow(const VectorField& X, const StraightenOptions& options = {});

/// Signed periodic difference a - b reduced to (-pi, pi].
double periodic_difference(double a, double b);

}  // namespace shockshell
