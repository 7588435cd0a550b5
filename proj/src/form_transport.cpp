#include "shockshell/form_transport.hpp"

#include <Eigen/Dense>
#include <cmath>
#include <limits>

#include "shockshell/errors.hpp"
#include "shockshell/ode.hpp"
#include "shockshell/parallel.hpp"
#include "shockshell/spline.hpp"

namespace shockshell {

namespace {

int wrap(int i, int n) { return ((i % n) + n) % n; }

double wrap_position(double x) {
  double r = std::fmod(x, ChartGrid::period);
  if (r < 0) r += ChartGrid::period;
  return r >= ChartGrid::period ? 0.0 : r;
}

// Cubic Lagrange weights for nodes at offsets 0, 1, 2, 3 evaluated at u.
std::array<double, 4> lagrange4(double u) {
  return {-(u - 1) * (u - 2) * (u - 3) / 6.0, u * (u - 2) * (u - 3) / 2.0, -u * (u - 1) * (u - 3) / 2.0,
          u * (u - 1) * (u - 2) / 6.0};
}

void require_same_grid(const ChartGrid& a, const ChartGrid& b, const char* what) {
  if (!(a == b)) throw InvariantViolation(std::string("grid mismatch: ") + what);
}

// Exponential trapezoidal step for y' + a y = b along x0.
void integrate_linear(const Eigen::Ref<const Eigen::VectorXd>& a, const Eigen::Ref<const Eigen::VectorXd>& b, double y0,
                      double h, Eigen::Ref<Eigen::VectorXd> y) {
  y[0] = y0;
  for (Eigen::Index k = 0; k + 1 < a.size(); ++k) {
    const double decay = std::exp(-0.5 * h * (a[k] + a[k + 1]));
    y[k + 1] = decay * y[k] + 0.5 * h * (decay * b[k] + b[k + 1]);
  }
}

}  // namespace

void ChartGrid::validate() const {
  if (n_t < 16 || n_x < 16) throw InvariantViolation("chart grid needs n_t, n_x >= 16");
}

ScalarField::ScalarField(const ChartGrid& g, double fill) : grid(g), values(Eigen::VectorXd::Constant(g.size(), fill)) {}

ScalarField ScalarField::sample(const ChartGrid& g, const std::function<double(double, double, double)>& fn) {
  ScalarField out(g);
  for (int k = 0; k < g.n_t; ++k)
    for (int i = 0; i < g.n_x; ++i)
      for (int j = 0; j < g.n_x; ++j) out(k, i, j) = fn(g.t(k), g.x(i), g.x(j));
  return out;
}

ScalarField time_derivative(const ScalarField& field) {
  const ChartGrid& g = field.grid;
  const double h = g.dt();
  ScalarField out(g);
  const int last = g.n_t - 1;
  for (int i = 0; i < g.n_x; ++i) {
    for (int j = 0; j < g.n_x; ++j) {
      out(0, i, j) = (-3.0 * field(0, i, j) + 4.0 * field(1, i, j) - field(2, i, j)) / (2.0 * h);
      for (int k = 1; k < last; ++k) out(k, i, j) = (field(k + 1, i, j) - field(k - 1, i, j)) / (2.0 * h);
      out(last, i, j) = (3.0 * field(last, i, j) - 4.0 * field(last - 1, i, j) + field(last - 2, i, j)) / (2.0 * h);
    }
  }
  return out;
}

ScalarField spatial_derivative(const ScalarField& field, int direction) {
  if (direction != 1 && direction != 2) throw InvariantViolation("spatial direction must be 1 or 2");
  const ChartGrid& g = field.grid;
  const int n = g.n_x;
  const double h = g.dx();
  ScalarField out(g);
  for (int k = 0; k < g.n_t; ++k) {
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < n; ++j) {
        auto at = [&](int d) {
          return direction == 1 ? field(k, wrap(i + d, n), j) : field(k, i, wrap(j + d, n));
        };
        out(k, i, j) = (at(-2) - 8.0 * at(-1) + 8.0 * at(1) - at(2)) / (12.0 * h);
      }
    }
  }
  return out;
}

double interpolate(const ScalarField& field, double t, double x1, double x2) {
  const ChartGrid& g = field.grid;
  const double ut = t / g.dt();
  const int kt = std::clamp(static_cast<int>(std::floor(ut)) - 1, 0, g.n_t - 4);
  const double u1 = wrap_position(x1) / g.dx();
  const double u2 = wrap_position(x2) / g.dx();
  const int k1 = static_cast<int>(std::floor(u1)) - 1;
  const int k2 = static_cast<int>(std::floor(u2)) - 1;
  const auto wt = lagrange4(ut - kt);
  const auto w1 = lagrange4(u1 - k1);
  const auto w2 = lagrange4(u2 - k2);
  double sum = 0.0;
  for (int a = 0; a < 4; ++a) {
    for (int b = 0; b < 4; ++b) {
      const int i = wrap(k1 + b, g.n_x);
      double row = 0.0;
      for (int c = 0; c < 4; ++c) row += w2[c] * field(kt + a, i, wrap(k2 + c, g.n_x));
      sum += wt[a] * w1[b] * row;
    }
  }
  return sum;
}

IndexTuple component_indices(int degree, int c) {
  if (degree == 1) return {c, -1};
  static constexpr std::array<IndexTuple, 3> pairs{{{0, 1}, {0, 2}, {1, 2}}};
  return pairs[static_cast<std::size_t>(c)];
}

FormField FormField::zero(const ChartGrid& g, int degree) {
  if (degree != 1 && degree != 2) throw InvariantViolation("only forms of degree 1 and 2 are supported");
  FormField out;
  out.degree = degree;
  out.grid = g;
  for (auto& c : out.components) c = Eigen::VectorXd::Zero(g.size());
  return out;
}

double FormField::value(int a, int b, Eigen::Index point) const {
  if (a == b) return 0.0;
  const int sign = a < b ? 1 : -1;
  const int lo = std::min(a, b);
  const int hi = std::max(a, b);
  const int c = lo == 0 ? hi - 1 : 2;
  return sign * components[static_cast<std::size_t>(c)][point];
}

double FormField::max_norm() const {
  double m = 0.0;
  for (const auto& c : components) m = std::max(m, c.cwiseAbs().maxCoeff());
  return m;
}

FormField linear_combination(double a, const FormField& p, double b, const FormField& q) {
  if (p.degree != q.degree) throw InvariantViolation("degree mismatch in linear combination");
  require_same_grid(p.grid, q.grid, "linear combination");
  FormField out = p;
  for (std::size_t c = 0; c < 3; ++c) out.components[c] = a * p.components[c] + b * q.components[c];
  return out;
}

FormSlice FormSlice::zero(int n_x, int degree) {
  FormSlice out;
  out.degree = degree;
  out.n_x = n_x;
  for (auto& c : out.components) c = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(n_x) * n_x);
  return out;
}

FormSlice FormSlice::of(const FormField& field, int k) {
  FormSlice out = zero(field.grid.n_x, field.degree);
  const Eigen::Index m = field.grid.slice_size();
  for (std::size_t c = 0; c < 3; ++c) out.components[c] = field.components[c].segment(k * m, m);
  return out;
}

double FormSlice::max_norm() const {
  double m = 0.0;
  for (const auto& c : components) m = std::max(m, c.cwiseAbs().maxCoeff());
  return m;
}

FormSlice linear_combination(double a, const FormSlice& p, double b, const FormSlice& q) {
  if (p.degree != q.degree || p.n_x != q.n_x) throw InvariantViolation("slice mismatch in linear combination");
  FormSlice out = p;
  for (std::size_t c = 0; c < 3; ++c) out.components[c] = a * p.components[c] + b * q.components[c];
  return out;
}

void TransportProblem::validate(double eps) const {
  const ChartGrid& g = X0.grid;
  g.validate();
  require_same_grid(g, f.grid, "f");
  require_same_grid(g, theta.grid, "theta");
  if (theta.degree != omega0.degree) throw InvariantViolation("theta and omega0 differ in degree");
  if (omega0.n_x != g.n_x) throw InvariantViolation("omega0 slice does not match the grid");
  if (X0.values.size() != g.size() || f.values.size() != g.size()) throw InvariantViolation("field size mismatch");
  const double lo = X0.values.minCoeff();
  if (!(lo > eps)) throw NotTransverse("X0 is not bounded away from zero (min " + std::to_string(lo) + ")");
}

FormField transport_form(const TransportProblem& problem, const TransportOptions& options) {
  problem.validate();
  const ChartGrid& g = problem.X0.grid;
  const int degree = problem.theta.degree;
  const ScalarField d0X = time_derivative(problem.X0);
  const ScalarField d1X = spatial_derivative(problem.X0, 1);
  const ScalarField d2X = spatial_derivative(problem.X0, 2);
  const double h = g.dt();
  const Eigen::Index m = g.slice_size();
  FormField omega = FormField::zero(g, degree);

  parallel_for(static_cast<std::size_t>(m), options.threads, [&](std::size_t point) {
    const auto q = static_cast<Eigen::Index>(point);
    const Eigen::Index n = g.n_t;
    Eigen::VectorXd x0(n), a_time(n), a_space(n), b(n), y(n);
    for (Eigen::Index k = 0; k < n; ++k) {
      const Eigen::Index idx = k * m + q;
      x0[k] = problem.X0.values[idx];
      a_time[k] = (d0X.values[idx] + problem.f.values[idx]) / x0[k];
      a_space[k] = problem.f.values[idx] / x0[k];
    }
    auto store = [&](std::size_t c) {
      for (Eigen::Index k = 0; k < n; ++k) omega.components[c][k * m + q] = y[k];
    };
    auto theta = [&](std::size_t c, Eigen::Index k) { return problem.theta.components[c][k * m + q]; };
    auto solved = [&](std::size_t c, Eigen::Index k) { return omega.components[c][k * m + q]; };

    // Components with a 0 index first; they feed the spatial ones.
    for (std::size_t c = 0; c < 3; ++c) {
      if (!has_time_index(degree, static_cast<int>(c))) continue;
      for (Eigen::Index k = 0; k < n; ++k) b[k] = theta(c, k) / x0[k];
      integrate_linear(a_time, b, problem.omega0.components[c][q], h, y);
      store(c);
    }
    for (std::size_t c = 0; c < 3; ++c) {
      if (has_time_index(degree, static_cast<int>(c))) continue;
      for (Eigen::Index k = 0; k < n; ++k) {
        const Eigen::Index idx = k * m + q;
        double coupling;
        if (degree == 1) {
          const double grad = c == 1 ? d1X.values[idx] : d2X.values[idx];
          coupling = grad * solved(0, k);
        } else {
          coupling = d1X.values[idx] * solved(1, k) - d2X.values[idx] * solved(0, k);
        }
        b[k] = (theta(c, k) - coupling) / x0[k];
      }
      integrate_linear(a_space, b, problem.omega0.components[c][q], h, y);
      store(c);
    }
  });
  return omega;
}

double lie_residual(const FormField& omega, const ScalarField& X0, const ScalarField& f, const FormField& theta) {
  const ChartGrid& g = omega.grid;
  require_same_grid(g, X0.grid, "X0");
  require_same_grid(g, f.grid, "f");
  require_same_grid(g, theta.grid, "theta");
  if (omega.degree != theta.degree) throw InvariantViolation("omega and theta differ in degree");
  const int degree = omega.degree;
  const double s = std::sqrt(std::numeric_limits<double>::epsilon()) / X0.values.cwiseAbs().maxCoeff();
  const ScalarField grad[3] = {time_derivative(X0), spatial_derivative(X0, 1), spatial_derivative(X0, 2)};
  const Eigen::Index m = g.slice_size();
  const Eigen::VectorXd ts = Eigen::VectorXd::LinSpaced(g.n_t, 0.0, 1.0);

  double residual = 0.0;
  for (Eigen::Index q = 0; q < m; ++q) {
    std::array<CubicSpline, 3> along;
    for (std::size_t c = 0; c < 3; ++c) {
      Eigen::VectorXd col(g.n_t);
      for (int k = 0; k < g.n_t; ++k) col[k] = omega.components[c][k * m + q];
      along[c] = CubicSpline(ts, col);
    }
    for (int k = 1; k + 1 < g.n_t; ++k) {
      const Eigen::Index idx = k * m + q;
      const double t = g.t(k);
      const double x0 = X0.values[idx];
      const Eigen::Vector3d dX(grad[0].values[idx], grad[1].values[idx], grad[2].values[idx]);

      // Pullback of omega by p -> p + sigma X(p); its Jacobian is I + sigma e0 dX^T.
      auto pullback = [&](double sigma) {
        Eigen::Matrix3d J = Eigen::Matrix3d::Identity();
        J.row(0) += sigma * dX.transpose();
        const double tp = t + sigma * x0;
        Eigen::Vector3d out;
        if (degree == 1) {
          const Eigen::Vector3d w(along[0](tp), along[1](tp), along[2](tp));
          out = J.transpose() * w;
        } else {
          Eigen::Matrix3d W = Eigen::Matrix3d::Zero();
          W(0, 1) = along[0](tp);
          W(0, 2) = along[1](tp);
          W(1, 2) = along[2](tp);
          W -= W.transpose().eval();
          const Eigen::Matrix3d P = J.transpose() * W * J;
          out = Eigen::Vector3d(P(0, 1), P(0, 2), P(1, 2));
        }
        return out;
      };
      const Eigen::Vector3d lie = (pullback(s) - pullback(-s)) / (2.0 * s);
      for (std::size_t c = 0; c < 3; ++c) {
        const double r = lie[static_cast<Eigen::Index>(c)] + f.values[idx] * omega.components[c][idx] -
                         theta.components[c][idx];
        residual = std::max(residual, std::abs(r));
      }
    }
  }
  return residual;
}

double periodic_difference(double a, double b) { return std::remainder(a - b, ChartGrid::period); }

FlowStraightening straighten_flow(const VectorField& X, const StraightenOptions& options) {
  const ChartGrid& g = X.grid();
  g.validate();
  for (const auto& c : X.components) require_same_grid(g, c.grid, "vector field");
  const double lo = X.components[0].values.minCoeff();
  if (!(lo > options.eps)) throw NotTransverse("dx0(X) is not positive (min " + std::to_string(lo) + ")");

  using Vec2 = Eigen::Vector2d;
  // Trajectories of X / X^0, parametrized by x0.
  auto rhs = [&](double t, const Vec2& P) {
    const double x0 = interpolate(X.components[0], t, P[0], P[1]);
    return Vec2(interpolate(X.components[1], t, P[0], P[1]) / x0, interpolate(X.components[2], t, P[0], P[1]) / x0);
  };
  ode::Options<double> opt;
  opt.rel_tol = options.rel_tol;
  opt.abs_tol = options.rel_tol;

  FlowStraightening out;
  out.grid = g;
  for (auto& c : out.phi) c = ScalarField(g);
  for (auto& c : out.phi_inverse) c = ScalarField(g);
  out.straightened_X0 = ScalarField(g);
  const Eigen::VectorXd ts = Eigen::VectorXd::LinSpaced(g.n_t, 0.0, 1.0);
  const Eigen::Index m = g.slice_size();

  // Forward from (0, P): samples of Phi^{-1} and the straightened coefficient.
  parallel_for(static_cast<std::size_t>(m), options.threads, [&](std::size_t point) {
    const int i = static_cast<int>(point) / g.n_x;
    const int j = static_cast<int>(point) % g.n_x;
    auto sink = [&](std::size_t k, double t, const Vec2& P) {
      const int kk = static_cast<int>(k);
      out.phi_inverse[0](kk, i, j) = wrap_position(P[0]);
      out.phi_inverse[1](kk, i, j) = wrap_position(P[1]);
      out.straightened_X0(kk, i, j) = interpolate(X.components[0], t, P[0], P[1]);
      return true;
    };
    ode::DenseSampler<double, 2, decltype(sink)> sampler(ts, 1.0, sink);
    const auto r = ode::integrate(rhs, 0.0, Vec2(g.x(i), g.x(j)), 1.0, opt,
                                  [&](const ode::DenseStep<double, 2>& step) { return sampler(step); });
    if (r.status != ode::Status::Completed) throw StepFailure("flow straightening: forward trajectory failed");
    // The first sample sits on the initial point.
    out.phi_inverse[0](0, i, j) = g.x(i);
    out.phi_inverse[1](0, i, j) = g.x(j);
    out.straightened_X0(0, i, j) = X.components[0](0, i, j);
  });

  // Backward from every grid point to x0 = 0: samples of Phi.
  parallel_for(static_cast<std::size_t>(g.size()), options.threads, [&](std::size_t point) {
    const int k = static_cast<int>(static_cast<Eigen::Index>(point) / m);
    const int i = static_cast<int>((static_cast<Eigen::Index>(point) % m) / g.n_x);
    const int j = static_cast<int>(static_cast<Eigen::Index>(point) % g.n_x);
    Vec2 P(g.x(i), g.x(j));
    if (k > 0) {
      const auto r = ode::integrate(rhs, g.t(k), P, 0.0, opt);
      if (r.status != ode::Status::Completed) throw StepFailure("flow straightening: backward trajectory failed");
      P = r.y;
    }
    out.phi[0](k, i, j) = wrap_position(P[0]);
    out.phi[1](k, i, j) = wrap_position(P[1]);
  });
  return out;
}

}  // namespace shockshell
