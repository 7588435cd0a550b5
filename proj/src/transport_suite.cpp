#include "shockshell/transport_suite.hpp"

#include <cmath>
#include <random>

#include "shockshell/errors.hpp"

namespace shockshell {

namespace {

// Exact data: X0, f and three smooth component functions with derivatives.
double X0_exact(double t, double x1, double x2) { return 1.5 + 0.3 * std::sin(x1) * std::cos(x2) + 0.2 * t * t; }
double X0_t(double t, double, double) { return 0.4 * t; }
double X0_1(double, double x1, double x2) { return 0.3 * std::cos(x1) * std::cos(x2); }
double X0_2(double, double x1, double x2) { return -0.3 * std::sin(x1) * std::sin(x2); }
double f_exact(double t, double x1, double) { return 0.5 + 0.25 * std::cos(x1 + t); }

double g0(double t, double x1, double) { return std::cos(t) * std::sin(x1) + 0.5; }
double g0_t(double t, double x1, double) { return -std::sin(t) * std::sin(x1); }
double g1(double t, double, double x2) { return std::exp(-t) * std::cos(x2); }
double g1_t(double t, double, double x2) { return -std::exp(-t) * std::cos(x2); }
double g2(double t, double x1, double x2) { return std::sin(x1 + x2 + t); }
double g2_t(double t, double x1, double x2) { return std::cos(x1 + x2 + t); }

// Random trigonometric field with modes |m| <= 2 in space and a quadratic in x0.
ScalarField random_field(const ChartGrid& grid, std::mt19937_64& rng) {
  std::normal_distribution<double> normal;
  double c[3][3][3];
  double phase[3][3][3];
  for (auto& a : c)
    for (auto& b : a)
      for (auto& v : b) v = normal(rng);
  for (auto& a : phase)
    for (auto& b : a)
      for (auto& v : b) v = normal(rng);
  return ScalarField::sample(grid, [&](double t, double x1, double x2) {
    double s = 0.0;
    for (int p = 0; p < 3; ++p)
      for (int m1 = 0; m1 < 3; ++m1)
        for (int m2 = 0; m2 < 3; ++m2) s += c[p][m1][m2] * std::pow(t, p) * std::cos(m1 * x1 + m2 * x2 + phase[p][m1][m2]);
    return s;
  });
}

FormField random_form(const ChartGrid& grid, int degree, std::mt19937_64& rng) {
  FormField out = FormField::zero(grid, degree);
  for (auto& c : out.components) c = random_field(grid, rng).values;
  return out;
}

double order(double coarse, double fine) { return std::log2(coarse / fine); }

}  // namespace

TransportProblem ManufacturedCase::problem() const { return {X0, f, theta, FormSlice::of(exact, 0)}; }

ManufacturedCase manufactured_case(const ChartGrid& grid, int degree) {
  using Fn = double (*)(double, double, double);
  const Fn g[3] = {g0, g1, g2};
  const Fn g_t[3] = {g0_t, g1_t, g2_t};

  ManufacturedCase mc;
  mc.X0 = ScalarField::sample(grid, X0_exact);
  mc.f = ScalarField::sample(grid, f_exact);
  mc.exact = FormField::zero(grid, degree);
  mc.theta = FormField::zero(grid, degree);
  for (int k = 0; k < grid.n_t; ++k) {
    for (int i = 0; i < grid.n_x; ++i) {
      for (int j = 0; j < grid.n_x; ++j) {
        const double t = grid.t(k), x1 = grid.x(i), x2 = grid.x(j);
        const Eigen::Index idx = grid.index(k, i, j);
        const double X = X0_exact(t, x1, x2);
        const double f = f_exact(t, x1, x2);
        double w[3], wt[3];
        for (int c = 0; c < 3; ++c) {
          w[c] = g[c](t, x1, x2);
          wt[c] = g_t[c](t, x1, x2);
          mc.exact.components[static_cast<std::size_t>(c)][idx] = w[c];
        }
        double th[3];
        if (degree == 1) {
          th[0] = X * wt[0] + w[0] * X0_t(t, x1, x2) + f * w[0];
          th[1] = X * wt[1] + w[0] * X0_1(t, x1, x2) + f * w[1];
          th[2] = X * wt[2] + w[0] * X0_2(t, x1, x2) + f * w[2];
        } else {
          th[0] = X * wt[0] + w[0] * X0_t(t, x1, x2) + f * w[0];
          th[1] = X * wt[1] + w[1] * X0_t(t, x1, x2) + f * w[1];
          th[2] = X * wt[2] + X0_1(t, x1, x2) * w[1] - X0_2(t, x1, x2) * w[0] + f * w[2];
        }
        for (int c = 0; c < 3; ++c) mc.theta.components[static_cast<std::size_t>(c)][idx] = th[c];
      }
    }
  }
  return mc;
}

FamilyErrors family_errors(const FormField& computed, const FormField& exact) {
  FamilyErrors e;
  for (int c = 0; c < 3; ++c) {
    const double err =
        (computed.components[static_cast<std::size_t>(c)] - exact.components[static_cast<std::size_t>(c)])
            .cwiseAbs()
            .maxCoeff();
    double& slot = has_time_index(computed.degree, c) ? e.time_family : e.space_family;
    slot = std::max(slot, err);
  }
  return e;
}

ConvergenceStudy convergence_study(int degree, const std::vector<int>& levels, unsigned threads) {
  if (levels.size() < 2) throw InvariantViolation("convergence study needs at least two levels");
  ConvergenceStudy study;
  study.degree = degree;
  for (int n : levels) {
    const ChartGrid grid{n, n};
    const ManufacturedCase mc = manufactured_case(grid, degree);
    const FormField omega = transport_form(mc.problem(), {threads});
    study.levels.push_back({n, family_errors(omega, mc.exact), lie_residual(omega, mc.X0, mc.f, mc.theta)});
  }
  const auto& a = study.levels[study.levels.size() - 2];
  const auto& b = study.levels.back();
  // Spacing halves when n doubles (x0 spacing 1/(n-1) only approximately).
  const double ratio = std::log2(static_cast<double>(b.n - 1) / (a.n - 1));
  study.order_time_family = order(a.errors.time_family, b.errors.time_family) / ratio;
  study.order_space_family = order(a.errors.space_family, b.errors.space_family) / ratio;
  study.order_residual = order(a.residual, b.residual) / ratio;
  return study;
}

DecayCheck exponential_decay_check(const ChartGrid& grid, int degree, double a) {
  std::mt19937_64 rng(11);
  const FormField sample = random_form(grid, degree, rng);
  TransportProblem problem{ScalarField(grid, 1.0), ScalarField(grid, a), FormField::zero(grid, degree),
                           FormSlice::of(sample, 0)};
  const FormField omega = transport_form(problem);
  DecayCheck out;
  const Eigen::Index m = grid.slice_size();
  for (int k = 0; k < grid.n_t; ++k) {
    const double factor = std::exp(-a * grid.t(k));
    for (std::size_t c = 0; c < 3; ++c) {
      const Eigen::VectorXd expected = factor * problem.omega0.components[c];
      out.solution_error =
          std::max(out.solution_error, (omega.components[c].segment(k * m, m) - expected).cwiseAbs().maxCoeff());
    }
  }
  out.residual = lie_residual(omega, problem.X0, problem.f, problem.theta);
  return out;
}

double shear_straightening_error(const ChartGrid& grid, double c) {
  VectorField X{{ScalarField(grid, 1.0), ScalarField(grid, c), ScalarField(grid, 0.0)}};
  const FlowStraightening s = straighten_flow(X);
  double err = 0.0;
  for (int k = 0; k < grid.n_t; ++k) {
    for (int i = 0; i < grid.n_x; ++i) {
      for (int j = 0; j < grid.n_x; ++j) {
        const double t = grid.t(k);
        err = std::max(err, std::abs(periodic_difference(s.phi[0](k, i, j), grid.x(i) - c * t)));
        err = std::max(err, std::abs(periodic_difference(s.phi[1](k, i, j), grid.x(j))));
        err = std::max(err, std::abs(periodic_difference(s.phi_inverse[0](k, i, j), grid.x(i) + c * t)));
        err = std::max(err, std::abs(periodic_difference(s.phi_inverse[1](k, i, j), grid.x(j))));
        err = std::max(err, std::abs(s.straightened_X0(k, i, j) - 1.0));
      }
    }
  }
  return err;
}

double pushforward_defect(const ChartGrid& grid) {
  VectorField X{{ScalarField::sample(grid, [](double t, double, double x2) { return 1.2 + 0.2 * std::sin(x2) + 0.1 * t; }),
                 ScalarField::sample(grid, [](double, double x1, double x2) { return 0.3 * std::cos(x2) + 0.1 * std::sin(x1); }),
                 ScalarField::sample(grid, [](double t, double x1, double) { return 0.2 * std::sin(x1) * (1.0 + t); })}};
  const FlowStraightening s = straighten_flow(X);
  // Spatial part of D Phi X must vanish; the x0 part of Phi is the identity.
  const double ht = grid.dt();
  const double hx = grid.dx();
  const int n = grid.n_x;
  double defect = 0.0;
  for (int k = 1; k + 1 < grid.n_t; ++k) {
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < n; ++j) {
        const int ip = (i + 1) % n, im = (i + n - 1) % n, jp = (j + 1) % n, jm = (j + n - 1) % n;
        for (int comp = 0; comp < 2; ++comp) {
          const ScalarField& P = s.phi[static_cast<std::size_t>(comp)];
          const double dt = periodic_difference(P(k + 1, i, j), P(k - 1, i, j)) / (2.0 * ht);
          const double d1 = periodic_difference(P(k, ip, j), P(k, im, j)) / (2.0 * hx);
          const double d2 = periodic_difference(P(k, i, jp), P(k, i, jm)) / (2.0 * hx);
          const double push = X.components[0](k, i, j) * dt + X.components[1](k, i, j) * d1 + X.components[2](k, i, j) * d2;
          defect = std::max(defect, std::abs(push));
        }
      }
    }
  }
  return defect;
}

double linearity_defect(const ChartGrid& grid, int degree, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  const ManufacturedCase mc = manufactured_case(grid, degree);
  const FormField theta1 = random_form(grid, degree, rng);
  const FormField theta2 = random_form(grid, degree, rng);
  const FormSlice init1 = FormSlice::of(random_form(grid, degree, rng), 0);
  const FormSlice init2 = FormSlice::of(random_form(grid, degree, rng), 0);
  const double a = 0.7, b = -1.3;
  const FormField w1 = transport_form({mc.X0, mc.f, theta1, init1});
  const FormField w2 = transport_form({mc.X0, mc.f, theta2, init2});
  const FormField w12 = transport_form(
      {mc.X0, mc.f, linear_combination(a, theta1, b, theta2), linear_combination(a, init1, b, init2)});
  return linear_combination(1.0, w12, -1.0, linear_combination(a, w1, b, w2)).max_norm();
}

double stability_ratio(const ChartGrid& grid, int degree, int datasets, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  const ManufacturedCase mc = manufactured_case(grid, degree);
  double ratio = 0.0;
  for (int d = 0; d < datasets; ++d) {
    const FormField theta = random_form(grid, degree, rng);
    const FormSlice init = FormSlice::of(random_form(grid, degree, rng), 0);
    const FormField omega = transport_form({mc.X0, mc.f, theta, init});
    ratio = std::max(ratio, omega.max_norm() / (theta.max_norm() + init.max_norm()));
  }
  return ratio;
}

TransportSuiteReport run_transport_suite(std::uint64_t seed, unsigned threads) {
  TransportSuiteReport r;
  r.degree1 = convergence_study(1, {16, 32, 64}, threads);
  r.degree2 = convergence_study(2, {16, 32, 64}, threads);
  const ChartGrid grid{};
  r.decay = exponential_decay_check(grid, 2, 0.7);
  r.shear_error = shear_straightening_error(ChartGrid{33, 16}, 0.37);
  r.pushforward_defect = pushforward_defect(ChartGrid{33, 32});
  r.linearity_defect = std::max(linearity_defect(ChartGrid{33, 16}, 1, seed), linearity_defect(ChartGrid{33, 16}, 2, seed));
  const ManufacturedCase mc = manufactured_case(ChartGrid{33, 16}, 2);
  const FormField a = transport_form(mc.problem(), {threads});
  const FormField b = transport_form(mc.problem(), {1});
  r.deterministic = true;
  for (std::size_t c = 0; c < 3; ++c) r.deterministic = r.deterministic && (a.components[c].array() == b.components[c].array()).all();
  r.stability_ratio = stability_ratio(ChartGrid{33, 16}, 2, 20, seed);
  return r;
}

}  // namespace shockshell
