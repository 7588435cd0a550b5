#include <doctest.h>

#include <cmath>

#include "shockshell/errors.hpp"
#include "shockshell/transport_suite.hpp"

using namespace shockshell;

namespace {

const ChartGrid kSmall{33, 16};

}  // namespace

TEST_CASE("grid and field plumbing") {
  CHECK_THROWS_AS((ChartGrid{8, 32}.validate()), InvariantViolation);
  CHECK_NOTHROW(kSmall.validate());
  const ScalarField s = ScalarField::sample(kSmall, [](double t, double x1, double x2) { return t * t * t + std::sin(x1) - x2; });
  CHECK(interpolate(s, kSmall.t(5), kSmall.x(3), kSmall.x(7)) == doctest::Approx(s(5, 3, 7)).epsilon(1e-13));
  // Cubic in t is reproduced between nodes.
  const ScalarField cubic = ScalarField::sample(kSmall, [](double t, double, double) { return 2 * t * t * t - t; });
  CHECK(interpolate(cubic, 0.4321, 1.0, 2.0) == doctest::Approx(2 * std::pow(0.4321, 3) - 0.4321).epsilon(1e-12));

  FormField w = FormField::zero(kSmall, 2);
  w.components[0][3] = 1.5;
  w.components[2][3] = -0.5;
  CHECK(w.value(0, 1, 3) == 1.5);
  CHECK(w.value(1, 0, 3) == -1.5);
  CHECK(w.value(2, 1, 3) == 0.5);
  CHECK(w.value(2, 2, 3) == 0.0);
  CHECK(component_indices(2, 2) == IndexTuple{1, 2});
  CHECK_THROWS_AS(FormField::zero(kSmall, 3), InvariantViolation);
}

TEST_CASE("derivative stencils") {
  const ChartGrid g{65, 32};
  const ScalarField s = ScalarField::sample(g, [](double t, double x1, double x2) { return t * t * std::sin(x1) * std::cos(2 * x2); });
  const ScalarField d0 = time_derivative(s), d1 = spatial_derivative(s, 1);
  double e0 = 0, e1 = 0;
  for (int k = 0; k < g.n_t; ++k)
    for (int i = 0; i < g.n_x; ++i)
      for (int j = 0; j < g.n_x; ++j) {
        const double t = g.t(k), x1 = g.x(i), x2 = g.x(j);
        e0 = std::max(e0, std::abs(d0(k, i, j) - 2 * t * std::sin(x1) * std::cos(2 * x2)));
        e1 = std::max(e1, std::abs(d1(k, i, j) - t * t * std::cos(x1) * std::cos(2 * x2)));
      }
  CHECK(e0 < 1e-12);  // exact for quadratics
  CHECK(e1 < 1e-4);
}

TEST_CASE("trivial transport keeps the data") {
  const ManufacturedCase mc = manufactured_case(kSmall, 1);
  TransportProblem p{ScalarField(kSmall, 1.0), ScalarField(kSmall, 0.0), FormField::zero(kSmall, 1), FormSlice::of(mc.exact, 0)};
  const FormField w = transport_form(p);
  const Eigen::Index m = kSmall.slice_size();
  for (int k = 0; k < kSmall.n_t; ++k)
    for (std::size_t c = 0; c < 3; ++c) CHECK((w.components[c].segment(k * m, m) - p.omega0.components[c]).cwiseAbs().maxCoeff() == 0.0);
  CHECK(lie_residual(FormField::zero(kSmall, 2), mc.X0, mc.f, FormField::zero(kSmall, 2)) == 0.0);
}

TEST_CASE("constant decay is exact") {
  for (int degree : {1, 2}) {
    const DecayCheck d = exponential_decay_check(ChartGrid{}, degree, 0.7);
    CHECK(d.solution_error < 1e-8);
    CHECK(d.residual < 1e-6);
  }
}

TEST_CASE("manufactured solutions converge at second order") {
  for (int degree : {1, 2}) {
    const ConvergenceStudy s = convergence_study(degree);
    CHECK(s.order_time_family == doctest::Approx(2.0).epsilon(0.15));
    CHECK(s.order_space_family == doctest::Approx(2.0).epsilon(0.15));
    CHECK(s.order_residual == doctest::Approx(2.0).epsilon(0.15));
    for (std::size_t i = 1; i < s.levels.size(); ++i) CHECK(s.levels[i].residual < s.levels[i - 1].residual);
  }
}

TEST_CASE("flow straightening") {
  CHECK(shear_straightening_error(kSmall, 0.0) < 1e-14);
  CHECK(shear_straightening_error(kSmall, 0.37) < 1e-8);
  CHECK(shear_straightening_error(kSmall, -1.3) < 1e-8);
  const double coarse = pushforward_defect(ChartGrid{33, 16});
  const double fine = pushforward_defect(ChartGrid{65, 32});
  CHECK(std::log2(coarse / fine) == doctest::Approx(2.0).epsilon(0.25));

  VectorField bad{{ScalarField::sample(kSmall, [](double, double x1, double) { return std::sin(x1); }),
                   ScalarField(kSmall, 0.0), ScalarField(kSmall, 0.0)}};
  CHECK_THROWS_AS(straighten_flow(bad), NotTransverse);
}

TEST_CASE("transversality is enforced") {
  ManufacturedCase mc = manufactured_case(kSmall, 1);
  mc.X0(3, 2, 1) = 0.0;
  CHECK_THROWS_AS(transport_form(mc.problem()), NotTransverse);
}

TEST_CASE("linearity, determinism and the stability ratio") {
  CHECK(linearity_defect(kSmall, 1, 3) < 1e-10);
  CHECK(linearity_defect(kSmall, 2, 4) < 1e-10);

  const ManufacturedCase mc = manufactured_case(kSmall, 2);
  const FormField a = transport_form(mc.problem());
  const FormField b = transport_form(mc.problem());
  const FormField c = transport_form(mc.problem(), {4});
  for (std::size_t i = 0; i < 3; ++i) {
    CHECK((a.components[i].array() == b.components[i].array()).all());
    CHECK((a.components[i].array() == c.components[i].array()).all());
  }

  const double r1 = stability_ratio(kSmall, 2, 20, 5);
  CHECK(std::isfinite(r1));
  CHECK(r1 > 0);
  // The ratio is a property of (X0, f) only: another batch of data stays
  // within a factor of a few.
  const double r2 = stability_ratio(kSmall, 2, 20, 6);
  CHECK(r2 < 4 * r1);
  CHECK(r1 < 4 * r2);
}
