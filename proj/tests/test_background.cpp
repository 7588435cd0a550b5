#include <doctest.h>

#include <cmath>

#include "shockshell/background.hpp"

using namespace shockshell;

namespace {

// Reconstructs the state at radius r from the first integrals alone. With
// rho = m / (u r^2) and c^2 = g A rho^(g-1), the Bernoulli function
// G(u) = u^2/2 + c^2/(g-1) - E has its minimum at the sonic speed; the
// supersonic root lies above it and the subsonic root below.
GasState state_from_integrals(const FirstIntegrals& I, double g, double r, bool supersonic) {
  auto rho_of = [&](double u) { return I.mass_flux / (u * r * r); };
  auto c2_of = [&](double u) { return g * I.entropy * std::pow(rho_of(u), g - 1); };
  auto bisect = [](double lo, double hi, auto f) {
    const bool lo_negative = f(lo) < 0;
    for (int i = 0; i < 300; ++i) {
      const double mid = 0.5 * (lo + hi);
      ((f(mid) < 0) == lo_negative ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
  };
  const double u_max = std::sqrt(2 * I.energy);
  const double u_sonic = bisect(1e-12 * u_max, u_max, [&](double u) { return u * u - c2_of(u); });
  auto G = [&](double u) { return u * u / 2 + c2_of(u) / (g - 1) - I.energy; };
  const double u = supersonic ? bisect(u_sonic, u_max, G) : bisect(1e-9 * u_sonic, u_sonic, G);
  const double rho = rho_of(u);
  return {I.entropy * std::pow(rho, g), rho, u, g};
}

const GasState kReferenceInflow = state_from_mach(1.4, 1.0, 1.0, 2.0);

}  // namespace

TEST_CASE("admissible interval of the reference shell") {
  const BackPressureInterval I = admissible_backpressure_interval(kReferenceInflow, 1.0, 2.0);
  // Frozen from an independent scipy integration.
  CHECK(I.p_lo == doctest::Approx(1.4567073353).epsilon(1e-9));
  CHECK(I.p_hi == doctest::Approx(5.5839887603).epsilon(1e-9));
  CHECK(I.decreasing_in_rb);
  CHECK(I.contains(3.52));
  CHECK_FALSE(I.contains(1e6));
}

TEST_CASE("reference background: first integrals and algebraic reconstruction") {
  const BackgroundSolution bg = find_shock_position(kReferenceInflow, 3.52, 1.0, 2.0);
  CHECK(bg.r_b == doctest::Approx(1.308043).epsilon(1e-6));
  CHECK_NOTHROW(validate(bg));
  for (const FlowBranch* branch : {&bg.supersonic, &bg.subsonic}) {
    CHECK(branch->max_drift < 1e-8);
    const bool sup = branch->regime == Regime::Supersonic;
    for (std::size_t i = 0; i < branch->states.size(); i += 16) {
      const double r = branch->radii[static_cast<Eigen::Index>(i)];
      const GasState oracle = state_from_integrals(branch->first_integrals, 1.4, r, sup);
      const GasState& s = branch->states[i];
      CHECK(s.u0 == doctest::Approx(oracle.u0).epsilon(1e-8));
      CHECK(s.rho == doctest::Approx(oracle.rho).epsilon(1e-8));
      CHECK(s.p == doctest::Approx(oracle.p).epsilon(1e-8));
    }
  }
  CHECK(bg.p_exit == doctest::Approx(3.52).epsilon(1e-10));
  CHECK(bg.jump.downstream.p > bg.jump.upstream.p);
}

TEST_CASE("Mach-squared ODE cross-validates both branches") {
  const BackgroundSolution bg = find_shock_position(kReferenceInflow, 3.52, 1.0, 2.0);
  for (const FlowBranch* branch : {&bg.supersonic, &bg.subsonic}) {
    const Eigen::VectorXd t = branch->mach_squared();
    const MachProfile direct = mach_squared_profile(1.4, t[0], branch->radii[0], branch->radii[branch->radii.size() - 1]);
    REQUIRE(direct.mach_squared.size() == t.size());
    CHECK((direct.mach_squared - t).cwiseAbs().maxCoeff() < 1e-6);
    for (Eigen::Index i = 1; i < t.size(); ++i) {
      if (branch->regime == Regime::Subsonic) {
        CHECK(t[i] < t[i - 1]);
      } else {
        CHECK(t[i] > t[i - 1]);
      }
    }
  }
}

TEST_CASE("shock-position round trip over a 5 x 5 grid") {
  for (double mach : {1.5, 2.0, 2.5, 3.0, 4.0}) {
    const GasState inflow = state_from_mach(1.4, 1.0, 1.0, mach);
    for (double r_b : {1.1, 1.3, 1.5, 1.7, 1.9}) {
      const double p_back = exit_pressure(inflow, 1.0, r_b, 2.0);
      const BackgroundSolution bg = find_shock_position(inflow, p_back, 1.0, 2.0);
      CHECK(bg.r_b == doctest::Approx(r_b).epsilon(1e-8));
    }
  }
}

TEST_CASE("back pressures outside the interval are rejected") {
  const BackPressureInterval I = admissible_backpressure_interval(kReferenceInflow, 1.0, 2.0);
  CHECK_THROWS_AS(find_shock_position(kReferenceInflow, 0.99 * I.p_lo, 1.0, 2.0), BackPressureOutOfRange);
  CHECK_THROWS_AS(find_shock_position(kReferenceInflow, 1.01 * I.p_hi, 1.0, 2.0), BackPressureOutOfRange);
  CHECK_THROWS_AS(find_shock_position(kReferenceInflow, 1e6, 1.0, 2.0), BackPressureOutOfRange);
}

TEST_CASE("exit pressure decreases as the shock moves outward") {
  double previous = std::numeric_limits<double>::infinity();
  for (double r_b = 1.02; r_b < 2.0; r_b += 0.08) {
    const double p = exit_pressure(kReferenceInflow, 1.0, r_b, 2.0);
    CHECK(p < previous);
    previous = p;
  }
}

TEST_CASE("pressures scale linearly with the inflow pressure") {
  const BackPressureInterval a = admissible_backpressure_interval(kReferenceInflow, 1.0, 2.0);
  for (double lambda : {0.5, 10.0, 100.0}) {
    const BackPressureInterval b = admissible_backpressure_interval(state_from_mach(1.4, lambda, 1.0, 2.0), 1.0, 2.0);
    CHECK(b.p_lo == doctest::Approx(lambda * a.p_lo).epsilon(1e-9));
    CHECK(b.p_hi == doctest::Approx(lambda * a.p_hi).epsilon(1e-9));
  }
}

TEST_CASE("sonic approach is detected") {
  // A supersonic branch integrated inward decelerates towards M = 1.
  const GasState s = state_from_mach(1.4, 1.0, 1.0, 1.05);
  CHECK_THROWS_AS(integrate_radial_flow(s, 1.0, 0.5, Regime::Supersonic), SonicApproach);
  CHECK_THROWS_AS(mach_squared_profile(1.4, 1.0, 1.0, 2.0), SonicApproach);
}

TEST_CASE("subsonic extension below the shock") {
  const BackgroundSolution bg = find_shock_position(kReferenceInflow, 3.52, 1.0, 2.0);
  CHECK(bg.extension.h_target == doctest::Approx(0.05));
  CHECK(bg.extension.h_achieved == doctest::Approx(0.05));
  CHECK_FALSE(bg.extension.limited_by_sonic);
}
