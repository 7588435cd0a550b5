#include <doctest.h>

#include <cmath>
#include <random>

#include "shockshell/linearization.hpp"

using namespace shockshell;

namespace {

double bisect_threshold(double g) {
  double lo = 0.0, hi = 1.0;
  for (int i = 0; i < 200; ++i) {
    const double mid = 0.5 * (lo + hi);
    (e4_sign_polynomial(mid, g) < 0 ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

// Subsonic branch seeded at r_b with Mach number squared t_s.
FlowBranch seeded_branch(double g, double t_s, double r_b, double r1) {
  const GasState s = state_from_mach(g, 1.0, 1.0, std::sqrt(t_s));
  return integrate_radial_flow(s, r_b, r1, Regime::Subsonic);
}

}  // namespace

TEST_CASE("mu table at the Mach 2 jump") {
  const ShockJump j = rh_normal_jump(state_from_mach(1.4, 1.0, 1.0, 2.0), 1.5);
  const MuCoefficients mu = compute_mu(j);
  CHECK(mu.mu0 == doctest::Approx(2 * std::sqrt(1.4) / 3.5).epsilon(1e-14));
  CHECK(mu.mu0 == doctest::Approx(0.6761234).epsilon(1e-7));
  CHECK(mu.mu0_relative_difference < 1e-10);
  // The squared-velocity variant differs by the factor u0+.
  CHECK(mu.mu0_squared_variant / mu.mu0 == doctest::Approx(j.downstream.u0).epsilon(1e-12));
  CHECK(std::abs(mu.mu0_squared_variant / mu.mu0 - 1.0) > 0.05);
  CHECK_NOTHROW(check_signs(mu));
}

TEST_CASE("mu identities and closed forms over random jumps") {
  std::mt19937_64 rng(99);
  std::uniform_real_distribution<double> gamma(1.05, 1.67), mach(1.05, 6.0), radius(0.5, 3.0), logp(-2, 2);
  for (int trial = 0; trial < 300; ++trial) {
    const double g = gamma(rng);
    const double r_b = radius(rng);
    const ShockJump j = rh_normal_jump(state_from_mach(g, std::pow(10.0, logp(rng)), 1.0, mach(rng)), r_b);
    const MuCoefficients mu = compute_mu(j);
    CHECK_NOTHROW(check_signs(mu));
    CHECK(mu.mu0_relative_difference < 1e-10);
    CHECK(mu.mu7 == -mu.mu0 * mu.mu6);
    CHECK(mu.mu8 == -mu.mu2 * mu.mu5 / (4 * M_PI * mu.mu6));
    CHECK(mu.mu9 == -mu.mu0 * mu.mu2 * mu.mu5);
    const double t = mu.t_s;
    const double q = (g - 1) * t * t + t + 1;
    CHECK(mu.mu7 == doctest::Approx(-4 * g * t * q / ((1 - t) * (1 - t))).epsilon(1e-10));
    CHECK(mu.mu9 == doctest::Approx(-2 * r_b * (1 + (g - 1) * t)).epsilon(1e-10));
  }
}

TEST_CASE("sign violation is reported by name") {
  // Supersonic data behind a "shock" flips mu5.
  const GasState wrong = state_from_mach(1.4, 1.0, 1.0, 1.5);
  try {
    compute_mu_downstream(wrong, 1.0);
    FAIL("expected SignViolation");
  } catch (const SignViolation& e) {
    CHECK(e.name() == "mu0");
  }
}

TEST_CASE("e4 sign threshold") {
  CHECK(e4_sign_threshold(1.5) == 0.375);
  CHECK(e4_sign_threshold(3.0) == doctest::Approx(1.0 / 3.0).epsilon(1e-15));
  CHECK(e4_sign_threshold(1.4) == doctest::Approx(0.3785830).epsilon(1e-7));
  for (double g : {1.1, 1.3, 1.4, 5.0 / 3.0, 2.0}) CHECK(e4_sign_threshold(g) == doctest::Approx(bisect_threshold(g)).epsilon(1e-12));
}

TEST_CASE("pointwise anchors at t = 0") {
  CHECK(e3_coefficient(0.0, 1.4) == 12.0);
  CHECK(e1_coefficient(0.0, 1.7) == doctest::Approx(1.7 * 1.7));
  CHECK(e2_coefficient(0.0, 1.7, 1.4) == doctest::Approx(8 * 1.7));
  CHECK(e4_coefficient(0.0, 1.0, 0.0, 1.4) == -12.0);
}

TEST_CASE("reference profiles") {
  const BackgroundSolution bg = find_shock_position(state_from_mach(1.4, 1.0, 1.0, 2.0), 3.52, 1.0, 2.0);
  const CoefficientProfiles p = coefficient_profiles(bg);
  const MuCoefficients mu = compute_mu(bg);
  CHECK(p.size() == 1025);
  CHECK(p.kappa == doctest::Approx(bg.kappa()));
  CHECK(p.t_s == doctest::Approx(0.254165).epsilon(1e-5));
  CHECK(p.e1.minCoeff() > 0);
  CHECK(p.e2.minCoeff() > 0);
  CHECK(p.e4.maxCoeff() < 0);
  CHECK(e4_sign_change(p) < 0);
  // Two routes to e4 agree.
  for (Eigen::Index i = 0; i < p.size(); i += 64) {
    CHECK(e4_from_mu(p.t[i], p.rho[i], mu.mu4, mu.mu2, 1.4) == doctest::Approx(p.e4[i]).epsilon(1e-11));
  }
  // t samples follow the branch.
  CHECK(p.t[p.size() - 1] == doctest::Approx(bg.subsonic.back().mach_squared()).epsilon(1e-9));
}

TEST_CASE("weak shock: e4 changes sign where t crosses the threshold") {
  const BackgroundSolution bg = find_shock_position(state_from_mach(1.4, 1.0, 1.0, 1.2), 2.0, 1.0, 2.0);
  const CoefficientProfiles p = coefficient_profiles(bg);
  CHECK(p.t_s > e4_sign_threshold(1.4));
  const double y = e4_sign_change(p);
  REQUIRE(y > 0);
  const Eigen::Index i = static_cast<Eigen::Index>(y * (p.size() - 1));
  CHECK(p.t[i] >= e4_sign_threshold(1.4) - 1e-3);
  CHECK(p.t[i + 1] <= e4_sign_threshold(1.4) + 1e-3);
  CHECK(p.e4[0] > 0);
}

TEST_CASE("small-t_s background reproduces the limiting coefficients") {
  const double t_s = 1e-7;
  const FlowBranch branch = seeded_branch(1.4, t_s, 1.5, 2.0);
  const CoefficientProfiles p = coefficient_profiles(branch);
  for (Eigen::Index i = 0; i < p.size(); ++i) {
    CHECK(std::abs(p.e3[i] - 12.0) < 1e-6);
    const double anchor = -12.0 * std::pow(p.rho[i] / p.rho_s, 1.4);
    CHECK(std::abs(p.e4[i] - anchor) < 1e-6 * 12.0);
  }
  const MuCoefficients mu = compute_mu_downstream(branch.front(), 1.5);
  CHECK(mu.mu7 == doctest::Approx(0.0).epsilon(1e-5));
  CHECK(mu.mu9 == doctest::Approx(-3.0).epsilon(1e-6));
}

TEST_CASE("profile validation") {
  const Eigen::VectorXd y = Eigen::VectorXd::LinSpaced(5, 0, 1);
  CHECK_THROWS_AS(CoefficientProfiles::synthetic(1.0, y, Eigen::VectorXd::Zero(5), y, y, y), InvariantViolation);
  const auto ok = CoefficientProfiles::synthetic(1.0, y, Eigen::VectorXd::Ones(5), Eigen::VectorXd::Zero(5),
                                                 Eigen::VectorXd::Constant(5, 12.0), Eigen::VectorXd::Zero(5));
  CHECK_NOTHROW(validate(ok));
  const FlowBranch branch = seeded_branch(1.4, 0.2, 1.5, 2.0);
  CHECK_THROWS_AS(coefficient_profiles(branch, 64), InvariantViolation);
}
