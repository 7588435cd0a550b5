#include <doctest.h>

#include <cmath>
#include <random>

#include "shockshell/gas_dynamics.hpp"

using namespace shockshell;

namespace {

// Downstream velocity from the three conservation laws alone: with m, P, H the
// upstream mass, momentum and total-enthalpy fluxes, F(u) = u^2/2 +
// g/(g-1) (P - m u) u / m - H is a downward parabola vanishing at u- and u+.
double downstream_velocity_by_bisection(const GasState& up) {
  const double g = up.gamma;
  const double m = up.mass_flux_density();
  const double P = up.momentum_flux();
  const double H = up.energy();
  auto F = [&](double u) { return u * u / 2 + g / (g - 1) * (P - m * u) * u / m - H; };
  double lo = 1e-9 * up.u0;
  double hi = (1 - 1e-9) * up.u0;
  REQUIRE(F(lo) < 0);
  REQUIRE(F(hi) > 0);
  for (int i = 0; i < 200; ++i) {
    const double mid = 0.5 * (lo + hi);
    (F(mid) < 0 ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

}  // namespace

TEST_CASE("closed-form jump at Mach 2") {
  const GasState up = state_from_mach(1.4, 1.0, 1.0, 2.0);
  const ShockJump j = rh_normal_jump(up, 1.3);
  CHECK(j.downstream.p / up.p == doctest::Approx(4.5).epsilon(1e-12));
  CHECK(j.downstream.rho / up.rho == doctest::Approx(8.0 / 3.0).epsilon(1e-12));
  CHECK(j.downstream.mach_squared() == doctest::Approx(1.0 / 3.0).epsilon(1e-12));
  CHECK(j.r_b == 1.3);
  CHECK(j.max_residual() < 1e-14);
}

TEST_CASE("jump agrees with a conservation-law root solve over random states") {
  std::mt19937_64 rng(20241016);
  std::uniform_real_distribution<double> gamma(1.05, 1.67), mach(1.01, 8.0), logp(-3.0, 3.0), logr(-3.0, 3.0);
  for (int trial = 0; trial < 500; ++trial) {
    const double g = gamma(rng);
    const GasState up = state_from_mach(g, std::pow(10.0, logp(rng)), std::pow(10.0, logr(rng)), mach(rng));
    const ShockJump j = rh_normal_jump(up);
    const double u_oracle = downstream_velocity_by_bisection(up);
    CHECK(j.downstream.u0 == doctest::Approx(u_oracle).epsilon(1e-10));
    CHECK(j.max_residual() < 1e-12);
    // Entropy condition, subsonic downstream, and the Mach-product identity.
    CHECK(j.downstream.p > up.p);
    CHECK(j.downstream.mach_squared() < 1.0);
    CHECK(j.downstream.mach_squared() > (g - 1) / (2 * g));
    CHECK(j.mach_product() == doctest::Approx((g + 1) * (g + 1) / 4).epsilon(1e-12));
  }
}

TEST_CASE("entropy rises across the shock (long double oracle)") {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> gamma(1.05, 1.67), mach(1.001, 6.0);
  for (int trial = 0; trial < 200; ++trial) {
    const auto up = state_from_mach<long double>(gamma(rng), 1.0L, 1.0L, mach(rng));
    const auto j = rh_normal_jump(up);
    CHECK(j.downstream.entropy() > up.entropy());
  }
}

TEST_CASE("weak-shock limit is continuous") {
  const GasState up = state_from_mach(1.4, 1.0, 1.0, std::sqrt(1.0 + 1e-5));
  const ShockJump j = rh_normal_jump(up);
  CHECK(j.downstream.p / up.p == doctest::Approx(1.0).epsilon(1e-4));
  CHECK(j.downstream.mach_squared() == doctest::Approx(1.0).epsilon(1e-4));
}

TEST_CASE("non-supersonic upstream is rejected") {
  CHECK_THROWS_AS(rh_normal_jump(state_from_mach(1.4, 1.0, 1.0, 0.8)), NotSupersonic);
  CHECK_THROWS_AS(rh_normal_jump(state_from_mach(1.4, 1.0, 1.0, 1.0)), NotSupersonic);
  CHECK_THROWS_AS(rh_normal_jump(state_from_mach(1.4, 1.0, 1.0, std::sqrt(1.0 + 1e-7))), NotSupersonic);
}

TEST_CASE("state validation") {
  CHECK_NOTHROW(validate(state_from_mach(1.4, 1.0, 1.0, 2.0)));
  GasState bad = state_from_mach(1.4, 1.0, 1.0, 2.0);
  bad.p = -1;
  CHECK_THROWS_AS(validate(bad), InvariantViolation);
  bad = state_from_mach(1.0, 1.0, 1.0, 2.0);
  CHECK_THROWS_AS(validate(bad), InvariantViolation);
}

TEST_CASE("scalar helpers") {
  const GasState s{2.0, 0.5, 3.0, 1.4};
  CHECK(sound_speed_squared(s) == doctest::Approx(5.6));
  CHECK(bernoulli_energy(s) == doctest::Approx(4.5 + 5.6 / 0.4));
  CHECK(entropy_A(s) == doctest::Approx(2.0 * std::pow(0.5, -1.4)));
  CHECK(s.momentum_flux() == doctest::Approx(0.5 * 9 + 2));
}
