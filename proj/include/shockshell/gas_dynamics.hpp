#pragma once

// Pointwise polytropic-gas algebra and the radial (normal) Rankine-Hugoniot
// jump. Everything is templated on the scalar so the same formulas can be
// evaluated in extended precision by the test oracles.

#include <array>
#include <cmath>

#include "shockshell/errors.hpp"

namespace shockshell {

/// |M^2 - 1| below this is treated as sonic.
inline constexpr double kSonicGuard = 1e-6;

template <typename Scalar>
struct BasicGasState {
  Scalar p{1};
  Scalar rho{1};
  Scalar u0{0};
  Scalar gamma{Scalar(1.4)};

  Scalar c2() const { return gamma * p / rho; }
  Scalar mach_squared() const { return u0 * u0 / c2(); }
  Scalar energy() const { return u0 * u0 / 2 + c2() / (gamma - 1); }
  Scalar entropy() const {
    using std::pow;
    return p * pow(rho, -gamma);
  }
  Scalar mass_flux_density() const { return rho * u0; }
  Scalar momentum_flux() const { return rho * u0 * u0 + p; }
};

using GasState = BasicGasState<double>;

template <typename Scalar>
Scalar sound_speed_squared(const BasicGasState<Scalar>& s) {
  return s.c2();
}

template <typename Scalar>
Scalar bernoulli_energy(const BasicGasState<Scalar>& s) {
  return s.energy();
}

template <typename Scalar>
Scalar entropy_A(const BasicGasState<Scalar>& s) {
  return s.entropy();
}

/// State with prescribed Mach number (not squared).
template <typename Scalar>
BasicGasState<Scalar> state_from_mach(Scalar gamma, Scalar p, Scalar rho, Scalar mach) {
  using std::sqrt;
  return {p, rho, mach * sqrt(gamma * p / rho), gamma};
}

/// Throws InvariantViolation unless p, rho, u0 > 0 and gamma > 1.
template <typename Scalar>
void validate(const BasicGasState<Scalar>& s) {
  if (!(s.p > 0) || !(s.rho > 0) || !(s.u0 > 0) || !(s.gamma > 1)) {
    throw InvariantViolation("gas state requires p, rho, u0 > 0 and gamma > 1");
  }
}

template <typename Scalar>
struct BasicShockJump {
  Scalar r_b{0};
  BasicGasState<Scalar> upstream;
  BasicGasState<Scalar> downstream;
  /// Relative residuals of mass, momentum and energy conservation.
  std::array<Scalar, 3> residuals{};

  /// (1/t- + (g-1)/2)(1/t+ + (g-1)/2); equals (g+1)^2/4 on an exact jump.
  Scalar mach_product() const {
    const Scalar half = (upstream.gamma - 1) / 2;
    return (1 / upstream.mach_squared() + half) * (1 / downstream.mach_squared() + half);
  }
  Scalar max_residual() const {
    using std::abs;
    using std::max;
    return max(residuals[0], max(residuals[1], residuals[2]));
  }
};

using ShockJump = BasicShockJump<double>;

template <typename Scalar>
std::array<Scalar, 3> rh_residuals(const BasicGasState<Scalar>& a, const BasicGasState<Scalar>& b) {
  using std::abs;
  return {abs(b.mass_flux_density() - a.mass_flux_density()) / abs(a.mass_flux_density()),
          abs(b.momentum_flux() - a.momentum_flux()) / abs(a.momentum_flux()),
          abs(b.energy() - a.energy()) / abs(a.energy())};
}

/// Normal-shock jump on the entropy-admissible branch. Closed-form ratios:
///   p+/p- = (2 g M^2 - (g-1)) / (g+1),  rho+/rho- = (g+1) M^2 / ((g-1) M^2 + 2),
/// and u0 from mass conservation.
template <typename Scalar>
BasicShockJump<Scalar> rh_normal_jump(const BasicGasState<Scalar>& upstream, Scalar r_b = 0) {
  const Scalar g = upstream.gamma;
  const Scalar m2 = upstream.mach_squared();
  if (!(m2 > 1 + Scalar(kSonicGuard))) {
    throw NotSupersonic(static_cast<double>(m2));
  }
  BasicShockJump<Scalar> jump;
  jump.r_b = r_b;
  jump.upstream = upstream;
  auto& down = jump.downstream;
  down.gamma = g;
  down.p = upstream.p * (2 * g * m2 - (g - 1)) / (g + 1);
  down.rho = upstream.rho * (g + 1) * m2 / ((g - 1) * m2 + 2);
  down.u0 = upstream.mass_flux_density() / down.rho;
  jump.residuals = rh_residuals(upstream, down);
  return jump;
}

}  // namespace shockshell
