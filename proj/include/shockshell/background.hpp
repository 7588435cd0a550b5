#pragma once

// Spherically symmetric steady Euler flow in the shell r0 < r < r1: radial
// ODE branches, the shock-position search against a back pressure, and the
// assembled transonic background solution.

#include <Eigen/Core>
#include <cstddef>
#include <vector>

#include "shockshell/gas_dynamics.hpp"

namespace shockshell {

enum class Regime { Supersonic, Subsonic };

const char* to_string(Regime regime);

struct IntegrationSettings {
  double rel_tol = 1e-10;
  double abs_tol = 1e-12;
  /// Uniform output samples per branch (including both ends).
  std::size_t n_samples = 1025;
};

/// Quantities conserved along a radial branch.
struct FirstIntegrals {
  double mass_flux = 0;  // rho u0 r^2
  double energy = 0;     // u0^2/2 + c^2/(g-1)
  double entropy = 0;    // p rho^-g

  static FirstIntegrals of(const GasState& s, double radius);
};

struct FlowBranch {
  double gamma = 1.4;
  double r_start = 0;
  double r_end = 0;
  Regime regime = Regime::Supersonic;
  Eigen::VectorXd radii;
  std::vector<GasState> states;
  FirstIntegrals first_integrals;
  /// Largest relative deviation of (m, E, A) over the samples.
  double max_drift = 0;

  const GasState& front() const { return states.front(); }
  const GasState& back() const { return states.back(); }
  Eigen::VectorXd mach_squared() const;
};

/// du/dr, drho/dr, dp/dr of the radial steady Euler system.
Eigen::Vector3d radial_flow_rhs(double radius, const Eigen::Vector3d& u_rho_p, double gamma);

/// Integrates the radial system from r_start to r_end (either direction) and
/// resamples onto a uniform grid. Throws SonicApproach / StepFailure.
FlowBranch integrate_radial_flow(const GasState& start, double r_start, double r_end, Regime regime,
                                 const IntegrationSettings& settings = {});

struct MachProfile {
  Eigen::VectorXd radii;
  Eigen::VectorXd mach_squared;
};

/// Integrates dt/dr = (2t/r)(2 + (g-1)t)/(t - 1) on the branch grid convention.
MachProfile mach_squared_profile(double gamma, double t_start, double r_start, double r_end,
                                 const IntegrationSettings& settings = {});

struct SubsonicExtension {
  double h_target = 0;
  double h_achieved = 0;
  bool limited_by_sonic = false;
};

struct BackgroundSolution {
  double gamma = 1.4;
  double r0 = 0;
  double r1 = 0;
  double r_b = 0;
  FlowBranch supersonic;
  FlowBranch subsonic;
  ShockJump jump;
  double p_exit = 0;
  SubsonicExtension extension;

  double kappa() const { return r1 - r_b; }
};

struct ExitPressure {
  double p_exit = 0;
  BackgroundSolution solution;
};

/// Supersonic branch r0 -> r_b, normal jump, subsonic branch r_b -> r1.
ExitPressure forward_exit_pressure(const GasState& inflow, double r0, double r_b, double r1,
                                   const IntegrationSettings& settings = {});

/// Exit pressure only (same integration path, no resampling).
double exit_pressure(const GasState& inflow, double r0, double r_b, double r1,
                     const IntegrationSettings& settings = {});

struct BackPressureInterval {
  double p_lo = 0;
  double p_hi = 0;
  /// True when the exit pressure decreases as the shock moves outward.
  bool decreasing_in_rb = true;

  bool contains(double p) const { return p > p_lo && p < p_hi; }
};

/// Open interval of back pressures for which a shock in (r0, r1) exists.
BackPressureInterval admissible_backpressure_interval(const GasState& inflow, double r0, double r1,
                                                      const IntegrationSettings& settings = {});

struct ShockSearchSettings {
  IntegrationSettings integration;
  /// Stop once |p_exit - p_back| < residual_tol * p_back.
  double residual_tol = 1e-10;
  std::size_t sweep_points = 33;
};

/// Locates r_b with p_exit(r_b) = p_back by a monotonicity sweep and
/// bisection. Throws BackPressureOutOfRange / NonMonotoneResidual.
BackgroundSolution find_shock_position(const GasState& inflow, double p_back, double r0, double r1,
                                       const ShockSearchSettings& settings = {});

/// Checks every BackgroundSolution invariant; throws InvariantViolation.
void validate(const BackgroundSolution& bg, double tol = 1e-8);

}  // namespace shockshell
