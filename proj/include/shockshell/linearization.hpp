#pragma once

// Coefficients of the linearized free-boundary problem about a background
// solution: the ten shock-relation scalars mu0..mu9 and the interior elliptic
// coefficient profiles e1..e4 on the normalized subsonic interval y in [0, 1],
// x0 = r_b + (r1 - r_b) y.

#include <Eigen/Core>
#include <numbers>
#include <string>

#include "shockshell/background.hpp"
#include "shockshell/gas_dynamics.hpp"

namespace shockshell {

struct MuCoefficients {
  double mu0 = 0, mu1 = 0, mu2 = 0, mu3 = 0, mu4 = 0;
  double mu5 = 0, mu6 = 0, mu7 = 0, mu8 = 0, mu9 = 0;

  /// (g+1)/2 * u0 / (c^2 - u0^2) behind the shock (Prandtl-relation form).
  double mu0_prandtl = 0;
  /// |mu0 - mu0_prandtl| / mu0; zero when mu0 itself came from the Prandtl form.
  double mu0_relative_difference = 0;
  /// Squared-velocity variant (g+1)/2 * u0^2 / (c^2 - u0^2); not an identity.
  double mu0_squared_variant = 0;
  /// True when mu0 is the defining ratio (rho u0)+ / (p+ - p-).
  bool mu0_from_jump = false;

  // Evaluation point.
  double gamma = 1.4;
  double r_b = 0;
  double t_s = 0;
  GasState downstream;

  /// Sphere area used in mu8.
  static constexpr double sphere_area = 4.0 * std::numbers::pi;
};

/// All ten coefficients at the jump; throws SignViolation on a failed sign.
MuCoefficients compute_mu(const ShockJump& jump);
MuCoefficients compute_mu(const BackgroundSolution& bg);
/// Downstream-only evaluation (mu0 from the Prandtl form). Used for
/// backgrounds specified by their subsonic data at r_b alone.
MuCoefficients compute_mu_downstream(const GasState& downstream, double r_b);

/// Throws SignViolation naming the first coefficient with the wrong sign.
void check_signs(const MuCoefficients& mu);

// Pointwise e-coefficients. t is the local Mach number squared, x the radius.
double e1_coefficient(double t, double x);
double e2_coefficient(double t, double x, double gamma);
double e3_coefficient(double t, double gamma);
/// rho_ratio = rho(x) / rho(r_b).
double e4_coefficient(double t, double rho_ratio, double t_s, double gamma);
/// e4 through mu4/mu2 (the unsimplified form); rho and rho_s are absolute.
double e4_from_mu(double t, double rho, double mu4, double mu2, double gamma);
/// (2g - 3) t^2 + 8t - 3, whose sign is the sign of e4.
double e4_sign_polynomial(double t, double gamma);

/// Unique root in (0, 1) of (2g - 3) t^2 + 8t - 3.
double e4_sign_threshold(double gamma);

struct CoefficientProfiles {
  double gamma = 1.4;
  double r_b = 0;
  double r1 = 0;
  double kappa = 0;
  double t_s = 0;
  double rho_s = 0;
  Eigen::VectorXd y;
  Eigen::VectorXd x;
  Eigen::VectorXd t;
  Eigen::VectorXd rho;
  Eigen::VectorXd e1, e2, e3, e4;

  Eigen::Index size() const { return y.size(); }

  /// Profiles with prescribed samples and no underlying background; used for
  /// limiting problems. kappa is taken as given; e1 must be positive.
  static CoefficientProfiles synthetic(double kappa, Eigen::VectorXd y, Eigen::VectorXd e1, Eigen::VectorXd e2,
                                       Eigen::VectorXd e3, Eigen::VectorXd e4);
};

/// Samples e1..e4 from the subsonic branch (r_b -> r1) at n_samples points.
CoefficientProfiles coefficient_profiles(const FlowBranch& subsonic, Eigen::Index n_samples = 1025);
CoefficientProfiles coefficient_profiles(const BackgroundSolution& bg, Eigen::Index n_samples = 1025);

/// Throws InvariantViolation if e1, e2 > 0, the e4 sign rule, or the
/// monotone decrease of t fails.
void validate(const CoefficientProfiles& profiles);

/// First y where e4 changes sign (linear interpolation), or a negative value
/// when e4 keeps one sign.
double e4_sign_change(const CoefficientProfiles& profiles);

}  // namespace shockshell
