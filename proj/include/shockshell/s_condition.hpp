#pragma once

// Mode-by-mode decision of the S-Condition. For the spherical-harmonic level
// n (eigenvalue n(n+1) of the sphere Laplacian) the nonlocal two-point problem
//
//   e1 v'' + k e2 v' + k^2 (e3 - lambda_n) v = -k^2 e4,   y in (0, 1),
//   v(0) = 1,  v'(0) = -(lambda_n + mu7) k / mu9,  v(1) = 0,
//
// (k = r1 - r_b) is overdetermined; it has no solution exactly when the
// initial value problem without the last condition ends with v(1) != 0.
// Each mode is excluded by the maximum principle, by an energy bound on k, or
// by a numerically resolved shooting margin.

#include <Eigen/Core>
#include <algorithm>
#include <optional>
#include <string>
#include <vector>

#include "shockshell/background.hpp"
#include "shockshell/linearization.hpp"
#include "shockshell/spline.hpp"

namespace shockshell {

struct SphereMode {
  int n = 0;
  double lambda = 0;
  int multiplicity = 1;
};

/// Eigenvalue n(n+1) of the Laplacian on the unit sphere.
double sphere_eigenvalue(int n);
/// Dimension 2n + 1 of the level-n eigenspace.
int sphere_multiplicity(int n);
/// Modes 0..N.
std::vector<SphereMode> enumerate_modes(int max_n);

struct ShootingResult {
  double v_end = 0;
  double slope_end = 0;
  /// max |v| over the accepted steps.
  double sup_abs_v = 0;
  std::size_t steps = 0;
};

/// Interpolated coefficient profiles plus the two scalars that enter the mode
/// problems; shared by all modes of one background.
class ModeShooter {
 public:
  ModeShooter(const CoefficientProfiles& profiles, const MuCoefficients& mus);

  double kappa() const { return kappa_; }
  double mu7() const { return mu7_; }
  double mu9() const { return mu9_; }
  /// v'(0) for eigenvalue lambda.
  double initial_slope(double lambda) const;

  /// Integrates the mode IVP; e4_scale multiplies the nonlocal source term.
  ShootingResult shoot(double lambda, double rel_tol = 1e-10, double e4_scale = 1.0) const;

 private:
  double kappa_;
  double mu7_;
  double mu9_;
  CubicSpline e1_, e2_, e3_, e4_;
};

/// v(1) of the mode-n initial value problem.
double mode_margin(int n, const CoefficientProfiles& profiles, const MuCoefficients& mus, double rel_tol = 1e-10);

/// Margin used for the strict Hopf inequalities.
inline constexpr double kHopfMargin = 1e-10;

/// Maximum-principle exclusion: e4 <= 0 on the grid, sup e3 < lambda_n and
/// lambda_n + mu7 > 0 (i.e. the initial slope is positive).
bool hopf_excludes(int n, const CoefficientProfiles& profiles, const MuCoefficients& mus);

/// The mode problem rewritten for w = exp(-h_n y) v in the variable
/// z = int_0^y ds / p_n(s), where w'' + k^2 alpha_n w = k^2 beta_n.
struct EnergyForm {
  int n = 0;
  double lambda = 0;
  double kappa = 0;
  double h_n = 0;
  double z_star = 0;
  Eigen::VectorXd y;
  Eigen::VectorXd p_n;
  Eigen::VectorXd z;
  Eigen::VectorXd alpha;
  Eigen::VectorXd beta;

  double sup_abs_alpha() const;
  double sup_abs_beta() const;
};

EnergyForm energy_transform(int n, const CoefficientProfiles& profiles, const MuCoefficients& mus);

struct EnergySolution {
  double w_end = 0;  // w(z_star)
  double v_end = 0;  // exp(h_n) w(z_star)
};

/// Solves w'' + k^2 alpha w = k^2 beta, w(0) = 1, w'(0) = 0 on [0, z_star],
/// integrating in y to keep the coefficient splines smooth.
EnergySolution solve_energy_form(const EnergyForm& form, double rel_tol = 1e-11);

struct KappaBound {
  double alpha_term = 0;  // 1 / (z* sqrt(2 sup|alpha|))
  double beta_term = 0;   // 1 / (z* sqrt(2 sup|beta|))
  double value() const { return std::min(alpha_term, beta_term); }
};

/// Shell widths below this value admit no solution of mode n.
KappaBound energy_kappa_bound_terms(const EnergyForm& form);
double energy_kappa_bound(int n, const EnergyForm& form);

enum class ExclusionMethod { HopfExcluded, EnergyBoundExcluded, NumericMargin, Inconclusive };
const char* to_string(ExclusionMethod method);

struct ModeVerdict {
  int n = 0;
  double lambda = 0;
  int multiplicity = 1;
  ExclusionMethod method = ExclusionMethod::Inconclusive;
  /// v(1) at the base tolerance and under step refinement.
  double margin = 0;
  double margin_refined = 0;
  /// Effective threshold margin_tol * max(1, sup|v|).
  double margin_threshold = 0;
  bool hopf = false;
  std::optional<double> kappa_bound;
  /// v(1) changes sign when the nonlocal source is perturbed by +-probe.
  bool zero_crossing_confirmed = false;
};

enum class TailStatus { HopfCoversTail, Unverified };
const char* to_string(TailStatus status);

struct OverallVerdict {
  enum class Kind { Holds, Fails, Inconclusive };
  Kind kind = Kind::Inconclusive;
  int failing_mode = -1;
  std::vector<int> inconclusive_modes;

  /// "Holds", "Fails(n)" or "Inconclusive".
  std::string label() const;
};

struct SConditionOptions {
  /// Relative margin factor; threshold is margin_tol * max(1, sup|v|).
  double margin_tol = 1e-6;
  int n_max = 64;
  double rel_tol = 1e-10;
  /// Refined tolerance is rel_tol * refine_factor.
  double refine_factor = 1e-2;
  bool use_energy_bound = true;
  /// Relative perturbation of the nonlocal source for the zero-crossing probe.
  double crossing_probe = 1e-6;
};

struct SConditionReport {
  std::vector<ModeVerdict> verdicts;
  int n_checked = -1;
  TailStatus tail_status = TailStatus::Unverified;
  OverallVerdict overall;
  std::vector<std::string> warnings;
  double kappa = 0;
  double t_s = 0;
  double t_star = 0;

  /// Smallest |v(1)| over the checked modes.
  double min_abs_margin() const;
};

SConditionReport check_s_condition(const CoefficientProfiles& profiles, const MuCoefficients& mus,
                                   const SConditionOptions& options = {});
SConditionReport check_s_condition(const BackgroundSolution& bg, const SConditionOptions& options = {},
                                   Eigen::Index n_samples = 1025);

}  // namespace shockshell
