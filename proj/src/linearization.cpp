#include "shockshell/linearization.hpp"

#include <cmath>

#include "shockshell/errors.hpp"
#include "shockshell/spline.hpp"

namespace shockshell {

namespace {

MuCoefficients downstream_terms(const GasState& down, double r_b) {
  const double g = down.gamma;
  const double u = down.u0;
  const double rho = down.rho;
  const double p = down.p;
  const double c2 = down.c2();
  const double t = down.mach_squared();

  MuCoefficients mu;
  mu.gamma = g;
  mu.r_b = r_b;
  mu.t_s = t;
  mu.downstream = down;
  mu.mu0_prandtl = (g + 1.0) / 2.0 * u / (c2 - u * u);
  mu.mu0_squared_variant = (g + 1.0) / 2.0 * u * u / (c2 - u * u);
  mu.mu1 = 4.0 * g * u / ((g + 1.0) * r_b);
  mu.mu2 = -4.0 * rho / ((g + 1.0) * r_b) * ((g - 1.0) * u * u + c2);
  mu.mu3 = -4.0 * g * rho / ((g + 1.0) * r_b);
  mu.mu4 = 4.0 * (g - 1.0) / ((g + 1.0) * r_b * std::pow(rho, g - 1.0)) * (c2 - u * u);
  mu.mu5 = r_b * r_b * (u * u - c2) / (g * p * u);
  mu.mu6 = 8.0 * g * u / ((g + 1.0) * (1.0 - t)) * ((g - 1.0) * t * t + t + 1.0);
  return mu;
}

void finish_products(MuCoefficients& mu) {
  mu.mu7 = -mu.mu0 * mu.mu6;
  mu.mu8 = -mu.mu2 * mu.mu5 / (MuCoefficients::sphere_area * mu.mu6);
  mu.mu9 = -mu.mu0 * mu.mu2 * mu.mu5;
}

}  // namespace

MuCoefficients compute_mu(const ShockJump& jump) {
  MuCoefficients mu = downstream_terms(jump.downstream, jump.r_b);
  mu.mu0 = jump.downstream.mass_flux_density() / (jump.downstream.p - jump.upstream.p);
  mu.mu0_from_jump = true;
  mu.mu0_relative_difference = std::abs(mu.mu0 - mu.mu0_prandtl) / std::abs(mu.mu0);
  finish_products(mu);
  check_signs(mu);
  return mu;
}

MuCoefficients compute_mu(const BackgroundSolution& bg) { return compute_mu(bg.jump); }

MuCoefficients compute_mu_downstream(const GasState& downstream, double r_b) {
  MuCoefficients mu = downstream_terms(downstream, r_b);
  mu.mu0 = mu.mu0_prandtl;
  finish_products(mu);
  check_signs(mu);
  return mu;
}

void check_signs(const MuCoefficients& mu) {
  const std::pair<const char*, bool> checks[] = {
      {"mu0", mu.mu0 > 0}, {"mu1", mu.mu1 > 0}, {"mu2", mu.mu2 < 0}, {"mu3", mu.mu3 < 0}, {"mu4", mu.mu4 > 0},
      {"mu5", mu.mu5 < 0}, {"mu6", mu.mu6 > 0}, {"mu7", mu.mu7 < 0}, {"mu8", mu.mu8 < 0}, {"mu9", mu.mu9 < 0},
  };
  for (const auto& [name, ok] : checks) {
    if (!ok) throw SignViolation(name);
  }
}

double e1_coefficient(double t, double x) { return x * x * (1.0 - t); }

double e2_coefficient(double t, double x, double g) {
  return 2.0 * x / (1.0 - t) * ((1.0 + 2.0 * g) * t * t - 3.0 * t + 4.0);
}

double e3_coefficient(double t, double g) {
  const double t2 = t * t;
  const double poly = 6.0 - 19.0 * t - 7.0 * t2 * (g - 2.0) + t2 * t2 * g * (1.0 + 2.0 * g) +
                      t2 * t * (-3.0 + 2.0 * g - 4.0 * g * g);
  const double d = t - 1.0;
  return -2.0 / (d * d * d) * poly;
}

double e4_sign_polynomial(double t, double g) { return (2.0 * g - 3.0) * t * t + 8.0 * t - 3.0; }

double e4_coefficient(double t, double rho_ratio, double t_s, double g) {
  const double s = 1.0 - t;
  return (1.0 - t_s) / (1.0 + (g - 1.0) * t_s) * 2.0 * std::pow(rho_ratio, g) * (2.0 + (g - 1.0) * t) /
         (s * s * s) * e4_sign_polynomial(t, g);
}

double e4_from_mu(double t, double rho, double mu4, double mu2, double g) {
  const double d = t - 1.0;
  return mu4 / mu2 * 2.0 * std::pow(rho, g) * (2.0 + (g - 1.0) * t) / ((g - 1.0) * d * d * d) *
         e4_sign_polynomial(t, g);
}

double e4_sign_threshold(double gamma) {
  // Rationalized root of a t^2 + 8 t - 3; also covers a = 0.
  const double a = 2.0 * gamma - 3.0;
  return 6.0 / (8.0 + std::sqrt(64.0 + 12.0 * a));
}

CoefficientProfiles CoefficientProfiles::synthetic(double kappa, Eigen::VectorXd y, Eigen::VectorXd e1,
                                                   Eigen::VectorXd e2, Eigen::VectorXd e3, Eigen::VectorXd e4) {
  const Eigen::Index n = y.size();
  if (e1.size() != n || e2.size() != n || e3.size() != n || e4.size() != n || n < 2) {
    throw InvariantViolation("synthetic profiles need equally sized samples");
  }
  CoefficientProfiles p;
  p.kappa = kappa;
  p.y = std::move(y);
  p.e1 = std::move(e1);
  p.e2 = std::move(e2);
  p.e3 = std::move(e3);
  p.e4 = std::move(e4);
  validate(p);
  return p;
}

CoefficientProfiles coefficient_profiles(const FlowBranch& subsonic, Eigen::Index n_samples) {
  if (subsonic.regime != Regime::Subsonic || subsonic.states.size() < 4) {
    throw InvariantViolation("coefficient profiles need a sampled subsonic branch");
  }
  if (n_samples < 129) {
    throw InvariantViolation("coefficient profiles need at least 129 samples");
  }
  const double g = subsonic.gamma;
  const GasState& shock_side = subsonic.front();

  CoefficientProfiles p;
  p.gamma = g;
  p.r_b = subsonic.r_start;
  p.r1 = subsonic.r_end;
  p.kappa = p.r1 - p.r_b;
  p.t_s = shock_side.mach_squared();
  p.rho_s = shock_side.rho;

  const CubicSpline t_of_x(subsonic.radii, subsonic.mach_squared());
  Eigen::VectorXd rho_samples(subsonic.radii.size());
  for (Eigen::Index i = 0; i < rho_samples.size(); ++i) rho_samples[i] = subsonic.states[static_cast<std::size_t>(i)].rho;
  const CubicSpline rho_of_x(subsonic.radii, rho_samples);

  p.y = Eigen::VectorXd::LinSpaced(n_samples, 0.0, 1.0);
  p.x = (p.r_b + p.kappa * p.y.array()).matrix();
  p.x[n_samples - 1] = p.r1;
  p.t.resize(n_samples);
  p.rho.resize(n_samples);
  p.e1.resize(n_samples);
  p.e2.resize(n_samples);
  p.e3.resize(n_samples);
  p.e4.resize(n_samples);
  for (Eigen::Index i = 0; i < n_samples; ++i) {
    const double x = p.x[i];
    const double t = i == 0 ? p.t_s : t_of_x(x);
    const double rho = i == 0 ? p.rho_s : rho_of_x(x);
    p.t[i] = t;
    p.rho[i] = rho;
    p.e1[i] = e1_coefficient(t, x);
    p.e2[i] = e2_coefficient(t, x, g);
    p.e3[i] = e3_coefficient(t, g);
    p.e4[i] = e4_coefficient(t, rho / p.rho_s, p.t_s, g);
  }
  validate(p);
  return p;
}

CoefficientProfiles coefficient_profiles(const BackgroundSolution& bg, Eigen::Index n_samples) {
  return coefficient_profiles(bg.subsonic, n_samples);
}

void validate(const CoefficientProfiles& p) {
  for (Eigen::Index i = 0; i < p.size(); ++i) {
    if (!(p.e1[i] > 0)) throw InvariantViolation("e1 must be positive at y = " + std::to_string(p.y[i]));
  }
  if (p.t.size() != p.size()) return;  // synthetic profiles carry no t samples
  for (Eigen::Index i = 0; i < p.size(); ++i) {
    if (!(p.e2[i] > 0)) throw InvariantViolation("e2 must be positive at y = " + std::to_string(p.y[i]));
    const double poly = e4_sign_polynomial(p.t[i], p.gamma);
    if (std::abs(poly) > 1e-12 && (poly > 0) != (p.e4[i] > 0)) {
      throw InvariantViolation("e4 sign disagrees with (2g-3)t^2 + 8t - 3 at y = " + std::to_string(p.y[i]));
    }
    if (i > 0 && p.t[i] > p.t[i - 1]) {
      throw InvariantViolation("Mach number squared must decrease along the subsonic branch");
    }
  }
}

double e4_sign_change(const CoefficientProfiles& p) {
  for (Eigen::Index i = 1; i < p.size(); ++i) {
    const double a = p.e4[i - 1];
    const double b = p.e4[i];
    if ((a > 0) != (b > 0)) {
      return p.y[i - 1] + (p.y[i] - p.y[i - 1]) * a / (a - b);
    }
  }
  return -1.0;
}

}  // namespace shockshell
