#include "shockshell/s_condition.hpp"

#include <cmath>
#include <functional>
#include <limits>

#include "shockshell/errors.hpp"
#include "shockshell/ode.hpp"

namespace shockshell {

namespace {

using Vec2 = Eigen::Vector2d;

ode::Options<double> tolerances(double rel_tol) {
  ode::Options<double> opt;
  opt.rel_tol = rel_tol;
  opt.abs_tol = rel_tol * 1e-2;
  return opt;
}

double sup_abs(const Eigen::VectorXd& v) {
  if (v.size() == 0) return 0.0;
  if (!v.allFinite()) return std::numeric_limits<double>::infinity();
  return v.cwiseAbs().maxCoeff();
}

double bound_term(double z_star, double sup) {
  if (!(sup > 0)) return std::numeric_limits<double>::infinity();
  if (!std::isfinite(sup) || !std::isfinite(z_star)) return 0.0;
  return 1.0 / (z_star * std::sqrt(2.0 * sup));
}

}  // namespace

double sphere_eigenvalue(int n) { return static_cast<double>(n) * static_cast<double>(n + 1); }

int sphere_multiplicity(int n) { return 2 * n + 1; }

std::vector<SphereMode> enumerate_modes(int max_n) {
  std::vector<SphereMode> modes;
  for (int n = 0; n <= max_n; ++n) modes.push_back({n, sphere_eigenvalue(n), sphere_multiplicity(n)});
  return modes;
}

ModeShooter::ModeShooter(const CoefficientProfiles& profiles, const MuCoefficients& mus)
    : kappa_(profiles.kappa),
      mu7_(mus.mu7),
      mu9_(mus.mu9),
      e1_(profiles.y, profiles.e1),
      e2_(profiles.y, profiles.e2),
      e3_(profiles.y, profiles.e3),
      e4_(profiles.y, profiles.e4) {}

double ModeShooter::initial_slope(double lambda) const { return -(lambda + mu7_) / mu9_ * kappa_; }

ShootingResult ModeShooter::shoot(double lambda, double rel_tol, double e4_scale) const {
  const double k = kappa_;
  const double k2 = k * k;
  auto rhs = [&](double y, const Vec2& s) {
    const double a = e1_(y);
    const double acc = (-k2 * e4_scale * e4_(y) - k * e2_(y) * s[1] - k2 * (e3_(y) - lambda) * s[0]) / a;
    return Vec2(s[1], acc);
  };
  ShootingResult out;
  out.sup_abs_v = 1.0;
  auto observer = [&](const ode::DenseStep<double, 2>& step) {
    out.sup_abs_v = std::max(out.sup_abs_v, std::abs(step.y_end()[0]));
    return true;
  };
  const auto result = ode::integrate(rhs, 0.0, Vec2(1.0, initial_slope(lambda)), 1.0, tolerances(rel_tol), observer);
  if (result.status != ode::Status::Completed) {
    throw StepFailure("mode shooting failed at y = " + std::to_string(result.x));
  }
  out.v_end = result.y[0];
  out.slope_end = result.y[1];
  out.steps = result.accepted;
  return out;
}

double mode_margin(int n, const CoefficientProfiles& profiles, const MuCoefficients& mus, double rel_tol) {
  return ModeShooter(profiles, mus).shoot(sphere_eigenvalue(n), rel_tol).v_end;
}

bool hopf_excludes(int n, const CoefficientProfiles& profiles, const MuCoefficients& mus) {
  const double lambda = sphere_eigenvalue(n);
  return profiles.e4.maxCoeff() <= 0.0 && profiles.e3.maxCoeff() < lambda - kHopfMargin &&
         lambda + mus.mu7 > kHopfMargin;
}

double EnergyForm::sup_abs_alpha() const { return sup_abs(alpha); }
double EnergyForm::sup_abs_beta() const { return sup_abs(beta); }

EnergyForm energy_transform(int n, const CoefficientProfiles& profiles, const MuCoefficients& mus) {
  EnergyForm form;
  form.n = n;
  form.lambda = sphere_eigenvalue(n);
  form.kappa = profiles.kappa;
  const double k = profiles.kappa;
  const double a = -(form.lambda + mus.mu7) / mus.mu9;
  form.h_n = a * k;
  form.y = profiles.y;
  const Eigen::Index m = profiles.size();
  form.p_n.resize(m);
  form.z.resize(m);
  form.alpha.resize(m);
  form.beta.resize(m);

  // (log p_n, z) along y: (log p)' = 2h + k e2/e1, z' = 1/p.
  const CubicSpline e1(profiles.y, profiles.e1);
  const CubicSpline e2(profiles.y, profiles.e2);
  const double h = form.h_n;
  auto rhs = [&](double y, const Vec2& s) { return Vec2(2.0 * h + k * e2(y) / e1(y), std::exp(-s[0])); };
  Eigen::VectorXd log_p(m);
  log_p[0] = 0.0;
  form.z[0] = 0.0;
  ode::DenseSampler<double, 2, std::function<bool(std::size_t, double, const Vec2&)>> sampler(
      profiles.y, 1.0, [&](std::size_t i, double, const Vec2& s) {
        log_p[static_cast<Eigen::Index>(i)] = s[0];
        form.z[static_cast<Eigen::Index>(i)] = s[1];
        return true;
      });
  const auto result = ode::integrate(rhs, profiles.y[0], Vec2(0.0, 0.0), profiles.y[m - 1], tolerances(1e-12),
                                     [&](const ode::DenseStep<double, 2>& step) { return sampler(step); });
  if (result.status != ode::Status::Completed) throw StepFailure("integrating factor integration failed");
  log_p[0] = 0.0;
  form.z[0] = 0.0;
  form.z_star = form.z[m - 1];

  for (Eigen::Index i = 0; i < m; ++i) {
    const double p = std::exp(log_p[i]);
    const double p2 = p * p;
    const double q1 = profiles.e1[i];
    form.p_n[i] = p;
    form.alpha[i] = p2 * (a * a + a * profiles.e2[i] / q1 + (profiles.e3[i] - form.lambda) / q1);
    form.beta[i] = -p2 * std::exp(-h * profiles.y[i]) * profiles.e4[i] / q1;
  }
  return form;
}

EnergySolution solve_energy_form(const EnergyForm& form, double rel_tol) {
  // w_zz = k^2 (beta - alpha w) written in y (dz/dy = 1/p) so the splines see
  // log p, alpha/p^2 and beta/p^2 instead of the steep alpha(z), beta(z).
  const Eigen::VectorXd log_p = form.p_n.array().log();
  const Eigen::VectorXd p2 = form.p_n.array().square();
  const CubicSpline log_p_of(form.y, log_p);
  const CubicSpline alpha(form.y, form.alpha.cwiseQuotient(p2));
  const CubicSpline beta(form.y, form.beta.cwiseQuotient(p2));
  const double k2 = form.kappa * form.kappa;
  auto rhs = [&](double y, const Vec2& s) {
    const double lp = log_p_of(y);
    return Vec2(s[1] * std::exp(-lp), k2 * std::exp(lp) * (beta(y) - alpha(y) * s[0]));
  };
  const double y_end = form.y[form.y.size() - 1];
  const auto result = ode::integrate(rhs, form.y[0], Vec2(1.0, 0.0), y_end, tolerances(rel_tol));
  if (result.status != ode::Status::Completed) throw StepFailure("energy-form integration failed");
  EnergySolution sol;
  sol.w_end = result.y[0];
  sol.v_end = std::exp(form.h_n) * sol.w_end;
  return sol;
}

KappaBound energy_kappa_bound_terms(const EnergyForm& form) {
  return {bound_term(form.z_star, form.sup_abs_alpha()), bound_term(form.z_star, form.sup_abs_beta())};
}

double energy_kappa_bound(int /*n*/, const EnergyForm& form) { return energy_kappa_bound_terms(form).value(); }

const char* to_string(ExclusionMethod method) {
  switch (method) {
    case ExclusionMethod::HopfExcluded:
      return "HopfExcluded";
    case ExclusionMethod::EnergyBoundExcluded:
      return "EnergyBoundExcluded";
    case ExclusionMethod::NumericMargin:
      return "NumericMargin";
    case ExclusionMethod::Inconclusive:
      return "Inconclusive";
  }
  return "Inconclusive";
}

const char* to_string(TailStatus status) {
  return status == TailStatus::HopfCoversTail ? "HopfCoversTail" : "Unverified";
}

std::string OverallVerdict::label() const {
  switch (kind) {
    case Kind::Holds:
      return "Holds";
    case Kind::Fails:
      return "Fails(" + std::to_string(failing_mode) + ")";
    case Kind::Inconclusive:
      return "Inconclusive";
  }
  return "Inconclusive";
}

double SConditionReport::min_abs_margin() const {
  double m = std::numeric_limits<double>::infinity();
  for (const auto& v : verdicts) m = std::min(m, std::abs(v.margin));
  return m;
}

SConditionReport check_s_condition(const CoefficientProfiles& profiles, const MuCoefficients& mus,
                                   const SConditionOptions& options) {
  const ModeShooter shooter(profiles, mus);
  const double refined_tol = options.rel_tol * options.refine_factor;

  SConditionReport report;
  report.kappa = profiles.kappa;
  report.t_s = profiles.t_s;
  report.t_star = e4_sign_threshold(profiles.gamma);

  for (int n = 0; n <= options.n_max; ++n) {
    ModeVerdict verdict;
    verdict.n = n;
    verdict.lambda = sphere_eigenvalue(n);
    verdict.multiplicity = sphere_multiplicity(n);
    verdict.hopf = hopf_excludes(n, profiles, mus);

    const ShootingResult base = shooter.shoot(verdict.lambda, options.rel_tol);
    const ShootingResult refined = shooter.shoot(verdict.lambda, refined_tol);
    verdict.margin = base.v_end;
    verdict.margin_refined = refined.v_end;
    verdict.margin_threshold = options.margin_tol * std::max(1.0, std::max(base.sup_abs_v, refined.sup_abs_v));
    const bool resolved = std::abs(base.v_end) >= verdict.margin_threshold &&
                          std::abs(refined.v_end) >= verdict.margin_threshold &&
                          (base.v_end > 0) == (refined.v_end > 0);

    if (verdict.hopf) {
      verdict.method = ExclusionMethod::HopfExcluded;
    } else {
      if (options.use_energy_bound) {
        const double bound = energy_kappa_bound(n, energy_transform(n, profiles, mus));
        verdict.kappa_bound = bound;
        if (profiles.kappa < bound) verdict.method = ExclusionMethod::EnergyBoundExcluded;
      }
      if (verdict.method != ExclusionMethod::EnergyBoundExcluded) {
        if (resolved) {
          verdict.method = ExclusionMethod::NumericMargin;
        } else {
          verdict.method = ExclusionMethod::Inconclusive;
          const double lo = shooter.shoot(verdict.lambda, refined_tol, 1.0 - options.crossing_probe).v_end;
          const double hi = shooter.shoot(verdict.lambda, refined_tol, 1.0 + options.crossing_probe).v_end;
          verdict.zero_crossing_confirmed = (lo > 0) != (hi > 0);
        }
      }
    }
    report.verdicts.push_back(verdict);
    report.n_checked = n;
    if (verdict.hopf) {
      // The Hopf conditions are monotone in lambda_n, so every higher mode is excluded too.
      report.tail_status = TailStatus::HopfCoversTail;
      break;
    }
  }

  if (report.tail_status == TailStatus::Unverified) {
    report.warnings.push_back("TailUnverifiable: maximum principle never applies up to n_max = " +
                              std::to_string(options.n_max) + "; modes above are unchecked");
  }

  OverallVerdict& overall = report.overall;
  for (const auto& v : report.verdicts) {
    if (v.zero_crossing_confirmed) {
      overall.kind = OverallVerdict::Kind::Fails;
      overall.failing_mode = v.n;
      return report;
    }
    if (v.method == ExclusionMethod::Inconclusive) overall.inconclusive_modes.push_back(v.n);
  }
  overall.kind = overall.inconclusive_modes.empty() && report.tail_status == TailStatus::HopfCoversTail
                     ? OverallVerdict::Kind::Holds
                     : OverallVerdict::Kind::Inconclusive;
  return report;
}

SConditionReport check_s_condition(const BackgroundSolution& bg, const SConditionOptions& options,
                                   Eigen::Index n_samples) {
  return check_s_condition(coefficient_profiles(bg, n_samples), compute_mu(bg), options);
}

}  // namespace shockshell
