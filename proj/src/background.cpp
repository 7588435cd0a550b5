#include "shockshell/background.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <functional>
#include <limits>
#include <string>

#include "shockshell/errors.hpp"
#include "shockshell/ode.hpp"

namespace shockshell {

namespace {

using Vec3 = Eigen::Vector3d;

GasState to_state(const Vec3& y, double gamma) { return {y[2], y[1], y[0], gamma}; }
Vec3 to_vector(const GasState& s) { return {s.u0, s.rho, s.p}; }

double relative_gap(double a, double b) { return std::abs(a - b) / std::abs(b); }

double drift_of(const FirstIntegrals& ref, const GasState& s, double radius) {
  const FirstIntegrals here = FirstIntegrals::of(s, radius);
  return std::max({relative_gap(here.mass_flux, ref.mass_flux), relative_gap(here.energy, ref.energy),
                   relative_gap(here.entropy, ref.entropy)});
}

bool on_branch(double t, Regime regime) {
  return regime == Regime::Supersonic ? t > 1.0 + kSonicGuard : t < 1.0 - kSonicGuard;
}

void check_regime(const GasState& s, Regime regime) {
  const double t = s.mach_squared();
  if (on_branch(t, regime)) return;
  if (regime == Regime::Supersonic) throw NotSupersonic(t);
  throw InvariantViolation("start state is not subsonic (M^2 = " + std::to_string(t) + ")");
}

ode::Options<double> options_from(const IntegrationSettings& s) {
  ode::Options<double> opt;
  opt.rel_tol = s.rel_tol;
  opt.abs_tol = s.abs_tol;
  return opt;
}

// Integrates the radial system and calls sink(index, r, state) at each of the
// requested radii. Throws on sonic approach or controller failure.
template <typename Sink>
GasState integrate_branch(const GasState& start, double r_start, double r_end, Regime regime,
                          const IntegrationSettings& settings, const Eigen::VectorXd& sample_radii, Sink sink) {
  const double gamma = start.gamma;
  auto rhs = [gamma](double r, const Vec3& y) { return radial_flow_rhs(r, y, gamma); };
  const double dir = r_end >= r_start ? 1.0 : -1.0;
  double last_t = start.mach_squared();
  double last_r = r_start;
  auto guard = [&](double r, const Vec3& y) {
    const double t = to_state(y, gamma).mach_squared();
    if (!std::isfinite(t) || !on_branch(t, regime) || !(y.array() > 0).all()) {
      throw SonicApproach(r, t);
    }
    last_t = t;
    last_r = r;
  };
  ode::DenseSampler<double, 3, std::function<bool(std::size_t, double, const Vec3&)>> sampler(
      sample_radii, dir, [&](std::size_t i, double r, const Vec3& y) {
        guard(r, y);
        sink(i, r, to_state(y, gamma));
        return true;
      });
  auto observer = [&](const ode::DenseStep<double, 3>& step) {
    guard(step.x_end(), step.y_end());
    return sampler(step);
  };
  const auto result = ode::integrate(rhs, r_start, to_vector(start), r_end, options_from(settings), observer);
  switch (result.status) {
    case ode::Status::Completed:
      break;
    case ode::Status::StepUnderflow:
    case ode::Status::MaxStepsExceeded:
      if (std::abs(last_t - 1.0) < 1e-2) throw SonicApproach(last_r, last_t);
      throw StepFailure("radial integration failed near r = " + std::to_string(result.x));
    case ode::Status::Stopped:
      break;
  }
  return to_state(result.y, gamma);
}

GasState integrate_endpoint(const GasState& start, double r_start, double r_end, Regime regime,
                            const IntegrationSettings& settings) {
  if (r_start == r_end) return start;
  return integrate_branch(start, r_start, r_end, regime, settings, Eigen::VectorXd(),
                          [](std::size_t, double, const GasState&) {});
}

SubsonicExtension extend_subsonic(const GasState& downstream, double r_b, double r0, double r1,
                                  const IntegrationSettings& settings) {
  SubsonicExtension ext;
  ext.h_target = std::min(0.05 * (r1 - r0), 0.5 * r_b);
  const double gamma = downstream.gamma;
  auto rhs = [gamma](double r, const Vec3& y) { return radial_flow_rhs(r, y, gamma); };
  // Backward integration raises M^2; stop well before the singular point.
  constexpr double kStopGap = 1e-3;
  double reached = r_b;
  auto observer = [&](const ode::DenseStep<double, 3>& step) {
    const GasState s = to_state(step.y_end(), gamma);
    if (!(step.y_end().array() > 0).all() || !(s.mach_squared() < 1.0 - kStopGap)) return false;
    reached = step.x_end();
    return true;
  };
  const auto result =
      ode::integrate(rhs, r_b, to_vector(downstream), r_b - ext.h_target, options_from(settings), observer);
  ext.limited_by_sonic = result.status != ode::Status::Completed;
  ext.h_achieved = r_b - reached;
  return ext;
}

}  // namespace

const char* to_string(Regime regime) { return regime == Regime::Supersonic ? "supersonic" : "subsonic"; }

FirstIntegrals FirstIntegrals::of(const GasState& s, double radius) {
  return {s.rho * s.u0 * radius * radius, s.energy(), s.entropy()};
}

Eigen::VectorXd FlowBranch::mach_squared() const {
  Eigen::VectorXd t(static_cast<Eigen::Index>(states.size()));
  for (std::size_t i = 0; i < states.size(); ++i) t[static_cast<Eigen::Index>(i)] = states[i].mach_squared();
  return t;
}

Eigen::Vector3d radial_flow_rhs(double radius, const Eigen::Vector3d& y, double gamma) {
  const double u = y[0];
  const double rho = y[1];
  const double p = y[2];
  const double c2 = gamma * p / rho;
  const double denom = radius * (u * u - c2);
  return {2.0 * c2 * u / denom, -2.0 * rho * u * u / denom, -2.0 * rho * c2 * u * u / denom};
}

FlowBranch integrate_radial_flow(const GasState& start, double r_start, double r_end, Regime regime,
                                 const IntegrationSettings& settings) {
  validate(start);
  check_regime(start, regime);
  if (!(r_start > 0) || !(r_end > 0)) throw InvariantViolation("radii must be positive");

  FlowBranch branch;
  branch.gamma = start.gamma;
  branch.r_start = std::min(r_start, r_end);
  branch.r_end = std::max(r_start, r_end);
  branch.regime = regime;
  branch.first_integrals = FirstIntegrals::of(start, r_start);

  if (r_start == r_end) {
    branch.radii = Eigen::VectorXd::Constant(1, r_start);
    branch.states = {start};
    return branch;
  }

  const auto n = static_cast<Eigen::Index>(std::max<std::size_t>(settings.n_samples, 2));
  Eigen::VectorXd radii = Eigen::VectorXd::LinSpaced(n, r_start, r_end);
  radii[n - 1] = r_end;
  std::vector<GasState> states(static_cast<std::size_t>(n));
  states[0] = start;
  integrate_branch(start, r_start, r_end, regime, settings, radii,
                   [&](std::size_t i, double, const GasState& s) { states[i] = s; });
  states[0] = start;

  if (r_end < r_start) {
    radii.reverseInPlace();
    std::reverse(states.begin(), states.end());
  }
  branch.radii = std::move(radii);
  branch.states = std::move(states);

  for (Eigen::Index i = 0; i < n; ++i) {
    branch.max_drift = std::max(branch.max_drift, drift_of(branch.first_integrals,
                                                           branch.states[static_cast<std::size_t>(i)],
                                                           branch.radii[i]));
  }
  const double drift_limit = std::max(1e-8, 1e3 * settings.rel_tol);
  if (!(branch.max_drift < drift_limit)) {
    char msg[96];
    std::snprintf(msg, sizeof msg, "first-integral drift %.3e exceeds %.3e", branch.max_drift, drift_limit);
    throw InvariantViolation(msg);
  }
  return branch;
}

MachProfile mach_squared_profile(double gamma, double t_start, double r_start, double r_end,
                                 const IntegrationSettings& settings) {
  if (!(t_start >= 0) || std::abs(t_start - 1.0) <= kSonicGuard) {
    throw SonicApproach(r_start, t_start);
  }
  MachProfile profile;
  if (r_start == r_end) {
    profile.radii = Eigen::VectorXd::Constant(1, r_start);
    profile.mach_squared = Eigen::VectorXd::Constant(1, t_start);
    return profile;
  }
  const auto n = static_cast<Eigen::Index>(std::max<std::size_t>(settings.n_samples, 2));
  profile.radii = Eigen::VectorXd::LinSpaced(n, r_start, r_end);
  profile.radii[n - 1] = r_end;
  profile.mach_squared = Eigen::VectorXd::Zero(n);
  profile.mach_squared[0] = t_start;
  const bool supersonic = t_start > 1.0;
  using Vec1 = Eigen::Matrix<double, 1, 1>;
  auto rhs = [gamma](double r, const Vec1& y) {
    const double t = y[0];
    return Vec1(2.0 * t / r * (2.0 + (gamma - 1.0) * t) / (t - 1.0));
  };
  auto guard = [&](double r, double t) {
    if (!std::isfinite(t) || (supersonic ? t <= 1.0 + kSonicGuard : t >= 1.0 - kSonicGuard)) {
      throw SonicApproach(r, t);
    }
  };
  const double dir = r_end >= r_start ? 1.0 : -1.0;
  ode::DenseSampler<double, 1, std::function<bool(std::size_t, double, const Vec1&)>> sampler(
      profile.radii, dir, [&](std::size_t i, double r, const Vec1& y) {
        guard(r, y[0]);
        profile.mach_squared[static_cast<Eigen::Index>(i)] = y[0];
        return true;
      });
  auto observer = [&](const ode::DenseStep<double, 1>& step) {
    guard(step.x_end(), step.y_end()[0]);
    return sampler(step);
  };
  const auto result = ode::integrate(rhs, r_start, Vec1(t_start), r_end, options_from(settings), observer);
  if (result.status != ode::Status::Completed) {
    throw SonicApproach(result.x, result.y[0]);
  }
  profile.mach_squared[0] = t_start;
  if (dir < 0) {
    profile.radii.reverseInPlace();
    profile.mach_squared.reverseInPlace();
  }
  return profile;
}

double exit_pressure(const GasState& inflow, double r0, double r_b, double r1, const IntegrationSettings& settings) {
  validate(inflow);
  check_regime(inflow, Regime::Supersonic);
  const GasState ahead = integrate_endpoint(inflow, r0, r_b, Regime::Supersonic, settings);
  const ShockJump jump = rh_normal_jump(ahead, r_b);
  return integrate_endpoint(jump.downstream, r_b, r1, Regime::Subsonic, settings).p;
}

ExitPressure forward_exit_pressure(const GasState& inflow, double r0, double r_b, double r1,
                                   const IntegrationSettings& settings) {
  if (!(r0 < r1) || !(r_b >= r0) || !(r_b <= r1)) {
    throw InvariantViolation("shock radius must lie in [r0, r1]");
  }
  ExitPressure out;
  BackgroundSolution& bg = out.solution;
  bg.gamma = inflow.gamma;
  bg.r0 = r0;
  bg.r1 = r1;
  bg.r_b = r_b;
  bg.supersonic = integrate_radial_flow(inflow, r0, r_b, Regime::Supersonic, settings);
  bg.jump = rh_normal_jump(bg.supersonic.back(), r_b);
  bg.subsonic = integrate_radial_flow(bg.jump.downstream, r_b, r1, Regime::Subsonic, settings);
  bg.p_exit = bg.subsonic.back().p;
  bg.extension = extend_subsonic(bg.jump.downstream, r_b, r0, r1, settings);
  out.p_exit = bg.p_exit;
  return out;
}

BackPressureInterval admissible_backpressure_interval(const GasState& inflow, double r0, double r1,
                                                      const IntegrationSettings& settings) {
  const double at_entry = exit_pressure(inflow, r0, r0, r1, settings);
  const double at_exit = exit_pressure(inflow, r0, r1, r1, settings);
  BackPressureInterval interval;
  interval.decreasing_in_rb = at_entry > at_exit;
  interval.p_lo = std::min(at_entry, at_exit);
  interval.p_hi = std::max(at_entry, at_exit);
  return interval;
}

BackgroundSolution find_shock_position(const GasState& inflow, double p_back, double r0, double r1,
                                       const ShockSearchSettings& settings) {
  if (!(r0 > 0) || !(r0 < r1)) throw InvariantViolation("shell radii must satisfy 0 < r0 < r1");
  const std::size_t n = std::max<std::size_t>(settings.sweep_points, 3);
  std::vector<double> radius(n);
  std::vector<double> residual(n);
  for (std::size_t i = 0; i < n; ++i) {
    radius[i] = i + 1 == n ? r1 : r0 + (r1 - r0) * static_cast<double>(i) / static_cast<double>(n - 1);
    residual[i] = exit_pressure(inflow, r0, radius[i], r1, settings.integration) - p_back;
  }

  const double p_lo = std::min(residual.front(), residual.back()) + p_back;
  const double p_hi = std::max(residual.front(), residual.back()) + p_back;
  const double first_step = residual[1] - residual[0];
  for (std::size_t i = 1; i < n; ++i) {
    const double step = residual[i] - residual[i - 1];
    if (!(step * first_step > 0)) {
      throw NonMonotoneResidual("exit pressure is not strictly monotone in r_b between r = " +
                                std::to_string(radius[i - 1]) + " and r = " + std::to_string(radius[i]));
    }
  }
  if (!(p_back > p_lo && p_back < p_hi)) throw BackPressureOutOfRange(p_back, p_lo, p_hi);

  std::size_t k = 0;
  while (k + 1 < n && residual[k] * residual[k + 1] > 0) ++k;
  double a = radius[k];
  double b = radius[k + 1];
  double fa = residual[k];
  double r_b = residual[k] == 0 ? a : b;
  if (residual[k] != 0 && residual[k + 1] != 0) {
    const double tol = settings.residual_tol * p_back;
    for (int iter = 0; iter < 200; ++iter) {
      const double mid = 0.5 * (a + b);
      const double fm = exit_pressure(inflow, r0, mid, r1, settings.integration) - p_back;
      r_b = mid;
      if (std::abs(fm) < tol || (b - a) < 4.0 * std::numeric_limits<double>::epsilon() * r1) break;
      if ((fm > 0) == (fa > 0)) {
        a = mid;
        fa = fm;
      } else {
        b = mid;
      }
    }
  }

  BackgroundSolution bg = forward_exit_pressure(inflow, r0, r_b, r1, settings.integration).solution;
  validate(bg, std::max(1e-8, 1e3 * settings.integration.rel_tol));
  return bg;
}

void validate(const BackgroundSolution& bg, double tol) {
  auto require = [](bool ok, const char* what) {
    if (!ok) throw InvariantViolation(std::string("background invariant failed: ") + what);
  };
  require(bg.r0 < bg.r_b && bg.r_b < bg.r1, "r0 < r_b < r1");
  const GasState& up = bg.jump.upstream;
  const GasState& down = bg.jump.downstream;
  require(bg.supersonic.back().p == up.p && bg.supersonic.back().rho == up.rho && bg.supersonic.back().u0 == up.u0,
          "supersonic end state equals jump upstream");
  require(bg.subsonic.front().p == down.p && bg.subsonic.front().rho == down.rho &&
              bg.subsonic.front().u0 == down.u0,
          "subsonic start state equals jump downstream");
  require(down.p > up.p, "entropy condition p+ > p-");
  require(up.mach_squared() > 1.0 && down.mach_squared() < 1.0, "t- > 1 > t+");
  require(bg.jump.max_residual() < 1e-12, "Rankine-Hugoniot residuals");
  require(bg.supersonic.max_drift < tol && bg.subsonic.max_drift < tol, "first-integral drift");
  require(bg.extension.h_achieved > 0, "subsonic branch extends below r_b");
}

}  // namespace shockshell
