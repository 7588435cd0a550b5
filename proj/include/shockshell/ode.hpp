#pragma once

// Dormand-Prince 5(4) embedded pair with the 4th-order continuous extension
// (Hairer, Norsett & Wanner, "Solving ODEs I", section II.6). The state is a
// fixed- or dynamic-size Eigen column vector; the integrator works in either
// direction of the independent variable.

#include <Eigen/Core>
#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>

namespace shockshell::ode {

template <typename Scalar>
struct Options {
  Scalar rel_tol = Scalar(1e-10);
  Scalar abs_tol = Scalar(1e-12);
  /// Initial step; zero selects one automatically.
  Scalar initial_step = 0;
  /// Steps smaller than min_step_factor * max(1, |x|) count as underflow.
  Scalar min_step_factor = Scalar(1e-14);
  std::size_t max_steps = 1'000'000;
};

enum class Status { Completed, Stopped, StepUnderflow, MaxStepsExceeded };

template <typename Scalar, int Dim>
struct Result {
  using State = Eigen::Matrix<Scalar, Dim, 1>;
  Status status = Status::Completed;
  Scalar x{};
  State y;
  std::size_t accepted = 0;
  std::size_t rejected = 0;
};

/// One accepted step together with its dense-output polynomial.
template <typename Scalar, int Dim>
class DenseStep {
 public:
  using State = Eigen::Matrix<Scalar, Dim, 1>;

  Scalar x_begin() const { return x0_; }
  Scalar x_end() const { return x0_ + h_; }
  const State& y_begin() const { return r1_; }
  const State& y_end() const { return y1_; }

  /// Interpolated state at x in [x_begin, x_end].
  State operator()(Scalar x) const {
    const Scalar theta = (x - x0_) / h_;
    const Scalar theta1 = 1 - theta;
    return r1_ + theta * (r2_ + theta1 * (r3_ + theta * (r4_ + theta1 * r5_)));
  }

 private:
  template <typename S, int D, typename Rhs, typename Obs>
  friend Result<S, D> integrate(Rhs&&, S, const Eigen::Matrix<S, D, 1>&, S, const Options<S>&, Obs&&);

  Scalar x0_{};
  Scalar h_{};
  State y1_, r1_, r2_, r3_, r4_, r5_;
};

namespace detail {

template <typename Scalar, int Dim>
Scalar error_norm(const Eigen::Matrix<Scalar, Dim, 1>& err, const Eigen::Matrix<Scalar, Dim, 1>& y0,
                  const Eigen::Matrix<Scalar, Dim, 1>& y1, const Options<Scalar>& opt) {
  const auto scale = (opt.abs_tol + opt.rel_tol * y0.cwiseAbs().cwiseMax(y1.cwiseAbs()).array());
  return std::sqrt((err.array() / scale).square().mean());
}

}  // namespace detail

/// Integrates y' = rhs(x, y) from x_start to x_end. After every accepted step
/// observer(step) is called with the DenseStep; returning false stops the
/// integration at that step's end (Status::Stopped).
template <typename Scalar, int Dim, typename Rhs, typename Observer>
Result<Scalar, Dim> integrate(Rhs&& rhs, Scalar x_start, const Eigen::Matrix<Scalar, Dim, 1>& y_start,
                              Scalar x_end, const Options<Scalar>& opt, Observer&& observer) {
  using State = Eigen::Matrix<Scalar, Dim, 1>;
  using std::abs;

  // Butcher tableau.
  constexpr Scalar c2 = Scalar(1) / 5, c3 = Scalar(3) / 10, c4 = Scalar(4) / 5, c5 = Scalar(8) / 9;
  constexpr Scalar a21 = Scalar(1) / 5;
  constexpr Scalar a31 = Scalar(3) / 40, a32 = Scalar(9) / 40;
  constexpr Scalar a41 = Scalar(44) / 45, a42 = Scalar(-56) / 15, a43 = Scalar(32) / 9;
  constexpr Scalar a51 = Scalar(19372) / 6561, a52 = Scalar(-25360) / 2187, a53 = Scalar(64448) / 6561,
                   a54 = Scalar(-212) / 729;
  constexpr Scalar a61 = Scalar(9017) / 3168, a62 = Scalar(-355) / 33, a63 = Scalar(46732) / 5247,
                   a64 = Scalar(49) / 176, a65 = Scalar(-5103) / 18656;
  constexpr Scalar a71 = Scalar(35) / 384, a73 = Scalar(500) / 1113, a74 = Scalar(125) / 192,
                   a75 = Scalar(-2187) / 6784, a76 = Scalar(11) / 84;
  constexpr Scalar e1 = Scalar(71) / 57600, e3 = Scalar(-71) / 16695, e4 = Scalar(71) / 1920,
                   e5 = Scalar(-17253) / 339200, e6 = Scalar(22) / 525, e7 = Scalar(-1) / 40;
  constexpr Scalar d1 = Scalar(-12715105075.0L / 11282082432.0L), d3 = Scalar(87487479700.0L / 32700410799.0L),
                   d4 = Scalar(-10690763975.0L / 1880347072.0L), d5 = Scalar(701980252875.0L / 199316789632.0L),
                   d6 = Scalar(-1453857185.0L / 822651844.0L), d7 = Scalar(69997945.0L / 29380423.0L);

  Result<Scalar, Dim> result;
  result.x = x_start;
  result.y = y_start;
  if (x_end == x_start) {
    return result;
  }
  const Scalar dir = x_end > x_start ? Scalar(1) : Scalar(-1);
  const Scalar span = abs(x_end - x_start);

  Scalar x = x_start;
  State y = y_start;
  State k1 = rhs(x, y);

  Scalar h = opt.initial_step;
  if (h <= 0) {
    // Hairer's starting-step heuristic, first stage only.
    const auto scale = (opt.abs_tol + opt.rel_tol * y.cwiseAbs().array()).matrix();
    const Scalar d0 = std::sqrt((y.array() / scale.array()).square().mean());
    const Scalar d1n = std::sqrt((k1.array() / scale.array()).square().mean());
    h = (d0 < Scalar(1e-5) || d1n < Scalar(1e-5)) ? Scalar(1e-6) : Scalar(0.01) * d0 / d1n;
    h = std::min(h, span);
    const State y1 = y + dir * h * k1;
    const State k2 = rhs(x + dir * h, y1);
    const Scalar d2 = std::sqrt(((k2 - k1).array() / scale.array()).square().mean()) / h;
    const Scalar dmax = std::max(d1n, d2);
    const Scalar h1 = dmax <= Scalar(1e-15) ? std::max(Scalar(1e-6), h * Scalar(1e-3))
                                           : std::pow(Scalar(0.01) / dmax, Scalar(0.2));
    h = std::min({100 * h, h1, span});
  }

  DenseStep<Scalar, Dim> step;
  bool last_rejected = false;
  while (true) {
    if (result.accepted + result.rejected >= opt.max_steps) {
      result.status = Status::MaxStepsExceeded;
      break;
    }
    const Scalar remaining = abs(x_end - x);
    bool last = false;
    if (h >= remaining * (1 - 4 * std::numeric_limits<Scalar>::epsilon())) {
      h = remaining;
      last = true;
    }
    const Scalar min_step = opt.min_step_factor * std::max(Scalar(1), abs(x));
    if (h < min_step) {
      result.status = Status::StepUnderflow;
      break;
    }
    const Scalar hs = dir * h;
    const State k2 = rhs(x + c2 * hs, State(y + hs * a21 * k1));
    const State k3 = rhs(x + c3 * hs, State(y + hs * (a31 * k1 + a32 * k2)));
    const State k4 = rhs(x + c4 * hs, State(y + hs * (a41 * k1 + a42 * k2 + a43 * k3)));
    const State k5 = rhs(x + c5 * hs, State(y + hs * (a51 * k1 + a52 * k2 + a53 * k3 + a54 * k4)));
    const State k6 = rhs(x + hs, State(y + hs * (a61 * k1 + a62 * k2 + a63 * k3 + a64 * k4 + a65 * k5)));
    const State y_new = y + hs * (a71 * k1 + a73 * k3 + a74 * k4 + a75 * k5 + a76 * k6);
    const Scalar x_new = last ? x_end : x + hs;
    const State k7 = rhs(x_new, y_new);
    const State err = hs * (e1 * k1 + e3 * k3 + e4 * k4 + e5 * k5 + e6 * k6 + e7 * k7);
    const Scalar err_norm = detail::error_norm(err, y, y_new, opt);

    if (!std::isfinite(err_norm) || err_norm > 1) {
      ++result.rejected;
      const Scalar fac = std::isfinite(err_norm)
                             ? std::max(Scalar(0.2), Scalar(0.9) * std::pow(err_norm, Scalar(-0.2)))
                             : Scalar(0.1);
      h *= fac;
      last_rejected = true;
      continue;
    }

    ++result.accepted;
    step.x0_ = x;
    step.h_ = x_new - x;
    step.r1_ = y;
    step.r2_ = y_new - y;
    step.r3_ = hs * k1 - step.r2_;
    step.r4_ = step.r2_ - hs * k7 - step.r3_;
    step.r5_ = hs * (d1 * k1 + d3 * k3 + d4 * k4 + d5 * k5 + d6 * k6 + d7 * k7);
    step.y1_ = y_new;

    x = x_new;
    y = y_new;
    k1 = k7;
    result.x = x;
    result.y = y;

    if (!observer(static_cast<const DenseStep<Scalar, Dim>&>(step))) {
      result.status = Status::Stopped;
      break;
    }
    if (last) {
      result.status = Status::Completed;
      break;
    }
    Scalar fac = err_norm == 0 ? Scalar(10) : Scalar(0.9) * std::pow(err_norm, Scalar(-0.2));
    fac = std::clamp(fac, Scalar(0.2), Scalar(10));
    if (last_rejected) {
      fac = std::min(fac, Scalar(1));
    }
    last_rejected = false;
    h *= fac;
  }
  return result;
}

/// Overload without an observer.
template <typename Scalar, int Dim, typename Rhs>
Result<Scalar, Dim> integrate(Rhs&& rhs, Scalar x_start, const Eigen::Matrix<Scalar, Dim, 1>& y_start,
                              Scalar x_end, const Options<Scalar>& opt) {
  return integrate(std::forward<Rhs>(rhs), x_start, y_start, x_end, opt,
                   [](const DenseStep<Scalar, Dim>&) { return true; });
}

/// Samples the dense output at a sorted (in integration direction) list of
/// abscissae while integrating. Each sample is handed to sink(index, x, y);
/// the observer chain keeps the caller's own per-step hook.
template <typename Scalar, int Dim, typename Sink>
class DenseSampler {
 public:
  using State = Eigen::Matrix<Scalar, Dim, 1>;

  DenseSampler(const Eigen::Matrix<Scalar, Eigen::Dynamic, 1>& xs, Scalar direction, Sink sink)
      : xs_(xs), dir_(direction), sink_(std::move(sink)) {}

  /// Emits all samples covered by `step`; returns the sink's verdict.
  bool operator()(const DenseStep<Scalar, Dim>& step) {
    const Scalar end = step.x_end();
    while (next_ < static_cast<std::size_t>(xs_.size())) {
      const Scalar xi = xs_[static_cast<Eigen::Index>(next_)];
      if (dir_ * (xi - end) > 0) {
        break;
      }
      const State yi = (xi == end) ? step.y_end() : step(xi);
      if (!sink_(next_, xi, yi)) {
        return false;
      }
      ++next_;
    }
    return true;
  }

  std::size_t emitted() const { return next_; }

 private:
  Eigen::Matrix<Scalar, Eigen::Dynamic, 1> xs_;
  Scalar dir_;
  Sink sink_;
  std::size_t next_ = 0;
};

}  // namespace shockshell::ode
