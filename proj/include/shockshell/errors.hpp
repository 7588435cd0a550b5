#pragma once

#include <stdexcept>
#include <string>

namespace shockshell {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Upstream state handed to the jump solver is not strictly supersonic.
class NotSupersonic : public Error {
 public:
  explicit NotSupersonic(double mach_squared)
      : Error("state is not supersonic (M^2 = " + std::to_string(mach_squared) + ")"),
        mach_squared_(mach_squared) {}
  double mach_squared() const { return mach_squared_; }

 private:
  double mach_squared_;
};

/// Radial integration came within the sonic guard of M^2 = 1.
class SonicApproach : public Error {
 public:
  SonicApproach(double radius, double mach_squared)
      : Error("flow approaches the sonic point at r = " + std::to_string(radius) +
              " (M^2 = " + std::to_string(mach_squared) + ")"),
        radius_(radius),
        mach_squared_(mach_squared) {}
  double radius() const { return radius_; }
  double mach_squared() const { return mach_squared_; }

 private:
  double radius_;
  double mach_squared_;
};

/// Adaptive step controller underflowed its minimum step or ran out of steps.
class StepFailure : public Error {
 public:
  using Error::Error;
};

/// Requested back pressure lies outside the open admissible interval.
class BackPressureOutOfRange : public Error {
 public:
  BackPressureOutOfRange(double p_back, double p_lo, double p_hi)
      : Error("back pressure " + std::to_string(p_back) + " outside admissible interval (" +
              std::to_string(p_lo) + ", " + std::to_string(p_hi) + ")"),
        p_back_(p_back),
        p_lo_(p_lo),
        p_hi_(p_hi) {}
  double p_back() const { return p_back_; }
  double p_lo() const { return p_lo_; }
  double p_hi() const { return p_hi_; }

 private:
  double p_back_;
  double p_lo_;
  double p_hi_;
};

/// Exit pressure is not strictly monotone in the shock radius on the sweep.
class NonMonotoneResidual : public Error {
 public:
  using Error::Error;
};

/// A printed sign of a linearization coefficient failed.
class SignViolation : public Error {
 public:
  explicit SignViolation(std::string name)
      : Error("sign invariant violated for " + name), name_(std::move(name)) {}
  const std::string& name() const { return name_; }

 private:
  std::string name_;
};

/// Generic broken invariant (first-integral drift, malformed samples, ...).
class InvariantViolation : public Error {
 public:
  using Error::Error;
};

/// Vector field is not transverse to the x0 = const slices.
class NotTransverse : public Error {
 public:
  using Error::Error;
};

/// Bad user configuration.
class ConfigError : public Error {
 public:
  using Error::Error;
};

}  // namespace shockshell
