#pragma once

// Run configuration: TOML file plus command-line overrides.
//
//   gamma = 1.4
//   r0 = 1.0
//   r1 = 2.0
//   back_pressure = 3.52          # or back_pressure_fraction = 0.5
//   n_max = 64
//   seed = 7
//   [inflow]      p, rho, mach at r0
//   [tolerances]  ode_rel, ode_abs, margin_tol, shock_tol
//   [scan]        pressure_multiplier, mach, back_pressure | back_pressure_fraction

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "shockshell/background.hpp"
#include "shockshell/gas_dynamics.hpp"
#include "shockshell/s_condition.hpp"

namespace shockshell {

struct Tolerances {
  double ode_rel = 1e-10;
  double ode_abs = 1e-12;
  double margin_tol = 1e-6;
  double shock_tol = 1e-10;
};

struct InflowConfig {
  double p = 1.0;
  double rho = 1.0;
  double mach = 2.0;
};

/// How a back-pressure value is read.
enum class BackPressureMode { Absolute, Fraction };

/// Grid over (inflow pressure multiplier, inflow Mach, back pressure). In
/// fraction mode a back pressure b means p_lo + b (p_hi - p_lo) of the
/// admissible interval of that cell.
struct ScanGrid {
  std::vector<double> pressure_multiplier;
  std::vector<double> mach;
  std::vector<double> back_pressure;
  BackPressureMode mode = BackPressureMode::Absolute;

  std::size_t size() const { return pressure_multiplier.size() * mach.size() * back_pressure.size(); }
};

struct RunConfig {
  double gamma = 1.4;
  double r0 = 1.0;
  double r1 = 2.0;
  InflowConfig inflow;
  /// Absolute value or interval fraction, see back_pressure_mode.
  std::optional<double> back_pressure;
  BackPressureMode back_pressure_mode = BackPressureMode::Absolute;
  std::optional<ScanGrid> scan;
  Tolerances tolerances;
  int n_max = 64;
  std::uint64_t seed = 7;

  /// Throws ConfigError on non-positive physical fields, r0 >= r1, mach <= 1,
  /// gamma <= 1, bad tolerances, or an empty scan axis.
  void validate() const;
  GasState inflow_state() const;
  IntegrationSettings integration() const;
  ShockSearchSettings shock_search() const;
  SConditionOptions s_condition_options() const;
};

RunConfig parse_config(const std::string& toml_text, const std::string& source = "<string>");
RunConfig load_config(const std::string& path);

struct ConfigOverrides {
  std::optional<double> gamma;
  std::optional<double> back_pressure;
  std::optional<int> n_max;
  std::optional<double> tol_ode_rel;
  std::optional<double> tol_ode_abs;
  std::optional<double> tol_margin;
  std::optional<double> tol_shock;
};

/// Flags win over the file. An absolute --back-pressure replaces a
/// configured fraction.
void apply(RunConfig& config, const ConfigOverrides& overrides);

const char* to_string(BackPressureMode mode);

}  // namespace shockshell
