#pragma once

// Orchestration of single runs and scans, and JSON/CSV report emission.
// Reports are nlohmann::json documents (keys sorted), printed with two-space
// indentation and shortest round-trip numbers, so a parse/print cycle
// reproduces the bytes exactly.

#include <exception>
#include <string>
#include <vector>

#include <json.hpp>

#include "shockshell/config.hpp"
#include "shockshell/transport_suite.hpp"

namespace shockshell {

/// Process exit codes.
enum ExitCode : int {
  kExitOk = 0,
  kExitUsage = 1,              // bad config or flags
  kExitBackPressureRange = 2,  // back pressure outside the admissible interval
  kExitSonic = 3,              // flow within the sonic guard of M = 1
  kExitInvariant = 4,          // broken invariant or sign
  kExitNumerical = 5,          // any other numerical failure
};

/// Maps a caught exception to its exit code.
int exit_code_for(const std::exception& error);

inline constexpr const char* kToolName = "shockshell";
const char* tool_version();

struct ReportEnvelope {
  nlohmann::json document;
  int exit_code = kExitOk;

  /// Pretty JSON terminated by a newline.
  std::string serialize() const;
};

/// The document without its "timing" section (recursively).
nlohmann::json without_timing(nlohmann::json document);

/// config, background, mu, profiles, provenance, timing, warnings.
ReportEnvelope run_background(const RunConfig& config);
/// As run_background plus the s_condition section.
ReportEnvelope run_scondition(const RunConfig& config);

struct ScanRow {
  std::size_t i_pressure = 0, i_mach = 0, i_back = 0;
  double pressure_multiplier = 0;
  double mach = 0;
  /// Configured value (absolute or fraction) and the resolved absolute one.
  double back_pressure_input = 0;
  double back_pressure = 0;
  double r_b = 0;
  double t_s = 0;
  double kappa = 0;
  /// Holds, Fails(n), Inconclusive, or Error for a failed cell.
  std::string verdict;
  double min_abs_margin = 0;
  std::string tail_status;
  int exit_code = 0;
  std::string error;
};

struct ScanResult {
  std::vector<ScanRow> rows;
  /// Envelope with config, one cell envelope per row, provenance and timing.
  ReportEnvelope envelope;

  std::string csv() const;
};

struct ScanOptions {
  /// 0 means thread_cap().
  unsigned threads = 0;
};

/// Runs every cell of config.scan; rows are ordered lexicographically by grid
/// index regardless of scheduling. Throws ConfigError without a scan grid.
ScanResult run_scan(const RunConfig& config, const ScanOptions& options = {});

/// The config of one scan cell.
RunConfig scan_cell_config(const RunConfig& config, std::size_t i_pressure, std::size_t i_mach, std::size_t i_back);

/// The manufactured-solution suite of the form transport solver.
ReportEnvelope run_transport_demo(const RunConfig& config, unsigned threads = 1);

nlohmann::json to_json(const RunConfig& config);
nlohmann::json to_json(const TransportSuiteReport& report);

}  // namespace shockshell
