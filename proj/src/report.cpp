#include "shockshell/report.hpp"

#include <charconv>
#include <chrono>
#include <cmath>
#include <optional>
#include <sstream>

#include "shockshell/errors.hpp"
#include "shockshell/linearization.hpp"
#include "shockshell/parallel.hpp"
#include "shockshell/s_condition.hpp"

#ifndef SHOCKSHELL_VERSION
#define SHOCKSHELL_VERSION "0.0.0"
#endif

namespace shockshell {

using nlohmann::json;

namespace {

constexpr Eigen::Index kProfileSamples = 1025;

json num(double x) { return std::isfinite(x) ? json(x) : json(nullptr); }

class Stopwatch {
 public:
  double seconds() const { return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count(); }

 private:
  std::chrono::steady_clock::time_point start_ = std::chrono::steady_clock::now();
};

const char* error_type(const std::exception& e) {
  if (dynamic_cast<const BackPressureOutOfRange*>(&e)) return "BackPressureOutOfRange";
  if (dynamic_cast<const SonicApproach*>(&e)) return "SonicApproach";
  if (dynamic_cast<const NotSupersonic*>(&e)) return "NotSupersonic";
  if (dynamic_cast<const SignViolation*>(&e)) return "SignViolation";
  if (dynamic_cast<const InvariantViolation*>(&e)) return "InvariantViolation";
  if (dynamic_cast<const NonMonotoneResidual*>(&e)) return "NonMonotoneResidual";
  if (dynamic_cast<const NotTransverse*>(&e)) return "NotTransverse";
  if (dynamic_cast<const StepFailure*>(&e)) return "StepFailure";
  if (dynamic_cast<const ConfigError*>(&e)) return "ConfigError";
  return "Error";
}

json state_json(const GasState& s) {
  return {{"p", s.p}, {"rho", s.rho}, {"u0", s.u0}, {"c2", s.c2()}, {"mach_squared", s.mach_squared()}};
}

json provenance(const RunConfig& config) {
  return {{"tool", kToolName},
          {"version", tool_version()},
          {"integrator", "Dormand-Prince 5(4), dense output"},
          {"profile_samples", kProfileSamples},
          {"tolerances",
           {{"ode_rel", config.tolerances.ode_rel},
            {"ode_abs", config.tolerances.ode_abs},
            {"margin_tol", config.tolerances.margin_tol},
            {"shock_tol", config.tolerances.shock_tol}}}};
}

double resolve_back_pressure(double value, BackPressureMode mode, const BackPressureInterval& interval) {
  return mode == BackPressureMode::Absolute ? value : interval.p_lo + value * (interval.p_hi - interval.p_lo);
}

json background_json(const BackgroundSolution& bg, const BackPressureInterval& interval, double p_back) {
  const ShockJump& j = bg.jump;
  return {{"r0", bg.r0},
          {"r1", bg.r1},
          {"r_b", bg.r_b},
          {"kappa", bg.kappa()},
          {"back_pressure", p_back},
          {"exit_pressure", bg.p_exit},
          {"interval", {{"p_lo", interval.p_lo}, {"p_hi", interval.p_hi}, {"decreasing_in_r_b", interval.decreasing_in_rb}}},
          {"jump",
           {{"upstream", state_json(j.upstream)},
            {"downstream", state_json(j.downstream)},
            {"pressure_ratio", j.downstream.p / j.upstream.p},
            {"density_ratio", j.downstream.rho / j.upstream.rho},
            {"velocity_ratio", j.downstream.u0 / j.upstream.u0},
            {"mach_product", j.mach_product()},
            {"residuals", {j.residuals[0], j.residuals[1], j.residuals[2]}},
            {"max_residual", j.max_residual()}}},
          {"first_integral_drift", {{"supersonic", bg.supersonic.max_drift}, {"subsonic", bg.subsonic.max_drift}}},
          {"subsonic_extension",
           {{"h_target", bg.extension.h_target},
            {"h_achieved", bg.extension.h_achieved},
            {"limited_by_sonic", bg.extension.limited_by_sonic}}}};
}

json mu_json(const MuCoefficients& mu) {
  const double values[10] = {mu.mu0, mu.mu1, mu.mu2, mu.mu3, mu.mu4, mu.mu5, mu.mu6, mu.mu7, mu.mu8, mu.mu9};
  // Printed signs: + for mu0, mu1, mu4, mu6; - for the rest.
  const int expected[10] = {1, 1, -1, -1, 1, -1, 1, -1, -1, -1};
  json table = json::object();
  json signs = json::object();
  for (int i = 0; i < 10; ++i) {
    const std::string name = "mu" + std::to_string(i);
    table[name] = values[i];
    signs[name] = {{"expected", expected[i] > 0 ? "+" : "-"}, {"holds", values[i] * expected[i] > 0}};
  }
  return {{"values", table},
          {"signs", signs},
          {"mu0_forms",
           {{"defining_ratio", mu.mu0},
            {"prandtl_first_power", mu.mu0_prandtl},
            {"relative_difference", mu.mu0_relative_difference},
            {"squared_variant", mu.mu0_squared_variant},
            {"squared_variant_ratio", mu.mu0_squared_variant / mu.mu0},
            {"note",
             "mu0 = (rho u0)+ / (p+ - p-) agrees with the first-power Prandtl form (g+1)/2 u0/(c^2 - u0^2); "
             "the squared-velocity variant (g+1)/2 u0^2/(c^2 - u0^2) is not an identity and differs by the "
             "factor u0+, so it is reported but never used"}}},
          {"identities",
           {{"mu7_plus_mu0_mu6", mu.mu7 + mu.mu0 * mu.mu6},
            {"mu8_plus_mu2_mu5_over_4pi_mu6", mu.mu8 + mu.mu2 * mu.mu5 / (MuCoefficients::sphere_area * mu.mu6)},
            {"mu9_plus_mu0_mu2_mu5", mu.mu9 + mu.mu0 * mu.mu2 * mu.mu5}}}};
}

json profiles_json(const CoefficientProfiles& p) {
  const double crossing = e4_sign_change(p);
  return {{"samples", p.size()},
          {"t_s", p.t_s},
          {"t_exit", p.t[p.size() - 1]},
          {"t_star", e4_sign_threshold(p.gamma)},
          {"e4_sign_change_y", crossing < 0 ? json(nullptr) : json(crossing)},
          {"e4_sign_change_x", crossing < 0 ? json(nullptr) : json(p.r_b + p.kappa * crossing)},
          {"e1_min", p.e1.minCoeff()},
          {"e2_min", p.e2.minCoeff()},
          {"e3_range", {p.e3.minCoeff(), p.e3.maxCoeff()}},
          {"e4_range", {p.e4.minCoeff(), p.e4.maxCoeff()}}};
}

json s_condition_json(const SConditionReport& r) {
  json modes = json::array();
  for (const auto& v : r.verdicts) {
    modes.push_back({{"n", v.n},
                     {"lambda", v.lambda},
                     {"multiplicity", v.multiplicity},
                     {"method", to_string(v.method)},
                     {"margin", v.margin},
                     {"margin_refined", v.margin_refined},
                     {"margin_threshold", v.margin_threshold},
                     {"hopf", v.hopf},
                     {"kappa_bound", v.kappa_bound ? num(*v.kappa_bound) : json(nullptr)},
                     {"zero_crossing_confirmed", v.zero_crossing_confirmed}});
  }
  return {{"overall", r.overall.label()},
          {"failing_mode", r.overall.failing_mode < 0 ? json(nullptr) : json(r.overall.failing_mode)},
          {"inconclusive_modes", r.overall.inconclusive_modes},
          {"tail_status", to_string(r.tail_status)},
          {"n_checked", r.n_checked},
          {"kappa", r.kappa},
          {"t_s", r.t_s},
          {"t_star", r.t_star},
          {"min_abs_margin", num(r.min_abs_margin())},
          {"modes", modes}};
}

struct RunSummary {
  std::optional<double> p_back, r_b, t_s, kappa;
  std::string verdict;
  std::string tail_status;
  double min_abs_margin = std::numeric_limits<double>::quiet_NaN();
  std::string error;
};

ReportEnvelope run_pipeline(const RunConfig& config, bool with_s_condition, RunSummary* summary) {
  ReportEnvelope env;
  json& doc = env.document;
  doc["config"] = to_json(config);
  doc["provenance"] = provenance(config);
  json warnings = json::array();
  json timing = json::object();
  const Stopwatch total;
  try {
    config.validate();
    if (!config.back_pressure) throw ConfigError("no back pressure configured");
    const GasState inflow = config.inflow_state();

    Stopwatch watch;
    const BackPressureInterval interval = admissible_backpressure_interval(inflow, config.r0, config.r1, config.integration());
    const double p_back = resolve_back_pressure(*config.back_pressure, config.back_pressure_mode, interval);
    if (summary) summary->p_back = p_back;
    const BackgroundSolution bg = find_shock_position(inflow, p_back, config.r0, config.r1, config.shock_search());
    timing["background_s"] = watch.seconds();
    doc["background"] = background_json(bg, interval, p_back);
    if (bg.extension.limited_by_sonic) {
      warnings.push_back("SubsonicExtensionLimited: backward extension below r_b stopped near the sonic point");
    }

    watch = Stopwatch();
    const MuCoefficients mu = compute_mu(bg);
    const CoefficientProfiles profiles = coefficient_profiles(bg, kProfileSamples);
    timing["linearization_s"] = watch.seconds();
    doc["mu"] = mu_json(mu);
    doc["profiles"] = profiles_json(profiles);
    if (summary) {
      summary->r_b = bg.r_b;
      summary->t_s = profiles.t_s;
      summary->kappa = bg.kappa();
    }

    if (with_s_condition) {
      watch = Stopwatch();
      const SConditionReport sc = check_s_condition(profiles, mu, config.s_condition_options());
      timing["s_condition_s"] = watch.seconds();
      doc["s_condition"] = s_condition_json(sc);
      for (const auto& w : sc.warnings) warnings.push_back(w);
      if (summary) {
        summary->verdict = sc.overall.label();
        summary->tail_status = to_string(sc.tail_status);
        summary->min_abs_margin = sc.min_abs_margin();
      }
    }
    doc["status"] = {{"exit_code", kExitOk}, {"error", nullptr}};
  } catch (const std::exception& e) {
    env.exit_code = exit_code_for(e);
    doc["status"] = {{"exit_code", env.exit_code}, {"error", {{"type", error_type(e)}, {"message", e.what()}}}};
    if (summary) {
      summary->verdict = "Error";
      summary->error = std::string(error_type(e)) + ": " + e.what();
    }
  }
  timing["total_s"] = total.seconds();
  doc["timing"] = timing;
  doc["warnings"] = warnings;
  return env;
}

void append_number(std::string& out, double v) {
  if (!std::isfinite(v)) return;
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  out.append(buf, res.ptr);
}

void append_field(std::string& out, const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) {
    out += s;
    return;
  }
  out += '"';
  for (char ch : s) {
    if (ch == '"') out += '"';
    out += ch;
  }
  out += '"';
}

}  // namespace

const char* tool_version() { return SHOCKSHELL_VERSION; }

int exit_code_for(const std::exception& e) {
  if (dynamic_cast<const BackPressureOutOfRange*>(&e)) return kExitBackPressureRange;
  if (dynamic_cast<const SonicApproach*>(&e) || dynamic_cast<const NotSupersonic*>(&e)) return kExitSonic;
  if (dynamic_cast<const InvariantViolation*>(&e) || dynamic_cast<const SignViolation*>(&e) ||
      dynamic_cast<const NonMonotoneResidual*>(&e)) {
    return kExitInvariant;
  }
  if (dynamic_cast<const ConfigError*>(&e)) return kExitUsage;
  return kExitNumerical;
}

std::string ReportEnvelope::serialize() const { return document.dump(2) + "\n"; }

json without_timing(json document) {
  if (document.is_object()) {
    document.erase("timing");
    for (auto& [_, v] : document.items()) v = without_timing(std::move(v));
  } else if (document.is_array()) {
    for (auto& v : document) v = without_timing(std::move(v));
  }
  return document;
}

json to_json(const RunConfig& c) {
  json doc = {{"gamma", c.gamma},
              {"r0", c.r0},
              {"r1", c.r1},
              {"inflow", {{"p", c.inflow.p}, {"rho", c.inflow.rho}, {"mach", c.inflow.mach}}},
              {"back_pressure", c.back_pressure ? json(*c.back_pressure) : json(nullptr)},
              {"back_pressure_mode", to_string(c.back_pressure_mode)},
              {"tolerances",
               {{"ode_rel", c.tolerances.ode_rel},
                {"ode_abs", c.tolerances.ode_abs},
                {"margin_tol", c.tolerances.margin_tol},
                {"shock_tol", c.tolerances.shock_tol}}},
              {"n_max", c.n_max},
              {"seed", c.seed}};
  if (c.scan) {
    doc["scan"] = {{"pressure_multiplier", c.scan->pressure_multiplier},
                   {"mach", c.scan->mach},
                   {"back_pressure", c.scan->back_pressure},
                   {"back_pressure_mode", to_string(c.scan->mode)}};
  }
  return doc;
}

ReportEnvelope run_background(const RunConfig& config) { return run_pipeline(config, false, nullptr); }

ReportEnvelope run_scondition(const RunConfig& config) { return run_pipeline(config, true, nullptr); }

RunConfig scan_cell_config(const RunConfig& config, std::size_t i_pressure, std::size_t i_mach, std::size_t i_back) {
  if (!config.scan) throw ConfigError("config has no [scan] grid");
  const ScanGrid& grid = *config.scan;
  RunConfig cell = config;
  cell.scan.reset();
  cell.inflow.p = config.inflow.p * grid.pressure_multiplier.at(i_pressure);
  cell.inflow.mach = grid.mach.at(i_mach);
  cell.back_pressure = grid.back_pressure.at(i_back);
  cell.back_pressure_mode = grid.mode;
  return cell;
}

ScanResult run_scan(const RunConfig& config, const ScanOptions& options) {
  if (!config.scan) throw ConfigError("config has no [scan] grid");
  config.validate();
  const ScanGrid& grid = *config.scan;
  const std::size_t n_b = grid.back_pressure.size();
  const std::size_t n_m = grid.mach.size();
  const std::size_t cells = grid.size();
  const unsigned threads = options.threads == 0 ? thread_cap() : options.threads;

  ScanResult result;
  result.rows.resize(cells);
  std::vector<json> cell_docs(cells);
  const Stopwatch total;
  parallel_for(cells, threads, [&](std::size_t idx) {
    ScanRow& row = result.rows[idx];
    row.i_pressure = idx / (n_m * n_b);
    row.i_mach = (idx / n_b) % n_m;
    row.i_back = idx % n_b;
    const RunConfig cell = scan_cell_config(config, row.i_pressure, row.i_mach, row.i_back);
    row.pressure_multiplier = grid.pressure_multiplier[row.i_pressure];
    row.mach = cell.inflow.mach;
    row.back_pressure_input = *cell.back_pressure;
    RunSummary summary;
    const ReportEnvelope env = run_pipeline(cell, true, &summary);
    row.back_pressure = summary.p_back.value_or(std::numeric_limits<double>::quiet_NaN());
    row.r_b = summary.r_b.value_or(std::numeric_limits<double>::quiet_NaN());
    row.t_s = summary.t_s.value_or(std::numeric_limits<double>::quiet_NaN());
    row.kappa = summary.kappa.value_or(std::numeric_limits<double>::quiet_NaN());
    row.verdict = summary.verdict;
    row.min_abs_margin = summary.min_abs_margin;
    row.tail_status = summary.tail_status;
    row.exit_code = env.exit_code;
    row.error = summary.error;
    cell_docs[idx] = {{"grid_index", {row.i_pressure, row.i_mach, row.i_back}},
                      {"report", without_timing(env.document)}};
  });

  json summary = {{"cells", cells}, {"holds", 0}, {"fails", 0}, {"inconclusive", 0}, {"errors", 0}};
  for (const auto& row : result.rows) {
    if (row.verdict == "Holds") summary["holds"] = summary["holds"].get<int>() + 1;
    else if (row.verdict == "Inconclusive") summary["inconclusive"] = summary["inconclusive"].get<int>() + 1;
    else if (row.verdict == "Error") summary["errors"] = summary["errors"].get<int>() + 1;
    else summary["fails"] = summary["fails"].get<int>() + 1;
  }
  json& doc = result.envelope.document;
  doc["config"] = to_json(config);
  doc["cells"] = cell_docs;
  doc["summary"] = summary;
  doc["provenance"] = provenance(config);
  doc["timing"] = {{"total_s", total.seconds()}, {"threads", threads}};
  doc["warnings"] = json::array();
  doc["status"] = {{"exit_code", kExitOk}, {"error", nullptr}};
  return result;
}

std::string ScanResult::csv() const {
  std::string out =
      "i_pressure,i_mach,i_back,pressure_multiplier,mach,back_pressure_input,back_pressure,r_b,t_s,kappa,verdict,"
      "min_abs_margin,tail_status,exit_code,error\n";
  for (const auto& r : rows) {
    out += std::to_string(r.i_pressure) + ',' + std::to_string(r.i_mach) + ',' + std::to_string(r.i_back) + ',';
    for (double v : {r.pressure_multiplier, r.mach, r.back_pressure_input, r.back_pressure, r.r_b, r.t_s, r.kappa}) {
      append_number(out, v);
      out += ',';
    }
    append_field(out, r.verdict);
    out += ',';
    append_number(out, r.min_abs_margin);
    out += ',';
    append_field(out, r.tail_status);
    out += ',' + std::to_string(r.exit_code) + ',';
    append_field(out, r.error);
    out += '\n';
  }
  return out;
}

json to_json(const TransportSuiteReport& r) {
  auto study = [](const ConvergenceStudy& s) {
    json levels = json::array();
    for (const auto& l : s.levels) {
      levels.push_back({{"n", l.n},
                        {"error_time_family", l.errors.time_family},
                        {"error_space_family", l.errors.space_family},
                        {"lie_residual", l.residual}});
    }
    return json{{"degree", s.degree},
                {"levels", levels},
                {"order_time_family", s.order_time_family},
                {"order_space_family", s.order_space_family},
                {"order_residual", s.order_residual}};
  };
  return {{"degree1", study(r.degree1)},
          {"degree2", study(r.degree2)},
          {"exponential_decay", {{"solution_error", r.decay.solution_error}, {"lie_residual", r.decay.residual}}},
          {"shear_straightening_error", r.shear_error},
          {"pushforward_defect", r.pushforward_defect},
          {"linearity_defect", r.linearity_defect},
          {"deterministic", r.deterministic},
          {"stability_ratio", r.stability_ratio}};
}

ReportEnvelope run_transport_demo(const RunConfig& config, unsigned threads) {
  ReportEnvelope env;
  const Stopwatch total;
  env.document["config"] = {{"seed", config.seed}};
  try {
    env.document["transport"] = to_json(run_transport_suite(config.seed, threads));
    env.document["status"] = {{"exit_code", kExitOk}, {"error", nullptr}};
  } catch (const std::exception& e) {
    env.exit_code = exit_code_for(e);
    env.document["status"] = {{"exit_code", env.exit_code},
                              {"error", {{"type", error_type(e)}, {"message", e.what()}}}};
  }
  env.document["provenance"] = provenance(config);
  env.document["timing"] = {{"total_s", total.seconds()}};
  env.document["warnings"] = json::array();
  return env;
}

}  // namespace shockshell
