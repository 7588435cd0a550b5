#include "shockshell/config.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#define TOML_EXCEPTIONS 1
#include <toml.hpp>

#include "shockshell/errors.hpp"

namespace shockshell {

namespace {

double number(const toml::node_view<const toml::node>& node, const std::string& key, double fallback) {
  if (!node) return fallback;
  if (auto v = node.value<double>()) return *v;
  throw ConfigError("'" + key + "' must be a number");
}

std::vector<double> number_array(const toml::node_view<const toml::node>& node, const std::string& key) {
  const toml::array* arr = node.as_array();
  if (!arr) throw ConfigError("'" + key + "' must be an array of numbers");
  std::vector<double> out;
  for (const auto& item : *arr) {
    auto v = item.value<double>();
    if (!v) throw ConfigError("'" + key + "' must contain only numbers");
    out.push_back(*v);
  }
  if (out.empty()) throw ConfigError("scan axis '" + key + "' is empty");
  return out;
}

void require_positive(double v, const std::string& name) {
  if (!(v > 0) || !std::isfinite(v)) throw ConfigError(name + " must be positive and finite");
}

void check_known_keys(const toml::table& table, std::initializer_list<const char*> keys, const std::string& where) {
  for (const auto& [k, _] : table) {
    bool known = false;
    for (const char* key : keys) known = known || k.str() == key;
    if (!known) throw ConfigError("unknown key '" + std::string(k.str()) + "' in " + where);
  }
}

}  // namespace

const char* to_string(BackPressureMode mode) { return mode == BackPressureMode::Absolute ? "absolute" : "fraction"; }

void RunConfig::validate() const {
  if (!(gamma > 1) || !std::isfinite(gamma)) throw ConfigError("gamma must exceed 1");
  require_positive(r0, "r0");
  require_positive(r1, "r1");
  if (!(r0 < r1)) throw ConfigError("r0 must be smaller than r1");
  require_positive(inflow.p, "inflow.p");
  require_positive(inflow.rho, "inflow.rho");
  if (!(inflow.mach > 1) || !std::isfinite(inflow.mach)) throw ConfigError("inflow.mach must exceed 1");
  if (back_pressure) {
    if (back_pressure_mode == BackPressureMode::Absolute) {
      require_positive(*back_pressure, "back_pressure");
    } else if (!(*back_pressure > 0 && *back_pressure < 1)) {
      throw ConfigError("back_pressure_fraction must lie in (0, 1)");
    }
  }
  require_positive(tolerances.ode_rel, "tolerances.ode_rel");
  require_positive(tolerances.ode_abs, "tolerances.ode_abs");
  require_positive(tolerances.margin_tol, "tolerances.margin_tol");
  require_positive(tolerances.shock_tol, "tolerances.shock_tol");
  if (n_max < 0) throw ConfigError("n_max must be non-negative");
  if (scan) {
    if (scan->pressure_multiplier.empty() || scan->mach.empty() || scan->back_pressure.empty()) {
      throw ConfigError("scan grid has an empty axis");
    }
    for (double m : scan->pressure_multiplier) require_positive(m, "scan.pressure_multiplier");
    for (double m : scan->mach) {
      if (!(m > 1)) throw ConfigError("scan.mach values must exceed 1");
    }
    for (double b : scan->back_pressure) {
      if (scan->mode == BackPressureMode::Absolute) {
        require_positive(b, "scan.back_pressure");
      } else if (!(b > 0 && b < 1)) {
        throw ConfigError("scan.back_pressure_fraction values must lie in (0, 1)");
      }
    }
  }
}

GasState RunConfig::inflow_state() const { return state_from_mach(gamma, inflow.p, inflow.rho, inflow.mach); }

IntegrationSettings RunConfig::integration() const {
  IntegrationSettings s;
  s.rel_tol = tolerances.ode_rel;
  s.abs_tol = tolerances.ode_abs;
  return s;
}

ShockSearchSettings RunConfig::shock_search() const {
  ShockSearchSettings s;
  s.integration = integration();
  s.residual_tol = tolerances.shock_tol;
  return s;
}

SConditionOptions RunConfig::s_condition_options() const {
  SConditionOptions o;
  o.margin_tol = tolerances.margin_tol;
  o.n_max = n_max;
  o.rel_tol = tolerances.ode_rel;
  return o;
}

RunConfig parse_config(const std::string& toml_text, const std::string& source) {
  toml::table root;
  try {
    root = toml::parse(toml_text, source);
  } catch (const toml::parse_error& e) {
    std::ostringstream msg;
    msg << "cannot parse " << source << ": " << e.description() << " (line " << e.source().begin.line << ")";
    throw ConfigError(msg.str());
  }
  check_known_keys(root,
                   {"gamma", "r0", "r1", "back_pressure", "back_pressure_fraction", "n_max", "seed", "inflow",
                    "tolerances", "scan"},
                   source);

  RunConfig c;
  const toml::node_view<const toml::node> view{root};
  c.gamma = number(view["gamma"], "gamma", c.gamma);
  c.r0 = number(view["r0"], "r0", c.r0);
  c.r1 = number(view["r1"], "r1", c.r1);
  if (view["back_pressure"] && view["back_pressure_fraction"]) {
    throw ConfigError("give either back_pressure or back_pressure_fraction, not both");
  }
  if (view["back_pressure"]) {
    c.back_pressure = number(view["back_pressure"], "back_pressure", 0.0);
  } else if (view["back_pressure_fraction"]) {
    c.back_pressure = number(view["back_pressure_fraction"], "back_pressure_fraction", 0.0);
    c.back_pressure_mode = BackPressureMode::Fraction;
  }
  if (auto n = view["n_max"]) {
    auto v = n.value<int64_t>();
    if (!v) throw ConfigError("'n_max' must be an integer");
    c.n_max = static_cast<int>(*v);
  }
  if (auto s = view["seed"]) {
    auto v = s.value<int64_t>();
    if (!v || *v < 0) throw ConfigError("'seed' must be a non-negative integer");
    c.seed = static_cast<std::uint64_t>(*v);
  }
  if (auto inflow = view["inflow"]) {
    if (!inflow.is_table()) throw ConfigError("[inflow] must be a table");
    check_known_keys(*inflow.as_table(), {"p", "rho", "mach"}, "[inflow]");
    c.inflow.p = number(inflow["p"], "inflow.p", c.inflow.p);
    c.inflow.rho = number(inflow["rho"], "inflow.rho", c.inflow.rho);
    c.inflow.mach = number(inflow["mach"], "inflow.mach", c.inflow.mach);
  }
  if (auto tol = view["tolerances"]) {
    if (!tol.is_table()) throw ConfigError("[tolerances] must be a table");
    check_known_keys(*tol.as_table(), {"ode_rel", "ode_abs", "margin_tol", "shock_tol"}, "[tolerances]");
    c.tolerances.ode_rel = number(tol["ode_rel"], "tolerances.ode_rel", c.tolerances.ode_rel);
    c.tolerances.ode_abs = number(tol["ode_abs"], "tolerances.ode_abs", c.tolerances.ode_abs);
    c.tolerances.margin_tol = number(tol["margin_tol"], "tolerances.margin_tol", c.tolerances.margin_tol);
    c.tolerances.shock_tol = number(tol["shock_tol"], "tolerances.shock_tol", c.tolerances.shock_tol);
  }
  if (auto scan = view["scan"]) {
    if (!scan.is_table()) throw ConfigError("[scan] must be a table");
    check_known_keys(*scan.as_table(), {"pressure_multiplier", "mach", "back_pressure", "back_pressure_fraction"},
                     "[scan]");
    ScanGrid grid;
    // Missing axes collapse to the single-run value.
    grid.pressure_multiplier =
        scan["pressure_multiplier"] ? number_array(scan["pressure_multiplier"], "scan.pressure_multiplier")
                                    : std::vector<double>{1.0};
    grid.mach = scan["mach"] ? number_array(scan["mach"], "scan.mach") : std::vector<double>{c.inflow.mach};
    if (scan["back_pressure"] && scan["back_pressure_fraction"]) {
      throw ConfigError("[scan] takes either back_pressure or back_pressure_fraction, not both");
    }
    if (scan["back_pressure"]) {
      grid.back_pressure = number_array(scan["back_pressure"], "scan.back_pressure");
    } else if (scan["back_pressure_fraction"]) {
      grid.back_pressure = number_array(scan["back_pressure_fraction"], "scan.back_pressure_fraction");
      grid.mode = BackPressureMode::Fraction;
    } else if (c.back_pressure) {
      grid.back_pressure = {*c.back_pressure};
      grid.mode = c.back_pressure_mode;
    } else {
      throw ConfigError("[scan] needs back pressures (or a top-level back_pressure)");
    }
    c.scan = std::move(grid);
  }
  c.validate();
  return c;
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_config(buf.str(), path);
}

void apply(RunConfig& config, const ConfigOverrides& o) {
  if (o.gamma) config.gamma = *o.gamma;
  if (o.back_pressure) {
    config.back_pressure = *o.back_pressure;
    config.back_pressure_mode = BackPressureMode::Absolute;
  }
  if (o.n_max) config.n_max = *o.n_max;
  if (o.tol_ode_rel) config.tolerances.ode_rel = *o.tol_ode_rel;
  if (o.tol_ode_abs) config.tolerances.ode_abs = *o.tol_ode_abs;
  if (o.tol_margin) config.tolerances.margin_tol = *o.tol_margin;
  if (o.tol_shock) config.tolerances.shock_tol = *o.tol_shock;
  config.validate();
}

}  // namespace shockshell
