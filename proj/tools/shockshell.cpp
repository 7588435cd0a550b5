// shockshell: background solutions, S-Condition checks and parameter scans
// for spherical transonic shocks in a shell, plus the form transport demo.

#include <CLI11.hpp>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>

#include "shockshell/errors.hpp"
#include "shockshell/parallel.hpp"
#include "shockshell/report.hpp"

namespace {

using namespace shockshell;

struct CommonFlags {
  std::string config_path;
  std::string out;
  ConfigOverrides overrides;
};

void add_common(CLI::App* cmd, CommonFlags& flags, bool physics) {
  cmd->add_option("-c,--config", flags.config_path, "TOML run configuration")->check(CLI::ExistingFile);
  cmd->add_option("-o,--out", flags.out, "write the JSON report here instead of stdout");
  if (!physics) return;
  auto& o = flags.overrides;
  cmd->add_option("--gamma", o.gamma, "adiabatic exponent");
  cmd->add_option("--back-pressure", o.back_pressure, "absolute back pressure at r1");
  cmd->add_option("--n-max", o.n_max, "highest spherical-harmonic level checked");
  cmd->add_option("--tol-ode-rel", o.tol_ode_rel, "relative ODE tolerance");
  cmd->add_option("--tol-ode-abs", o.tol_ode_abs, "absolute ODE tolerance");
  cmd->add_option("--tol-margin", o.tol_margin, "relative shooting-margin tolerance");
  cmd->add_option("--tol-shock", o.tol_shock, "relative back-pressure residual for the shock search");
}

RunConfig resolve(const CommonFlags& flags) {
  RunConfig config = flags.config_path.empty() ? RunConfig{} : load_config(flags.config_path);
  apply(config, flags.overrides);
  return config;
}

void write_text(const std::string& path, const std::string& text) {
  if (path.empty() || path == "-") {
    std::fwrite(text.data(), 1, text.size(), stdout);
    return;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigError("cannot write " + path);
  out << text;
}

void print_summary(const char* command, const ReportEnvelope& env) {
  const auto& doc = env.document;
  if (env.exit_code != kExitOk) {
    std::cerr << command << ": " << doc["status"]["error"]["type"].get<std::string>() << ": "
              << doc["status"]["error"]["message"].get<std::string>() << " (exit " << env.exit_code << ")\n";
    return;
  }
  std::cerr << command << ": r_b = " << doc["background"]["r_b"].get<double>();
  if (doc.contains("s_condition")) {
    const auto& sc = doc["s_condition"];
    std::cerr << ", " << sc["overall"].get<std::string>() << " (" << sc["tail_status"].get<std::string>()
              << ", modes 0.." << sc["n_checked"].get<int>() << ")";
  }
  std::cerr << '\n';
  for (const auto& w : doc["warnings"]) std::cerr << "warning: " << w.get<std::string>() << '\n';
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Spherical transonic shock backgrounds, S-Condition checks and form transport"};
  app.set_version_flag("--version", std::string(tool_version()));
  app.require_subcommand(1);
  app.footer(std::string("Environment: ") + kThreadCapVariable +
             " caps the worker threads used by scan and transport-demo.\n"
             "Exit codes: 0 ok, 1 usage/config, 2 back pressure out of range, 3 sonic (or subsonic inflow), "
             "4 invariant violation, 5 other numerical failure.");

  CommonFlags bg_flags, sc_flags, scan_flags, demo_flags;
  auto* bg_cmd = app.add_subcommand("background", "solve the background and report jump, mu table and profiles");
  add_common(bg_cmd, bg_flags, true);
  auto* sc_cmd = app.add_subcommand("scondition", "background plus the mode-by-mode S-Condition check");
  add_common(sc_cmd, sc_flags, true);
  auto* scan_cmd = app.add_subcommand("scan", "S-Condition over the [scan] grid; JSON report and CSV table");
  add_common(scan_cmd, scan_flags, true);
  std::string csv_path;
  scan_cmd->add_option("--csv", csv_path, "CSV path (default: --out with a .csv extension, else stdout)");
  auto* demo_cmd = app.add_subcommand("transport-demo", "manufactured-solution suite of the form transport solver");
  add_common(demo_cmd, demo_flags, false);
  std::optional<std::uint64_t> seed;
  demo_cmd->add_option("--seed", seed, "seed of the randomized datasets");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitUsage;
  }

  try {
    if (*bg_cmd || *sc_cmd) {
      const bool full = static_cast<bool>(*sc_cmd);
      const CommonFlags& flags = full ? sc_flags : bg_flags;
      const RunConfig config = resolve(flags);
      const ReportEnvelope env = full ? run_scondition(config) : run_background(config);
      write_text(flags.out, env.serialize());
      print_summary(full ? "scondition" : "background", env);
      return env.exit_code;
    }
    if (*scan_cmd) {
      const RunConfig config = resolve(scan_flags);
      const ScanResult result = run_scan(config);
      if (csv_path.empty() && !scan_flags.out.empty() && scan_flags.out != "-") {
        csv_path = std::filesystem::path(scan_flags.out).replace_extension(".csv").string();
      }
      if (csv_path.empty()) {
        write_text("-", result.csv());
      } else {
        write_text(scan_flags.out, result.envelope.serialize());
        write_text(csv_path, result.csv());
      }
      const auto& s = result.envelope.document["summary"];
      std::cerr << "scan: " << s["cells"].get<int>() << " cells, " << s["holds"].get<int>() << " Holds, "
                << s["fails"].get<int>() << " Fails, " << s["inconclusive"].get<int>() << " Inconclusive, "
                << s["errors"].get<int>() << " Error\n";
      return kExitOk;
    }
    if (*demo_cmd) {
      RunConfig config = demo_flags.config_path.empty() ? RunConfig{} : load_config(demo_flags.config_path);
      if (seed) config.seed = *seed;
      const ReportEnvelope env = run_transport_demo(config, thread_cap());
      write_text(demo_flags.out, env.serialize());
      if (env.exit_code == kExitOk) {
        const auto& t = env.document["transport"];
        std::cerr << "transport-demo: orders " << t["degree1"]["order_time_family"].get<double>() << " / "
                  << t["degree1"]["order_space_family"].get<double>() << " (degree 1), "
                  << t["degree2"]["order_time_family"].get<double>() << " / "
                  << t["degree2"]["order_space_family"].get<double>() << " (degree 2)\n";
      }
      return env.exit_code;
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return exit_code_for(e);
  }
  return kExitUsage;
}
