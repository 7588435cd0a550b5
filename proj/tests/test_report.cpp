#include <doctest.h>

#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "shockshell/errors.hpp"
#include "shockshell/report.hpp"

using namespace shockshell;
using nlohmann::json;

namespace {

const std::string kSourceDir = SHOCKSHELL_SOURCE_DIR;

RunConfig config_file(const std::string& name) { return load_config(kSourceDir + "/configs/" + name); }

// Structural comparison with a relative tolerance on numbers.
void compare(const json& a, const json& b, const std::string& path, double tol) {
  INFO("at " << path);
  if (a.is_number() && b.is_number()) {
    const double x = a.get<double>(), y = b.get<double>();
    CHECK(std::abs(x - y) <= tol * std::max({1.0, std::abs(x), std::abs(y)}));
    return;
  }
  REQUIRE(a.type() == b.type());
  if (a.is_object()) {
    std::set<std::string> ka, kb;
    for (const auto& [k, _] : a.items()) ka.insert(k);
    for (const auto& [k, _] : b.items()) kb.insert(k);
    REQUIRE(ka == kb);
    for (const auto& k : ka) {
      if (k == "timing" || k == "version") continue;
      compare(a[k], b[k], path + "/" + k, tol);
    }
  } else if (a.is_array()) {
    REQUIRE(a.size() == b.size());
    for (std::size_t i = 0; i < a.size(); ++i) compare(a[i], b[i], path + "/" + std::to_string(i), tol);
  } else {
    CHECK(a == b);
  }
}

}  // namespace

TEST_CASE("config parsing") {
  const RunConfig c = config_file("reference.toml");
  CHECK(c.gamma == 1.4);
  REQUIRE(c.back_pressure);
  CHECK(*c.back_pressure == 3.52);
  CHECK(c.back_pressure_mode == BackPressureMode::Absolute);
  CHECK(c.n_max == 64);
  CHECK_FALSE(c.scan);

  const RunConfig s = config_file("scan_reference.toml");
  REQUIRE(s.scan);
  CHECK(s.scan->size() == 27);
  CHECK(s.scan->mode == BackPressureMode::Fraction);

  const RunConfig d = parse_config("back_pressure = 3.0\n[scan]\nmach = [2.0, 3.0]\n");
  REQUIRE(d.scan);
  CHECK(d.scan->pressure_multiplier == std::vector<double>{1.0});
  CHECK(d.scan->back_pressure == std::vector<double>{3.0});

  CHECK_THROWS_AS(parse_config("gamma = 1.4\nbogus = 1\n"), ConfigError);
  CHECK_THROWS_AS(parse_config("[inflow]\nspeed = 2\n"), ConfigError);
  CHECK_THROWS_AS(parse_config("back_pressure = 3\nback_pressure_fraction = 0.5\n"), ConfigError);
  CHECK_THROWS_AS(parse_config("back_pressure = 3\n[scan]\nmach = []\n"), ConfigError);
  CHECK_THROWS_AS(parse_config("[inflow]\nmach = 1.0\n"), ConfigError);
  CHECK_THROWS_AS(parse_config("r0 = 2.0\nr1 = 1.0\n"), ConfigError);
  CHECK_THROWS_AS(parse_config("gamma = \"x\"\n"), ConfigError);
  CHECK_THROWS_AS(parse_config("gamma = [\n"), ConfigError);
  CHECK_THROWS_AS(load_config(kSourceDir + "/configs/missing.toml"), ConfigError);
}

TEST_CASE("overrides") {
  RunConfig c = config_file("scan_reference.toml");
  ConfigOverrides o;
  o.back_pressure = 3.0;
  o.n_max = 5;
  o.tol_margin = 1e-4;
  apply(c, o);
  CHECK(*c.back_pressure == 3.0);
  CHECK(c.back_pressure_mode == BackPressureMode::Absolute);
  CHECK(c.n_max == 5);
  CHECK(c.tolerances.margin_tol == 1e-4);
  o = {};
  o.gamma = 0.9;
  CHECK_THROWS_AS(apply(c, o), ConfigError);
}

TEST_CASE("exit codes") {
  CHECK(exit_code_for(BackPressureOutOfRange(9, 1, 2)) == 2);
  CHECK(exit_code_for(SonicApproach(1.5, 0.99)) == 3);
  CHECK(exit_code_for(NotSupersonic(1.0)) == 3);
  CHECK(exit_code_for(InvariantViolation("x")) == 4);
  CHECK(exit_code_for(SignViolation("mu3")) == 4);
  CHECK(exit_code_for(ConfigError("x")) == 1);
  CHECK(exit_code_for(StepFailure("x")) == 5);
}

TEST_CASE("background report") {
  const ReportEnvelope env = run_background(config_file("reference.toml"));
  REQUIRE(env.exit_code == 0);
  const json& d = env.document;
  CHECK(d["status"]["exit_code"] == 0);
  const double r_b = d["background"]["r_b"];
  CHECK(r_b > 1.0);
  CHECK(r_b < 2.0);
  for (const auto& [name, sign] : d["mu"]["signs"].items()) {
    INFO(name);
    CHECK(sign["holds"].get<bool>());
  }
  CHECK(d["mu"]["mu0_forms"]["note"].get<std::string>().find("squared") != std::string::npos);
  CHECK(std::abs(d["mu"]["mu0_forms"]["squared_variant_ratio"].get<double>() - 1.0) > 0.1);
  CHECK(d["mu"]["mu0_forms"]["relative_difference"].get<double>() < 1e-10);
  CHECK_FALSE(d.contains("s_condition"));
  CHECK(d["profiles"]["e4_sign_change_y"].is_null());
}

TEST_CASE("failed runs carry a status") {
  RunConfig c = config_file("reference.toml");
  c.back_pressure = 1e6;
  const ReportEnvelope env = run_background(c);
  CHECK(env.exit_code == kExitBackPressureRange);
  CHECK(env.document["status"]["error"]["type"] == "BackPressureOutOfRange");
  CHECK_FALSE(env.document.contains("background"));
}

TEST_CASE("serialization round trip and determinism") {
  const RunConfig c = config_file("reference.toml");
  const ReportEnvelope a = run_scondition(c);
  const std::string text = a.serialize();
  CHECK(json::parse(text).dump(2) + "\n" == text);
  const ReportEnvelope b = run_scondition(c);
  CHECK(without_timing(a.document).dump() == without_timing(b.document).dump());
}

TEST_CASE("reference S-Condition report matches the golden file") {
  std::ifstream in(kSourceDir + "/tests/golden/reference_scondition.json");
  REQUIRE(in.good());
  const json golden = json::parse(in);
  const ReportEnvelope env = run_scondition(config_file("reference.toml"));
  compare(env.document, golden, "", 1e-8);
  CHECK(env.document["s_condition"]["overall"] == "Holds");
  CHECK(env.document["s_condition"]["tail_status"] == "HopfCoversTail");
}

TEST_CASE("strong inflow holds; weak shock warns") {
  const ReportEnvelope strong = run_scondition(config_file("strong_inflow.toml"));
  REQUIRE(strong.exit_code == 0);
  CHECK(strong.document["s_condition"]["overall"] == "Holds");
  const ReportEnvelope weak = run_scondition(config_file("weak_shock.toml"));
  REQUIRE(weak.exit_code == 0);
  CHECK(weak.document["s_condition"]["tail_status"] == "Unverified");
  CHECK(weak.document["s_condition"]["overall"] == "Inconclusive");
  bool warned = false;
  for (const auto& w : weak.document["warnings"]) warned = warned || w.get<std::string>().rfind("TailUnverifiable", 0) == 0;
  CHECK(warned);
  CHECK_FALSE(weak.document["profiles"]["e4_sign_change_y"].is_null());
}

TEST_CASE("scan: ordering, summary and thread independence") {
  const RunConfig c = config_file("scan_reference.toml");
  const ScanResult serial = run_scan(c, {1});
  const ScanResult concurrent = run_scan(c, {4});
  REQUIRE(serial.rows.size() == 27);
  CHECK(serial.csv() == concurrent.csv());
  CHECK(without_timing(serial.envelope.document).dump() == without_timing(concurrent.envelope.document).dump());
  for (std::size_t k = 0; k < serial.rows.size(); ++k) {
    const ScanRow& r = serial.rows[k];
    CHECK(k == (r.i_pressure * 3 + r.i_mach) * 3 + r.i_back);
    CHECK((r.verdict == "Holds" || r.verdict == "Inconclusive" || r.verdict.rfind("Fails(", 0) == 0));
    CHECK(r.exit_code == 0);
  }
  const json& s = serial.envelope.document["summary"];
  CHECK(s["cells"] == 27);
  CHECK(s["holds"].get<int>() + s["fails"].get<int>() + s["inconclusive"].get<int>() + s["errors"].get<int>() == 27);
  std::istringstream csv(serial.csv());
  std::string line;
  int lines = 0;
  while (std::getline(csv, line)) ++lines;
  CHECK(lines == 28);

  CHECK_THROWS_AS(run_scan(config_file("reference.toml")), ConfigError);
  RunConfig empty = c;
  empty.scan->mach.clear();
  CHECK_THROWS_AS(run_scan(empty), ConfigError);
}

TEST_CASE("scan cells that fail become Error rows") {
  RunConfig c = parse_config("[scan]\nback_pressure = [3.52, 1e6]\n");
  const ScanResult r = run_scan(c, {2});
  REQUIRE(r.rows.size() == 2);
  CHECK(r.rows[0].exit_code == 0);
  CHECK(r.rows[1].verdict == "Error");
  CHECK(r.rows[1].exit_code == kExitBackPressureRange);
  CHECK(r.envelope.document["summary"]["errors"] == 1);
}

TEST_CASE("Holds fraction does not drop as the inflow pressure grows") {
  const ScanResult r = run_scan(config_file("scan_strong_inflow.toml"), {2});
  REQUIRE(r.rows.size() == 4);
  int previous = 0;
  int holds = 0;
  for (const ScanRow& row : r.rows) {
    INFO(row.pressure_multiplier << " " << row.error);
    CHECK(row.exit_code == 0);
    const int h = row.verdict == "Holds" ? 1 : 0;
    CHECK(h >= previous);
    previous = h;
    holds += h;
  }
  CHECK(holds >= 1);
  // Thinner subsonic layer as the inflow pressure grows.
  for (std::size_t i = 1; i < r.rows.size(); ++i) CHECK(r.rows[i].kappa < r.rows[i - 1].kappa);
}
