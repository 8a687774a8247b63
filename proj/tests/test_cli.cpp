#include <charconv>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <unistd.h>

#include "cli.hpp"
#include "doctest.h"
#include "json.hpp"
#include "output.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct Scratch {
  fs::path dir;
  Scratch() {
    dir = fs::temp_directory_path() / ("mixtherm_cli_" + std::to_string(::getpid()));
    fs::create_directories(dir);
  }
  ~Scratch() {
    std::error_code ec;
    fs::remove_all(dir, ec);
  }
};

Scratch& scratch() {
  static Scratch s;
  return s;
}

fs::path write(const std::string& name, const std::string& text) {
  const auto p = scratch().dir / name;
  fs::create_directories(p.parent_path());
  std::ofstream(p, std::ios::binary) << text;
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

struct Outcome {
  int code;
  std::string out, err;
};

Outcome run_cli(std::vector<std::string> args) {
  args.insert(args.begin(), "mixtherm");
  std::vector<char*> argv;
  for (auto& a : args) argv.push_back(a.data());
  std::ostringstream out, err;
  const int code = mixtherm::cli::main_entry(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

json classical() {
  return json::parse(R"({
    "species": [{"label": "a", "mass": 1.0, "spin_degeneracy": 2, "statistics": "fermi", "density": 1e-4}],
    "ideal_tau": {"theta": [1e4, 2e4, 5e4]}
  })");
}

std::vector<std::vector<std::string>> csv_rows(const std::string& text) {
  std::vector<std::vector<std::string>> rows;
  std::istringstream lines(text);
  std::string line;
  while (std::getline(lines, line)) {
    std::vector<std::string> cells;
    std::istringstream cols(line);
    std::string cell;
    while (std::getline(cols, cell, ',')) cells.push_back(cell);
    rows.push_back(cells);
  }
  return rows;
}

}  // namespace

TEST_CASE("ideal-tau in the classical regime gives tau/theta near 1") {
  const auto cfg = write("classical.json", classical().dump());
  const auto out = scratch().dir / "classical";
  auto r = run_cli({"ideal-tau", "--config", cfg.string(), "--out", out.string()});
  REQUIRE(r.code == 0);
  auto rows = csv_rows(slurp(out / "ideal_tau.csv"));
  REQUIRE(rows.size() == 4);
  CHECK(rows[0] == std::vector<std::string>{"theta", "rho", "tau", "tau_over_theta", "alpha_a"});
  for (std::size_t i = 1; i < rows.size(); ++i) {
    CHECK(std::abs(std::stod(rows[i][3]) - 1.0) < 1e-5);
    CHECK(std::stod(rows[i][4]) < -15.0);
  }
  auto report = json::parse(slurp(out / "ideal-tau.report.json"));
  CHECK(report["command"] == "ideal-tau");
  CHECK(report["outputs"] == json::array({"ideal_tau.csv"}));
  CHECK(report["inputs_digest"].get<std::string>().size() == 16);
}

TEST_CASE("identical configs give byte-identical CSV") {
  auto doc = classical();
  doc["potentials"] = json::parse(R"([{"species": ["a", "a"], "type": "gaussian", "amplitude": 0.4, "width": 0.7}])");
  doc["correlations"] = json::parse(R"([{"species": ["a", "a"], "model": "classical-boltzmann"}])");
  doc["thermo"] = json::parse(R"({"theta": {"min": 1.0, "max": 10.0, "points": 7, "spacing": "log"}})");
  doc["gk"] = json::parse(R"({"alpha": [-3, -1, 0, 2]})");
  doc["ns_check"] = json::parse(R"({"tau": 0.8})");
  const auto cfg = write("determinism.json", doc.dump());
  for (const char* command : {"ideal-tau", "thermo", "gk", "ns-check"}) {
    const auto one = scratch().dir / "det1", two = scratch().dir / "det2";
    REQUIRE(run_cli({command, "--config", cfg.string(), "--out", one.string()}).code == 0);
    REQUIRE(run_cli({command, "--config", cfg.string(), "--out", two.string(), "--threads", "3"}).code == 0);
    for (const auto& entry : fs::directory_iterator(one)) {
      if (entry.path().extension() != ".csv") continue;
      CAPTURE(entry.path().filename().string());
      CHECK(slurp(entry.path()) == slurp(two / entry.path().filename()));
    }
  }
}

TEST_CASE("CSV cells round-trip doubles") {
  for (double v : {0.1, 1.0 / 3.0, 6.02214076e23, -2.5e-300, 5e-324}) {
    const auto text = mixtherm::cli::format_double(v);
    double back = 0.0;
    std::from_chars(text.data(), text.data() + text.size(), back);
    CHECK(back == v);
  }
  mixtherm::cli::CsvTable t({"name", "x"});
  t.row().add("a,b").add(1.5);
  CHECK(t.str() == "name,x\n\"a,b\",1.5\n");
}

TEST_CASE("malformed JSON is a config error") {
  const auto cfg = write("broken.json", "{\"species\": [");
  auto r = run_cli({"ideal-tau", "--config", cfg.string(), "--out", (scratch().dir / "x").string()});
  CHECK(r.code == 2);
  auto record = json::parse(r.err);
  CHECK(record["kind"] == "ConfigError");
  CHECK(record["path"] == "/");
  CHECK(record["message"].get<std::string>().find("malformed JSON") != std::string::npos);
}

TEST_CASE("schema violations name the offending path") {
  struct Case {
    std::string patch;
    std::string path;
  };
  const std::vector<Case> cases = {
      {R"({"species": [{"label": "a", "mass": -1, "spin_degeneracy": 2, "statistics": "fermi", "density": 1}]})",
       "/species/0/mass"},
      {R"({"species": [{"label": "a", "mass": 1, "spin_degeneracy": 2, "statistics": "anyon", "density": 1}]})",
       "/species/0/statistics"},
      {R"({"potentials": [{"species": ["a", "zz"], "type": "step", "height": 1, "radius": 1}]})",
       "/potentials/0/species/1"},
      {R"({"potentials": [{"species": ["a", "a"], "type": "morse"}]})", "/potentials/0/type"},
      {R"({"tolerances": {"radial_relative": -1}})", "/tolerances/radial_relative"},
      {R"({"tolerances": {"kernel_rel": 1e-8}})", "/tolerances/kernel_rel"},
      {R"({"ideal_tau": {"theta": {"min": 1, "max": 0.5, "points": 3}}})", "/ideal_tau/theta/max"},
      {R"({"ideal_tau": {"theta": "hot"}})", "/ideal_tau/theta"},
      {R"({"mystery": 1})", "/mystery"},
  };
  for (const auto& c : cases) {
    auto doc = classical();
    doc.merge_patch(json::parse(c.patch));
    const auto cfg = write("schema.json", doc.dump());
    auto r = run_cli({"ideal-tau", "--config", cfg.string(), "--out", (scratch().dir / "schema").string()});
    CAPTURE(c.patch);
    CHECK(r.code == 2);
    auto record = json::parse(r.err);
    CHECK(record["kind"] == "ConfigError");
    CHECK(record["path"] == c.path);
  }
}

TEST_CASE("potential without a correlation model is rejected for thermo") {
  auto doc = classical();
  doc["potentials"] = json::parse(R"([{"species": ["a", "a"], "type": "yukawa", "amplitude": 1, "length": 1}])");
  doc["thermo"] = json::parse(R"({"theta": [1.0]})");
  const auto cfg = write("nocorr.json", doc.dump());
  auto r = run_cli({"thermo", "--config", cfg.string(), "--out", (scratch().dir / "nocorr").string()});
  CHECK(r.code == 2);
  CHECK(json::parse(r.err)["path"] == "/correlations");
}

TEST_CASE("tabulated inputs resolve against the config directory and enter the digest") {
  write("tables/k.csv", "r,K\n0.5,2.0\n1.0,0.5\n1.5,0.1\n2.0,0.0\n");
  write("tables/g.csv", "# pair correlation\n0.5,0.2\n1.0,0.8\n1.5,0.95\n2.0,1.0\n");
  auto doc = classical();
  doc["potentials"] = json::parse(R"([{"species": ["a", "a"], "type": "tabulated", "file": "k.csv"}])");
  doc["correlations"] = json::parse(R"([{"species": ["a", "a"], "model": "tabulated", "file": "g.csv"}])");
  doc["thermo"] = json::parse(R"({"theta": [1.0, 2.0]})");
  const auto out = scratch().dir / "tables_out";
  // Without a tail the radial integrals would have to extrapolate the table.
  const auto open_ended = write("tables/open.json", doc.dump());
  auto refused = run_cli({"thermo", "--config", open_ended.string(), "--out", out.string()});
  CHECK(refused.code == 3);
  CHECK(json::parse(refused.err)["kind"] == "OutOfTableRange");

  doc["potentials"][0]["tail"] = json::parse(R"({"coefficient": 0.0, "exponent": 6})");
  const auto cfg = write("tables/run.json", doc.dump());
  auto first = run_cli({"thermo", "--config", cfg.string(), "--out", out.string()});
  CAPTURE(first.err);
  REQUIRE(first.code == 0);
  const auto digest = json::parse(slurp(out / "thermo.report.json"))["inputs_digest"];
  write("tables/k.csv", "r,K\n0.5,2.0\n1.0,0.6\n1.5,0.1\n2.0,0.0\n");
  REQUIRE(run_cli({"thermo", "--config", cfg.string(), "--out", out.string()}).code == 0);
  CHECK(json::parse(slurp(out / "thermo.report.json"))["inputs_digest"] != digest);

  doc["potentials"][0]["file"] = "missing.csv";
  const auto bad = write("tables/bad.json", doc.dump());
  auto r = run_cli({"thermo", "--config", bad.string(), "--out", out.string()});
  CHECK(r.code == 2);
  CHECK(json::parse(r.err)["path"] == "/potentials/0/file");
}

TEST_CASE("condensate scan needs the experimental flag") {
  auto doc = classical();
  doc["species"].push_back(json::parse(
      R"({"label": "b", "mass": 1.0, "spin_degeneracy": 1, "statistics": "bose", "density": 1.0})"));
  doc["condensate_scan"] = json::parse(R"({"theta": {"min": 0.5, "max": 5, "points": 40}})");
  const auto cfg = write("condensate.json", doc.dump());
  const auto out = scratch().dir / "condensate";
  auto refused = run_cli({"condensate-scan", "--config", cfg.string(), "--out", out.string()});
  CHECK(refused.code == 4);
  CHECK(json::parse(refused.err)["kind"] == "ExperimentalRefused");
  CHECK_FALSE(fs::exists(out / "condensate_scan.csv"));

  auto ok = run_cli({"condensate-scan", "--config", cfg.string(), "--out", out.string(), "--allow-experimental"});
  REQUIRE(ok.code == 0);
  auto report = json::parse(slurp(out / "condensate-scan.report.json"));
  bool flagged = false;
  for (const auto& w : report["warnings"]) flagged = flagged || w.get<std::string>().find("EXPERIMENTAL") == 0;
  CHECK(flagged);
  auto onset = csv_rows(slurp(out / "condensate_onset.csv"));
  REQUIRE(onset.size() == 2);
  CHECK(std::stod(onset[1][2]) > 0.5);
}

TEST_CASE("validate reports every suite row as passed") {
  const auto cfg = write("validate.json", R"({
    "species": [{"label": "a", "mass": 1.0, "spin_degeneracy": 2, "statistics": "fermi", "density": 0.1}],
    "validate": {"random_potentials": 3, "grid_points": 64}
  })");
  const auto out = scratch().dir / "validate";
  auto r = run_cli({"validate", "--config", cfg.string(), "--out", out.string(), "--seed", "7"});
  CHECK(r.code == 0);
  auto rows = csv_rows(slurp(out / "validation.csv"));
  REQUIRE(rows.size() > 5);
  CHECK(rows[0] == std::vector<std::string>{"name", "residual", "threshold", "must_exceed", "passed"});
  for (std::size_t i = 1; i < rows.size(); ++i) {
    CAPTURE(rows[i][0]);
    CHECK(rows[i][4] == "true");
  }
  CHECK(json::parse(slurp(out / "validate.report.json"))["seed"] == 7);
}

TEST_CASE("tolerance overrides reach the solvers") {
  auto doc = json::parse(R"({
    "species": [{"label": "a", "mass": 1.0, "spin_degeneracy": 2, "statistics": "fermi", "density": 0.1}],
    "tau_field": {"theta_min": 1.0, "theta_max": 10.0, "rho_min": 0.01, "rho_max": 0.1, "n_theta": 4, "n_rho": 3}
  })");
  const auto cfg = write("anchor.json", doc.dump());
  auto strict = run_cli({"tau-field", "--config", cfg.string(), "--out", (scratch().dir / "anchor").string()});
  CHECK(strict.code == 3);
  CHECK(json::parse(strict.err)["kind"] == "AnchorNotClassical");
  doc["tolerances"] = json::parse(R"({"anchor_alpha": -3.0})");
  write("anchor.json", doc.dump());
  CHECK(run_cli({"tau-field", "--config", cfg.string(), "--out", (scratch().dir / "anchor").string()}).code == 0);
}

TEST_CASE("command line guards") {
  CHECK(run_cli({"frobnicate", "--config", "x.json"}).code == 2);
  CHECK(run_cli({"gk"}).code == 2);
  CHECK(run_cli({"--version"}).code == 0);
  const auto cfg = write("threads.json", classical().dump());
  ::setenv("MIXTHERM_THREADS", "lots", 1);
  auto r = run_cli({"ideal-tau", "--config", cfg.string(), "--out", (scratch().dir / "t").string()});
  ::unsetenv("MIXTHERM_THREADS");
  CHECK(r.code == 2);
  CHECK(json::parse(r.err)["path"] == "MIXTHERM_THREADS");
  CHECK(run_cli({"ideal-tau", "--config", (scratch().dir / "absent.json").string()}).code == 2);
}
