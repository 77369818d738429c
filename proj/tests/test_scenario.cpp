#include <doctest.h>

#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <sys/wait.h>

#include "plurigeo/scenario.hpp"

using namespace plurigeo;
using nlohmann::json;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("plurigeo_test_" + name);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void spit(const fs::path& p, const std::string& s) {
  std::ofstream out(p, std::ios::binary);
  out << s;
}

struct CliResult {
  int code;
  std::string err;
};

CliResult cli(const std::string& command, const json& cfg, const fs::path& dir,
              const std::string& extra = "") {
  const fs::path cfg_path = dir / "config.json";
  spit(cfg_path, cfg.dump());
  const fs::path err_path = dir / "stderr.txt";
  const std::string cmd = std::string(PLURIGEO_CLI_PATH) + " " + command + " --config " +
                          cfg_path.string() + " " + extra + " 2> " + err_path.string();
  const int status = std::system(cmd.c_str());
  return {WEXITSTATUS(status), slurp(err_path)};
}

Mat2 generic_metric(const RealPoint& x) {
  Mat2 g;
  g(0, 0) = 1.6 + 0.3 * std::cos(x[0] + x[1]);
  g(1, 1) = 1.5 + 0.25 * std::sin(x[2] - x[0]);
  g(0, 1) = 0.3 * std::exp(I_unit * x[2]) + 0.2 * std::exp(-I_unit * x[1]);
  g(1, 0) = std::conj(g(0, 1));
  return g;
}

}  // namespace

TEST_CASE("scenario parsing: defaults and full key set") {
  const Scenario d = parse_scenario(json{{"command", "flow"}});
  CHECK(d.command == Command::flow);
  CHECK(d.variant == Variant::gflow);
  CHECK(d.cadence == 10);
  CHECK(!d.fixed_dt);

  const json full = json::parse(R"({
    "command": "static", "family": {"kind": "torus_pluriclosed", "epsilon": 0.5},
    "dims": [8, 4, 16, 4], "dt": {"fixed": 0.001}, "t_end": 0.2, "cadence": 3,
    "variant": "omega_form", "seed": 99, "count": 5, "samples": 6,
    "tolerances": {"identities": 1e-9, "hopf": 1e-9, "pluriclosed": 1e-7, "flat_gate": 1e-9},
    "output_dir": "out", "blowup_factor": 50, "field_file": "f.bin",
    "c1L": [[1, [0.5, 0.25]], [[0.5, -0.25], 2]], "lambda": -2.0,
    "points": [[[1, 0], [0, 1]], [0.5, 0.5]]})");
  const Scenario s = parse_scenario(full);
  CHECK(s.command == Command::static_);
  CHECK(s.family.kind == FamilyKind::torus_pluriclosed);
  CHECK(s.dims == Dims{8, 4, 16, 4});
  CHECK(*s.fixed_dt == 0.001);
  CHECK(s.variant == Variant::omega_form);
  CHECK(s.seed == 99);
  CHECK(s.tolerances.pluriclosed == 1e-7);
  CHECK(s.c1L(0, 1) == cplx{0.5, 0.25});
  CHECK(*s.lambda == -2.0);
  REQUIRE(s.points.size() == 2);
  CHECK(s.points[0][1] == cplx{0.0, 1.0});
}

TEST_CASE("scenario parsing rejects bad input") {
  auto rejects = [](const std::string& text) {
    try {
      parse_scenario(json::parse(text));
      return false;
    } catch (const Error& e) {
      return e.kind() == ErrorKind::config;
    }
  };
  CHECK(rejects(R"({"command": "flow", "colour": 1})"));
  CHECK(rejects(R"({"command": "flow", "family": {"kind": "flat", "eps": 0}})"));
  CHECK(rejects(R"({"command": "dance"})"));
  CHECK(rejects(R"({})"));
  CHECK(rejects(R"({"command": "identities", "count": 0})"));
  CHECK(rejects(R"({"command": "flow", "dims": [8, 8, 8]})"));
  CHECK(rejects(R"({"command": "flow", "dt": {"safety": 0.1, "fixed": 0.1}})"));
  CHECK(rejects(R"({"command": "flow", "t_end": -1})"));
  CHECK(rejects(R"({"command": "flow", "cadence": 1.5})"));
  CHECK(rejects(R"({"command": "flow", "seed": -3})"));
  CHECK(rejects(R"({"command": "flow", "variant": "ricci"})"));
  CHECK(rejects(R"({"command": "flow", "family": {"kind": "torus_pluriclosed", "epsilon": 1.0}})"));
  CHECK(rejects(R"({"command": "static", "lambda": 0})"));
  CHECK(rejects(R"({"command": "static", "c1L": [[1, 1], [0, 1]]})"));
  CHECK(rejects(R"({"command": "flow", "tolerances": {"identity": 1}})"));
  CHECK(rejects(R"({"command": "flow", "blowup_factor": 1})"));
}

TEST_CASE("exit code contract") {
  CHECK(exit_code(ErrorKind::config) == 2);
  CHECK(exit_code(ErrorKind::parse) == 2);
  CHECK(exit_code(ErrorKind::domain) == 2);
  CHECK(exit_code(ErrorKind::precondition) == 2);
  CHECK(exit_code(ErrorKind::blowup) == 3);
  CHECK(exit_code(ErrorKind::degenerate) == 3);
}

TEST_CASE("formatting and csv layout") {
  CHECK(format_double(0.1) == "0.10000000000000001");
  CHECK(format_double(2.0) == "2");
  DiagnosticsRecord r;
  r.step = 3;
  r.t = 0.5;
  const std::string csv = diagnostics_csv({r});
  CHECK(csv ==
        "step,t,vol,degree,E_w,maxT2,maxOmega,pluriclosed_resid,kahler_resid,dvol_dt_measured,"
        "dvol_dt_predicted\n3,0.5,0,0,0,0,0,0,0,0,0\n");
}

TEST_CASE("atomic write replaces content and leaves no temporary") {
  const fs::path dir = scratch("atomic");
  write_atomic((dir / "a.txt").string(), "one");
  write_atomic((dir / "a.txt").string(), "two");
  CHECK(slurp(dir / "a.txt") == "two");
  int files = 0;
  for (const auto& e : fs::directory_iterator(dir)) {
    (void)e;
    ++files;
  }
  CHECK(files == 1);
  CHECK_THROWS_AS(write_atomic("/nonexistent_dir/x/a.txt", "x"), Error);
}

TEST_CASE("cli identities") {
  const fs::path dir = scratch("identities");
  json cfg{{"command", "identities"}, {"seed", 7}, {"count", 200}, {"output_dir", (dir / "out").string()}};
  CliResult r = cli("identities", cfg, dir);
  CHECK(r.code == 0);
  const json rep = json::parse(slurp(dir / "out" / "identities_report.json"));
  CHECK(rep["status"] == "pass");
  for (const auto& item : rep["max_residuals"].items()) CHECK(item.value().get<double>() <= 1e-10);

  cfg["count"] = 0;
  CHECK(cli("identities", cfg, dir).code == 2);

  cfg["count"] = 20;
  cfg["tolerances"] = {{"identities", 1e-16}};
  r = cli("identities", cfg, dir);
  CHECK(r.code == 1);
  const json fail = json::parse(slurp(dir / "out" / "identities_report.json"));
  CHECK(fail["status"] == "fail");
  const std::string first = fail["first_failure"].get<std::string>();
  CHECK(!first.empty());
  CHECK(r.err.find(first) != std::string::npos);
}

TEST_CASE("cli rejects bad configs without writing output") {
  const fs::path dir = scratch("badcfg");
  const fs::path out = dir / "out";
  json cfg{{"command", "flow"}, {"typo_key", 1}, {"output_dir", out.string()}};
  CHECK(cli("flow", cfg, dir).code == 2);
  CHECK(!fs::exists(out));
  spit(dir / "broken.json", "{\"command\": \"flow\", ");
  const std::string cmd = std::string(PLURIGEO_CLI_PATH) + " flow --config " + (dir / "broken.json").string() +
                          " 2> /dev/null";
  CHECK(WEXITSTATUS(std::system(cmd.c_str())) == 2);
  cfg.erase("typo_key");
  CHECK(cli("static", cfg, dir).code == 2);
  CHECK(WEXITSTATUS(std::system((std::string(PLURIGEO_CLI_PATH) + " 2> /dev/null").c_str())) == 2);
  CHECK(WEXITSTATUS(std::system((std::string(PLURIGEO_CLI_PATH) + " flow 2> /dev/null").c_str())) == 2);
  CHECK(!fs::exists(out));
}

TEST_CASE("cli flow on flat data gives a constant series") {
  const fs::path dir = scratch("flowflat");
  const json cfg{{"command", "flow"}, {"family", {{"kind", "flat"}}}, {"dims", {8, 8, 8, 8}},
                 {"t_end", 0.2}, {"cadence", 2}, {"output_dir", (dir / "out").string()}};
  REQUIRE(cli("flow", cfg, dir).code == 0);
  std::ifstream csv(dir / "out" / "diagnostics.csv");
  std::string header, line;
  std::getline(csv, header);
  CHECK(header ==
        "step,t,vol,degree,E_w,maxT2,maxOmega,pluriclosed_resid,kahler_resid,dvol_dt_measured,"
        "dvol_dt_predicted");
  std::string first_vol;
  int rows = 0;
  while (std::getline(csv, line)) {
    std::stringstream ss(line);
    std::vector<std::string> cells;
    for (std::string c; std::getline(ss, c, ',');) cells.push_back(c);
    REQUIRE(cells.size() == 11);
    if (rows == 0) first_vol = cells[2];
    CHECK(cells[2] == first_vol);
    for (int k : {3, 4, 5, 6, 7, 8, 9, 10}) CHECK(cells[static_cast<std::size_t>(k)] == "0");
    ++rows;
  }
  CHECK(rows >= 3);
  const json sum = json::parse(slurp(dir / "out" / "summary.json"));
  CHECK(sum["status"] == "completed");
  CHECK(sum.contains("convention_audit"));
}

TEST_CASE("cli flow on torus_pluriclosed records the audit") {
  const fs::path dir = scratch("flowtorus");
  const json cfg{{"command", "flow"}, {"family", {{"kind", "torus_pluriclosed"}, {"epsilon", 0.5}}},
                 {"dims", {4, 4, 16, 4}}, {"t_end", 0.05}, {"output_dir", (dir / "out").string()}};
  REQUIRE(cli("flow", cfg, dir).code == 0);
  const json sum = json::parse(slurp(dir / "out" / "summary.json"));
  const json& audit = sum["convention_audit"];
  CHECK(audit["pluriclosed_preserved"] == true);
  CHECK(audit["volume_law_max_rel_error"].get<double>() <= 1e-3);
  CHECK(std::abs(audit["tnorm_evolution"]["attribution_ratio"].get<double>() - 1.0) < 1e-3);
  CHECK(sum["final"]["maxT2"].get<double>() < sum["initial"]["maxT2"].get<double>());
}

TEST_CASE("cli flow omega_form on non-pluriclosed field file is a precondition error") {
  const fs::path dir = scratch("omegaform");
  save_binary(sample(generic_metric, {8, 8, 8, 8}), (dir / "g.bin").string());
  const json cfg{{"command", "flow"}, {"variant", "omega_form"}, {"field_file", (dir / "g.bin").string()},
                 {"t_end", 0.01}, {"output_dir", (dir / "out").string()}};
  const CliResult r = cli("flow", cfg, dir);
  CHECK(r.code == 2);
  CHECK(r.err.find("pluriclosed") != std::string::npos);
  CHECK(!fs::exists(dir / "out" / "diagnostics.csv"));
}

TEST_CASE("cli static") {
  const fs::path dir = scratch("static");
  json cfg{{"command", "static"}, {"family", {{"kind", "flat"}}}, {"dims", {8, 8, 8, 8}},
           {"c1L", {{1, 0}, {0, -1}}}, {"output_dir", (dir / "flat").string()}};
  CHECK(cli("static", cfg, dir).code == 0);
  json rep = json::parse(slurp(dir / "flat" / "static_report.json"));
  CHECK(rep["sanity_gate"] == "pass");
  CHECK(rep["flat_field"] == true);
  for (const char* k : {"gap_volume", "gap_line_bundle", "lambda", "degree", "c1_squared"})
    CHECK(std::abs(rep[k].get<double>()) <= 1e-10);

  cfg["family"] = {{"kind", "torus_pluriclosed"}, {"epsilon", 0.5}};
  cfg["dims"] = {4, 4, 16, 4};
  cfg["lambda"] = 1.0;
  cfg["output_dir"] = (dir / "torus").string();
  CHECK(cli("static", cfg, dir).code == 0);
  rep = json::parse(slurp(dir / "torus" / "static_report.json"));
  CHECK(rep["residual_l2"].get<double>() > 0.0);
  CHECK(rep["lambda"].get<double>() < 0.0);
  CHECK(rep["hermitian_symplectic"]["identity_max"].get<double>() <= 1e-6);
  CHECK(rep["hermitian_symplectic"]["self_intersection"].get<double>() > 0.0);

  spit(dir / "corrupt.bin", "PLURIGEO\x01garbage");
  cfg.erase("family");
  cfg["field_file"] = (dir / "corrupt.bin").string();
  cfg["output_dir"] = (dir / "corrupt").string();
  const CliResult r = cli("static", cfg, dir);
  CHECK(r.code == 2);
  CHECK(!fs::exists(dir / "corrupt" / "static_report.json"));
}

TEST_CASE("cli hopf") {
  const fs::path dir = scratch("hopf");
  json cfg{{"command", "hopf"}, {"samples", 100}, {"seed", 1}, {"output_dir", (dir / "out").string()}};
  CHECK(cli("hopf", cfg, dir).code == 0);
  const json rep = json::parse(slurp(dir / "out" / "hopf_report.json"));
  CHECK(rep["max_rel_error_S"].get<double>() <= 1e-10);

  cfg["samples"] = 100000;
  const auto t0 = std::chrono::steady_clock::now();
  CHECK(cli("hopf", cfg, dir).code == 0);
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  CHECK(secs < 5.0);

  cfg["samples"] = 10;
  cfg["points"] = {{0, 0}};
  const CliResult r = cli("hopf", cfg, dir);
  CHECK(r.code == 2);
  CHECK(r.err.find("origin") != std::string::npos);
}

TEST_CASE("cli overrides and byte-identical reruns") {
  const fs::path dir = scratch("overrides");
  const json cfg{{"command", "hopf"}, {"samples", 50}, {"seed", 1}, {"output_dir", (dir / "unused").string()}};
  REQUIRE(cli("hopf", cfg, dir, "--out " + (dir / "a").string() + " --seed 12").code == 0);
  REQUIRE(cli("hopf", cfg, dir, "--out " + (dir / "b").string() + " --seed 12").code == 0);
  CHECK(!fs::exists(dir / "unused"));
  const json a = json::parse(slurp(dir / "a" / "hopf_report.json"));
  CHECK(a["seed"] == 12);
  CHECK(slurp(dir / "a" / "hopf_report.json") == slurp(dir / "b" / "hopf_report.json"));
}
