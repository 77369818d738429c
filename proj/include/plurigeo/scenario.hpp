#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "plurigeo/flow_engine.hpp"

namespace plurigeo {

enum class Command { identities, flow, static_, hopf };

Command parse_command(const std::string& s);
std::string to_string(Command c);

struct Tolerances {
  double identities = 1e-10;
  double hopf = 1e-10;
  double pluriclosed = 1e-6;
  double flat_gate = 1e-10;
};

/// One batch job. Every key of the JSON config maps to one field here.
struct Scenario {
  Command command = Command::identities;
  MetricFamily family;
  Dims dims{16, 4, 16, 4};
  double dt_safety = 0.05;
  std::optional<double> fixed_dt;
  double t_end = 0.5;
  int cadence = 10;
  Variant variant = Variant::gflow;
  std::uint64_t seed = 7;
  long count = 1000;
  long samples = 100;
  Tolerances tolerances;
  std::string output_dir = ".";
  double blowup_factor = 1e3;
  std::optional<std::string> field_file;
  Mat2 c1L = Mat2::Zero();
  std::optional<double> lambda;
  std::vector<std::array<cplx, 2>> points;

  void check() const;
};

/// Throws config error on unknown keys, wrong types or out-of-range values.
Scenario parse_scenario(const nlohmann::json& j);
Scenario load_scenario(const std::string& path);

/// Exit-code contract: 0 success, 1 tolerance failure, 2 usage or config,
/// 3 numerical failure.
enum ExitCode : int { exit_ok = 0, exit_tolerance = 1, exit_usage = 2, exit_numerical = 3 };
int exit_code(ErrorKind kind);

/// Runs the command and writes its files under output_dir.
/// Messages go to `log`; errors propagate as plurigeo::Error.
int run_scenario(const Scenario& sc, std::ostream& log);

/// Individual campaigns; each returns the report it wrote.
nlohmann::json identities_campaign(const Scenario& sc, int& code, std::ostream& log);
nlohmann::json flow_campaign(const Scenario& sc, int& code, std::ostream& log);
nlohmann::json static_campaign(const Scenario& sc, int& code, std::ostream& log);
nlohmann::json hopf_campaign(const Scenario& sc, int& code, std::ostream& log);

/// %.17g rendering shared by every output file.
std::string format_double(double v);

std::string diagnostics_csv(const std::vector<DiagnosticsRecord>& series);

/// Writes to a temporary sibling then renames over `path`.
void write_atomic(const std::string& path, const std::string& content);

}  // namespace plurigeo
