#pragma once

// Subcommands behind the jcanyon executable. Each command fills a Table that
// is emitted as CSV or JSON; run_cli wires flags, config files and exit codes.

#include <functional>
#include <iosfwd>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "json.hpp"

namespace jcanyon::cli {

enum ExitCode : int {
  kOk = 0,
  kFailure = 1,
  kCrossCheck = 2,
  kAdiabaticity = 3,
  kConfig = 4,
};

/// Angles in radians, or symbolic multiples of pi: "4pi", "2pi/3", "-pi/2",
/// "0.5*pi", "pi". Throws ConfigError.
double parse_angle(const std::string& text);

struct RunConfig {
  // output
  std::string output;
  std::string format = "csv";
  bool strict = false;
  int jobs = 0;
  // model
  int m = 2;
  int n = 0;
  int n_prime = 0;
  double lambda = 1.0;
  double delta = 0.0;  // in units of lambda_m
  double omega_solid = 12.566370614359172;
  int steps = 1024;
  // adiabatic run
  bool adiabatic = false;
  double time = 200.0;  // in units of 1/lambda_m
  std::string profile = "smoothstep";
  std::string timing = "samples";
  std::string phase_mode = "echo";
  // tolerances
  double crosscheck_tol = 1e-6;
  double adiabatic_tol = 1e-2;
  // sweeps
  std::string m_list = "1,2,3";
  double delta_min = 0.0;
  double delta_max = 10.0;
  int points = 0;  // 0 selects the command default
  bool holonomy = true;
  std::string sweep = "omega";
  double omega_min = 0.0;
  double omega_max = 12.566370614359172;
  // trap
  double eta = 0.1;
  double g = 1.0;
  double nu = 10.0;
  std::string pulses = "finite";
  bool snap = true;
  bool dressed_snap = true;
  int max_dim = 4096;
  // selftest
  unsigned long long seed = 20240601;
  int cases = 40;

  nlohmann::json to_json() const;
  bool operator==(const RunConfig&) const = default;
};

struct Field {
  std::string name;
  std::string help;
  std::function<void(const std::string&)> set;  // throws ConfigError
  std::function<std::string()> get;
  std::function<nlohmann::json()> value;  // typed form for JSON output
};

/// Every configurable field bound to cfg. Names double as flags (--name) and
/// config-file keys.
std::vector<Field> config_fields(RunConfig& cfg);

/// Applies a flat "key = value" document; '#' starts a comment. Errors carry
/// origin:line and the offending field.
void apply_config_text(RunConfig& cfg, const std::string& text, const std::string& origin = "config");
void apply_config_file(RunConfig& cfg, const std::string& path);
/// Writes every field in config-file form; apply_config_text reads it back
/// to an equal RunConfig.
std::string format_config(const RunConfig& cfg);

using Cell = std::variant<double, long long, std::string>;

struct Table {
  std::vector<std::string> header;
  std::vector<std::vector<Cell>> rows;
  nlohmann::json diagnostics = nlohmann::json::object();
  bool crosscheck_failed = false;
  bool adiabatic_failed = false;
};

std::string format_cell(const Cell& c);
std::string to_csv(const Table& t);
std::string to_json(const Table& t, const RunConfig& cfg);

Table cmd_phase(const RunConfig& cfg);
Table cmd_fig1(const RunConfig& cfg);
Table cmd_transmute(const RunConfig& cfg);
Table cmd_two_anyon(const RunConfig& cfg);
Table cmd_ramsey(const RunConfig& cfg);
Table cmd_selftest(const RunConfig& cfg);

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace jcanyon::cli
