#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "dwc/direct_integral.hpp"
#include "json.hpp"

namespace dwc {

/// Validation or parse failure; field() names the offending key ("" for syntax errors).
class ConfigError : public std::runtime_error {
 public:
  ConfigError(std::string field, const std::string& message)
      : std::runtime_error(field.empty() ? message : field + ": " + message), field_(std::move(field)) {}
  const std::string& field() const { return field_; }

 private:
  std::string field_;
};

/// Parses literals such as "x1^2/2 + x2^2/2", "p1*x2 - i*h*x1" or "(1 + x1)*x2".
/// Variables: x1..xn (position), p1..pn or xi1..xin (momentum), h or hbar, the unit i.
PolySymbol parse_polynomial(const std::string& text, std::size_t n);

struct GaussSpec {
  std::string poly;
  double exponent = 0.5;
};

struct SuiteConfig {
  std::size_t n = 2;
  std::string hamiltonian_literal;
  PolySymbol hamiltonian{2};
  bool momentum_space = false;
  GridConfig grid;
  std::vector<double> hbar = {1.0, 0.1};

  std::vector<std::vector<std::string>> field_literals;
  std::vector<VectorField> fields;
  std::vector<GaussSpec> test_function_specs;
  std::vector<GaussPoly> test_functions;

  double tolerance = 1e-6;
  std::map<std::string, double> tolerances;
  std::uint64_t seed = 20240611;
  int random_trials = 100;
  int field_trials = 50;

  int evolve_nodes = 256;
  int evolve_steps = 1024;
  std::vector<double> evolve_times = {0.5, 3.141592653589793, 6.283185307179586};
  std::vector<std::string> evolve_field = {"-(2 + x1)*x2", "(2 + x1)*x1"};

  int sweep_nodes = 1024;
  std::vector<double> sweep_hbar = {0.5, 0.25, 0.125, 0.0625};

  std::optional<std::vector<std::string>> checks;
  std::string out_dir = ".";
  std::vector<std::string> formats = {"json"};

  /// The config as given, with defaults filled; feeds the input digests.
  nlohmann::ordered_json normalized;

  double tolerance_for(const std::string& check) const;
};

SuiteConfig parse_config_text(const std::string& text);
SuiteConfig parse_config(const std::string& path);

struct Table {
  std::string name;
  std::vector<std::string> columns;
  std::vector<std::vector<double>> rows;
};

struct Record {
  std::string name;
  std::string inputs_digest;
  /// Exact checks carry exact_pass and no residual.
  std::optional<double> residual;
  std::optional<bool> exact_pass;
  double tolerance = 0.0;
  bool passed = false;
  double wall_time = 0.0;
  std::string error;
  nlohmann::ordered_json details = nlohmann::ordered_json::object();
  std::optional<Table> table;
};

struct Report {
  std::string command;
  std::vector<Record> records;

  bool passed() const;
};

inline const std::vector<std::string>& subcommands() {
  static const std::vector<std::string> names = {"identities", "coarea", "unitarity", "commutation",
                                                 "evolve",     "kernel", "sweep",     "all"};
  return names;
}

/// Runs the checks of one subcommand on up to jobs threads; records come back in a fixed order.
Report run_suite(const SuiteConfig& config, const std::string& which, int jobs = 1);

/// Report as JSON; wall times are omitted when include_timing is false.
nlohmann::ordered_json report_to_json(const Report& report, bool include_timing = true);
Report report_from_json(const nlohmann::ordered_json& j);

/// Writes report.json and, when "csv" is requested, records.csv plus one CSV per table.
/// Returns the paths written.
std::vector<std::string> emit_report(const Report& report, const std::string& dir, const std::vector<std::string>& formats);

}  // namespace dwc
