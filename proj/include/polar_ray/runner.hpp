#pragma once

#include <optional>
#include <string>
#include <vector>

#include "polar_ray/polarization.hpp"
#include "polar_ray/scenario.hpp"

namespace polar_ray {

struct CheckRecord {
  std::string check;
  int point = -1;               // -1: scenario-global
  std::optional<double> t;      // empty: not t-indexed
  double value = 0.0;
  double tolerance = 0.0;
  std::string status;           // "pass" | "fail" | "skipped:<reason>" | "error:<code>"

  bool passed() const { return status == "pass"; }
  bool skipped() const { return status.rfind("skipped:", 0) == 0; }
};

struct SweepTable {
  int point = 0;
  std::vector<SweepRow> rows;
};

struct Report {
  std::string scenario_name;
  std::uint64_t seed = kDefaultSeed;
  int truncation = kDefaultTruncation;
  std::vector<CheckRecord> records;
  std::vector<SweepTable> sweeps;

  int passed = 0;
  int failed = 0;
  int skipped = 0;
  bool overall_pass = false;
};

struct RunOptions {
  std::uint64_t seed = kDefaultSeed;
  std::optional<int> truncation = std::nullopt;  // overrides the scenario value
};

// Runs the full check battery.  Throws NonInvariantPotential (an input error)
// when the scenario's rho fails invariance validation; numerical check
// failures are recorded in the report instead.
Report run_scenario(const Scenario& scenario, const RunOptions& options = {});

// Deterministic JSON body; the timestamp field is the only run-varying part.
std::string report_to_json(const Report& report, const std::string& timestamp = "");

Report report_from_json(const std::string& json_text);

void write_report_file(const Report& report, const std::string& path);
void write_csv_tables(const Report& report, const std::string& directory);

// CSV (t, angle_max) of the first sweep in a report file.
void emit_plot_data(const std::string& report_json_path, const std::string& out_csv_path);

inline int exit_code(const Report& report) { return report.overall_pass ? 0 : 1; }

}  // namespace polar_ray
