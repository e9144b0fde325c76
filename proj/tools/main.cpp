#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "polar_ray/runner.hpp"

namespace {

using namespace polar_ray;

std::uint64_t resolve_seed(bool seed_given, std::uint64_t cli_seed) {
  std::uint64_t seed = seed_given ? cli_seed : kDefaultSeed;
  // POLAR_RAY_SEED overrides whatever was passed on the command line.
  if (const char* env = std::getenv("POLAR_RAY_SEED")) {
    try {
      seed = std::stoull(env);
    } catch (const std::exception&) {
      throw Error(Errc::ParseError, "POLAR_RAY_SEED is not an integer");
    }
  }
  return seed;
}

int run_command(const std::string& scenario_arg, const std::string& out_path,
                const std::string& csv_dir, bool seed_given, std::uint64_t cli_seed,
                int truncation) {
  Scenario scenario;
  if (!std::filesystem::exists(scenario_arg) && is_builtin(scenario_arg))
    scenario = builtin_scenario(scenario_arg);
  else
    scenario = load_scenario_file(scenario_arg);

  RunOptions options;
  options.seed = resolve_seed(seed_given, cli_seed);
  if (truncation > 0) options.truncation = truncation;

  const Report report = run_scenario(scenario, options);

  const std::string report_path =
      !out_path.empty() ? out_path : scenario.out_report.value_or("");
  if (!report_path.empty()) write_report_file(report, report_path);
  const std::string csv_path =
      !csv_dir.empty() ? csv_dir : scenario.out_csv_dir.value_or("");
  if (!csv_path.empty()) write_csv_tables(report, csv_path);

  for (const CheckRecord& r : report.records) {
    if (!r.passed() && !r.skipped())
      std::cout << "[FAIL] " << r.check << " point=" << r.point
                << (r.t ? " t=" + std::to_string(*r.t) : "") << " value=" << r.value
                << " tolerance=" << r.tolerance << " (" << r.status << ")\n";
  }
  std::cout << (report.overall_pass ? "PASS" : "FAIL") << ": " << report.passed
            << " passed, " << report.failed << " failed, " << report.skipped
            << " skipped (scenario "
            << (report.scenario_name.empty() ? scenario_arg : report.scenario_name)
            << ", seed " << report.seed << ")\n";
  return exit_code(report);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Checks for torus-symmetric Kahler local models: moment maps, "
               "imaginary-time flows, and the degeneration of Kahler polarizations"};
  app.require_subcommand(1);

  std::string scenario_arg;
  std::string out_path;
  std::string csv_dir;
  std::uint64_t cli_seed = kDefaultSeed;
  int truncation = 0;
  CLI::App* run = app.add_subcommand("run", "run the check battery for a scenario");
  run->add_option("scenario", scenario_arg, "scenario JSON file or builtin name")->required();
  run->add_option("--out", out_path, "write the JSON report here");
  run->add_option("--csv", csv_dir, "write CSV tables into this directory");
  CLI::Option* seed_opt = run->add_option("--seed", cli_seed, "group-sampling seed");
  run->add_option("--truncation", truncation, "Lie series truncation override");

  CLI::App* list = app.add_subcommand("list", "list builtin scenarios");

  std::string report_path;
  std::string plot_path;
  CLI::App* plot = app.add_subcommand("plot-data", "extract (t, angle) CSV from a report");
  plot->add_option("report", report_path, "report JSON produced by run")->required();
  plot->add_option("out", plot_path, "output CSV path")->required();

  try {
    app.parse(argc, argv);
    if (list->parsed()) {
      for (const std::string& name : polar_ray::list_builtins()) std::cout << name << "\n";
      return 0;
    }
    if (plot->parsed()) {
      polar_ray::emit_plot_data(report_path, plot_path);
      return 0;
    }
    return run_command(scenario_arg, out_path, csv_dir, seed_opt->count() > 0, cli_seed,
                       truncation);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  } catch (const polar_ray::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
}
