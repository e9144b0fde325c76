#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "polar_ray/model.hpp"

namespace polar_ray {

inline constexpr const char* kVersion = "0.1.0";
inline constexpr std::uint64_t kDefaultSeed = 12345;
inline constexpr int kDefaultTruncation = 30;

// Per-check tolerances; scenario files may override any of them by name.
struct Tolerances {
  double invariance = 1e-10;
  double deriv_fd = 1e-6;          // relative
  double moment_identity = 1e-8;
  double jac_y_symmetry = 1e-10;
  double bracket_commute = 1e-8;
  double flow_series = 1e-9;       // relative
  double flow_angle = 1e-12;
  double flow_linearity = 1e-12;
  double law_residual = 1e-9;
  double block_det_identity = 1e-9;
  double j_square = 1e-9;
  double j_compatibility = 1e-9;
  double j_standard_t0 = 1e-12;
  double g_symmetry = 1e-10;
  double pd_ratio = 1e-10;         // scale-free positive definiteness
  double type_11 = 1e-8;
  double transition = 1e-9;
  double lagrangian = 1e-9;
  double kahler_min_angle = 1e-6;
  double p_t0_matches_p_j = 1e-10;
};

struct Scenario {
  std::string name;  // empty for file-loaded scenarios without one
  LocalModel model;
  ScalarField rho{Expr::constant(0.0)};
  ScalarField phi{Expr::constant(0.0)};
  std::string rho_text;
  std::string phi_text;
  std::vector<ModelPoint> points;
  std::vector<double> t_grid;
  int truncation = kDefaultTruncation;
  Tolerances tolerances;
  std::optional<std::string> out_report;
  std::optional<std::string> out_csv_dir;
};

Scenario parse_scenario(const std::string& json_text);
Scenario load_scenario_file(const std::string& path);

// Canonical JSON form; parse-serialize is idempotent on this representation.
std::string serialize_scenario(const Scenario& scenario);

std::vector<std::string> list_builtins();
bool is_builtin(const std::string& name);
Scenario builtin_scenario(const std::string& name);

}  // namespace polar_ray
