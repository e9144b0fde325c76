#include "polar_ray/scenario.hpp"

#include <fstream>
#include <sstream>

#include <json.hpp>

namespace polar_ray {

namespace {

using Json = nlohmann::ordered_json;

const char* kCylinderJson = R"json({
  "name": "cylinder",
  "model": {"n": 1, "k": 0, "r": 0, "B": []},
  "rho": "y1^2",
  "phi": "mu1^2 / 2",
  "points": [
    [[2.718281828459045, 0.0]],
    [[1.0, 0.0]]
  ],
  "t_grid": [0.0, 1.0, 10.0, 100.0],
  "truncation": 30
})json";

const char* kWeightedC2Json = R"json({
  "name": "weighted-c2",
  "model": {"n": 1, "k": 1, "r": 2, "B": [[1, 2]]},
  "rho": "z1*zb1 + z2*zb2",
  "phi": "mu1^2 / 2",
  "points": [
    [[1.0, 0.0], [0.0, 0.0]],
    [[1.0, 0.0], [1.0, 0.0]],
    [[0.0, 0.0], [0.0, 0.0]]
  ],
  "t_grid": [0.0, 1.0, 10.0, 100.0],
  "truncation": 30
})json";

const char* kMixedTcCJson = R"json({
  "name": "mixed-tc-c",
  "model": {"n": 2, "k": 1, "r": 1, "B": [[1]]},
  "rho": "y1^2 + z1*zb1",
  "phi": "mu1^2/2 + mu2^2/2 + mu1*mu2/4",
  "points": [
    [[2.718281828459045, 0.0], [1.0, 0.0]],
    [[1.0, 0.0], [0.5, 0.5]],
    [[1.0, 0.0], [0.0, 0.0]]
  ],
  "t_grid": [0.0, 1.0, 10.0, 100.0],
  "truncation": 30
})json";

double require_number(const Json& j, const std::string& what) {
  if (!j.is_number())
    throw Error(Errc::ParseError, what + " must be a number");
  return j.get<double>();
}

void apply_tolerance_overrides(Tolerances& tol, const Json& j) {
  auto get = [&](const char* key, double& slot) {
    if (j.contains(key)) slot = require_number(j.at(key), std::string("tolerances.") + key);
  };
  get("invariance", tol.invariance);
  get("deriv_fd", tol.deriv_fd);
  get("moment_identity", tol.moment_identity);
  get("jac_y_symmetry", tol.jac_y_symmetry);
  get("bracket_commute", tol.bracket_commute);
  get("flow_series", tol.flow_series);
  get("flow_angle", tol.flow_angle);
  get("flow_linearity", tol.flow_linearity);
  get("law_residual", tol.law_residual);
  get("block_det_identity", tol.block_det_identity);
  get("j_square", tol.j_square);
  get("j_compatibility", tol.j_compatibility);
  get("j_standard_t0", tol.j_standard_t0);
  get("g_symmetry", tol.g_symmetry);
  get("pd_ratio", tol.pd_ratio);
  get("type_11", tol.type_11);
  get("transition", tol.transition);
  get("lagrangian", tol.lagrangian);
  get("kahler_min_angle", tol.kahler_min_angle);
  get("p_t0_matches_p_j", tol.p_t0_matches_p_j);
}

Json tolerance_overrides_json(const Tolerances& tol) {
  const Tolerances defaults;
  Json out = Json::object();
  auto put = [&](const char* key, double value, double dflt) {
    if (value != dflt) out[key] = value;
  };
  put("invariance", tol.invariance, defaults.invariance);
  put("deriv_fd", tol.deriv_fd, defaults.deriv_fd);
  put("moment_identity", tol.moment_identity, defaults.moment_identity);
  put("jac_y_symmetry", tol.jac_y_symmetry, defaults.jac_y_symmetry);
  put("bracket_commute", tol.bracket_commute, defaults.bracket_commute);
  put("flow_series", tol.flow_series, defaults.flow_series);
  put("flow_angle", tol.flow_angle, defaults.flow_angle);
  put("flow_linearity", tol.flow_linearity, defaults.flow_linearity);
  put("law_residual", tol.law_residual, defaults.law_residual);
  put("block_det_identity", tol.block_det_identity, defaults.block_det_identity);
  put("j_square", tol.j_square, defaults.j_square);
  put("j_compatibility", tol.j_compatibility, defaults.j_compatibility);
  put("j_standard_t0", tol.j_standard_t0, defaults.j_standard_t0);
  put("g_symmetry", tol.g_symmetry, defaults.g_symmetry);
  put("pd_ratio", tol.pd_ratio, defaults.pd_ratio);
  put("type_11", tol.type_11, defaults.type_11);
  put("transition", tol.transition, defaults.transition);
  put("lagrangian", tol.lagrangian, defaults.lagrangian);
  put("kahler_min_angle", tol.kahler_min_angle, defaults.kahler_min_angle);
  put("p_t0_matches_p_j", tol.p_t0_matches_p_j, defaults.p_t0_matches_p_j);
  return out;
}

}  // namespace

Scenario parse_scenario(const std::string& json_text) {
  Json j;
  try {
    j = Json::parse(json_text);
  } catch (const std::exception& e) {
    throw Error(Errc::ParseError, std::string("scenario JSON: ") + e.what());
  }
  try {
    Scenario s;
    if (j.contains("name")) s.name = j.at("name").get<std::string>();

    const Json& jm = j.at("model");
    const int n = jm.at("n").get<int>();
    const int k = jm.at("k").get<int>();
    const int r = jm.at("r").get<int>();
    Eigen::MatrixXi weights(k, r);
    const Json& jb = jm.at("B");
    if (static_cast<int>(jb.size()) != k)
      throw Error(Errc::DimensionMismatch, "B must have k rows");
    for (int g = 0; g < k; ++g) {
      if (static_cast<int>(jb.at(g).size()) != r)
        throw Error(Errc::DimensionMismatch, "B rows must have r entries");
      for (int l = 0; l < r; ++l) weights(g, l) = jb.at(g).at(l).get<int>();
    }
    s.model = build_model(n, k, r, weights);

    s.rho_text = j.at("rho").get<std::string>();
    s.phi_text = j.at("phi").get<std::string>();
    s.rho = ScalarField::parse(s.rho_text);
    s.phi = ScalarField::parse(s.phi_text);

    for (const Json& jp : j.at("points")) {
      if (static_cast<int>(jp.size()) != s.model.m_complex)
        throw Error(Errc::DimensionMismatch, "each point needs m coordinate pairs");
      Eigen::VectorXcd w(s.model.torus_dim());
      Eigen::VectorXcd z(s.model.r_fiber);
      for (int a = 0; a < s.model.m_complex; ++a) {
        const Json& pair = jp.at(a);
        if (pair.size() != 2) throw Error(Errc::ParseError, "coordinates are [re, im] pairs");
        const Complex value(require_number(pair.at(0), "coordinate"),
                            require_number(pair.at(1), "coordinate"));
        if (a < s.model.torus_dim())
          w(a) = value;
        else
          z(a - s.model.torus_dim()) = value;
      }
      s.points.push_back(make_point(s.model, w, z));
    }
    if (s.points.empty()) throw Error(Errc::ParseError, "scenario needs at least one point");

    for (const Json& jt : j.at("t_grid")) s.t_grid.push_back(require_number(jt, "t_grid entry"));
    if (s.t_grid.empty()) throw Error(Errc::ParseError, "t_grid must be nonempty");
    for (size_t i = 0; i < s.t_grid.size(); ++i) {
      if (s.t_grid[i] < 0.0) throw Error(Errc::ParseError, "t_grid entries must be >= 0");
      if (i > 0 && !(s.t_grid[i] > s.t_grid[i - 1]))
        throw Error(Errc::ParseError, "t_grid must be strictly increasing");
    }

    if (j.contains("truncation")) {
      s.truncation = j.at("truncation").get<int>();
      if (s.truncation < 1) throw Error(Errc::ParseError, "truncation must be >= 1");
    }
    if (j.contains("tolerances")) apply_tolerance_overrides(s.tolerances, j.at("tolerances"));
    if (j.contains("output")) {
      const Json& jo = j.at("output");
      if (jo.contains("report")) s.out_report = jo.at("report").get<std::string>();
      if (jo.contains("csv_dir")) s.out_csv_dir = jo.at("csv_dir").get<std::string>();
    }
    return s;
  } catch (const Error&) {
    throw;
  } catch (const std::exception& e) {
    throw Error(Errc::ParseError, std::string("scenario JSON: ") + e.what());
  }
}

Scenario load_scenario_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(Errc::IoError, "cannot open scenario file '" + path + "'");
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return parse_scenario(buffer.str());
}

std::string serialize_scenario(const Scenario& s) {
  Json j = Json::object();
  if (!s.name.empty()) j["name"] = s.name;
  Json jm = Json::object();
  jm["n"] = s.model.n_torus;
  jm["k"] = s.model.k_stab;
  jm["r"] = s.model.r_fiber;
  Json jb = Json::array();
  for (int g = 0; g < s.model.k_stab; ++g) {
    Json row = Json::array();
    for (int l = 0; l < s.model.r_fiber; ++l) row.push_back(s.model.weights(g, l));
    jb.push_back(row);
  }
  jm["B"] = jb;
  j["model"] = jm;
  j["rho"] = s.rho.expr().to_string();
  j["phi"] = s.phi.expr().to_string();
  Json jpoints = Json::array();
  for (const ModelPoint& p : s.points) {
    Json jp = Json::array();
    for (Eigen::Index a = 0; a < p.w.size(); ++a)
      jp.push_back(Json::array({p.w(a).real(), p.w(a).imag()}));
    for (Eigen::Index a = 0; a < p.z.size(); ++a)
      jp.push_back(Json::array({p.z(a).real(), p.z(a).imag()}));
    jpoints.push_back(jp);
  }
  j["points"] = jpoints;
  j["t_grid"] = s.t_grid;
  j["truncation"] = s.truncation;
  const Json tol = tolerance_overrides_json(s.tolerances);
  if (!tol.empty()) j["tolerances"] = tol;
  if (s.out_report || s.out_csv_dir) {
    Json jo = Json::object();
    if (s.out_report) jo["report"] = *s.out_report;
    if (s.out_csv_dir) jo["csv_dir"] = *s.out_csv_dir;
    j["output"] = jo;
  }
  return j.dump(2) + "\n";
}

std::vector<std::string> list_builtins() { return {"cylinder", "weighted-c2", "mixed-tc-c"}; }

bool is_builtin(const std::string& name) {
  for (const std::string& b : list_builtins())
    if (b == name) return true;
  return false;
}

Scenario builtin_scenario(const std::string& name) {
  if (name == "cylinder") return parse_scenario(kCylinderJson);
  if (name == "weighted-c2") return parse_scenario(kWeightedC2Json);
  if (name == "mixed-tc-c") return parse_scenario(kMixedTcCJson);
  throw Error(Errc::IoError, "unknown builtin scenario '" + name + "'");
}

}  // namespace polar_ray
