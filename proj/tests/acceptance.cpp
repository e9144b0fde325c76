// Acceptance battery: desk-scale closed-form checks, one line per criterion.
// Exit status is nonzero if any criterion fails.

#include <cmath>
#include <cstdio>
#include <functional>
#include <string>
#include <vector>

#include "polar_ray/polarization.hpp"
#include "polar_ray/runner.hpp"
#include "polar_ray/scenario.hpp"

using namespace polar_ray;

namespace {

int g_failures = 0;

void criterion(int number, const std::string& label, const std::function<bool()>& body) {
  bool ok = false;
  std::string detail;
  try {
    ok = body();
  } catch (const std::exception& e) {
    detail = std::string(" (") + e.what() + ")";
  }
  std::printf("[%s] criterion %d: %s%s\n", ok ? "PASS" : "FAIL", number, label.c_str(),
              detail.c_str());
  if (!ok) ++g_failures;
}

bool check(bool condition, const char* what, double value = 0.0) {
  if (!condition) std::printf("        failed: %s (value %.17g)\n", what, value);
  return condition;
}

struct Fixture {
  Scenario scenario;
  ScalarField rho;

  explicit Fixture(const std::string& name)
      : scenario(builtin_scenario(name)), rho(scenario.rho.mark_invariance_validated()) {}
};

std::vector<int> regular_points(const Fixture& f) {
  std::vector<int> out;
  for (int i = 0; i < static_cast<int>(f.scenario.points.size()); ++i)
    if (regularity(f.scenario.model, f.scenario.points[i]).is_regular) out.push_back(i);
  return out;
}

const double kESquared = 7.3890560989306495;

bool criterion_flow_series() {
  const Fixture f("cylinder");
  const ModelPoint& p = f.scenario.points[0];  // w = e
  const FlowState state = closed_flow(f.scenario.model, f.rho, f.scenario.phi, p, 1.0);
  bool ok = check(std::abs(state.w_t(0) - Complex(kESquared, 0.0)) <= 1e-9 * kESquared,
                  "closed flow reaches e^2", std::abs(state.w_t(0)));
  const auto [series, diag] =
      lie_series(f.scenario.model, f.rho, f.scenario.phi, p, 1.0, CoordId::w(1), 30);
  ok &= check(std::abs(series - state.w_t(0)) <= 1e-9 * std::abs(state.w_t(0)),
              "series at N=30 matches within 1e-9 relative", std::abs(series - state.w_t(0)));
  ok &= check(diag.converged, "series diagnostics report convergence");
  return ok;
}

bool criterion_block_determinant() {
  bool ok = true;
  const Fixture cyl("cylinder");
  for (double t : {0.0, 1.0, 10.0, 100.0}) {
    const double det =
        block_matrix(cyl.scenario.model, cyl.rho, cyl.scenario.phi, cyl.scenario.points[0], t)
            .second;
    ok &= check(std::abs(det - (1.0 + t)) <= 1e-9, "cylinder block det equals 1 + t", det);
  }
  for (const std::string& name : list_builtins()) {
    const Fixture f(name);
    for (const ModelPoint& p : f.scenario.points) {
      for (double t : f.scenario.t_grid) {
        try {
          const double det =
              block_matrix(f.scenario.model, f.rho, f.scenario.phi, p, t).second;
          ok &= check(det > 0.0 && std::isfinite(det),
                      (name + " block det positive over the grid").c_str(), det);
        } catch (const Error& e) {
          // Points with a degenerate torus moment Jacobian fall outside the
          // nondegeneracy statement; none of the builtins hit this.
          ok &= check(e.code() == Errc::SingularA, "unexpected block_matrix error");
        }
      }
    }
  }
  return ok;
}

bool criterion_kahler_compatibility() {
  bool ok = true;
  for (const std::string& name : {std::string("weighted-c2"), std::string("mixed-tc-c")}) {
    const Fixture f(name);
    for (int pi : regular_points(f)) {
      for (double t : f.scenario.t_grid) {
        const ComplexStructureAt cs =
            complex_structure(f.scenario.model, f.rho, f.scenario.phi, f.scenario.points[pi], t);
        const Eigen::MatrixXd sym = (cs.g + cs.g.transpose()) / 2.0;
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(sym);
        const double ratio =
            eig.eigenvalues().minCoeff() / eig.eigenvalues().cwiseAbs().maxCoeff();
        ok &= check((cs.g - cs.g.transpose()).cwiseAbs().maxCoeff() <= 1e-10,
                    (name + " g_t symmetric").c_str());
        ok &= check(ratio > 1e-10, (name + " g_t positive definite (scale-free)").c_str(),
                    ratio);
        const double t11 =
            check_type_11(f.scenario.model, f.rho, f.scenario.phi, f.scenario.points[pi], t);
        ok &= check(t11 <= 1e-8, (name + " type-(1,1) residual").c_str(), t11);
      }
    }
  }
  return ok;
}

bool criterion_gluing() {
  bool ok = true;
  for (const std::string& name : {std::string("cylinder"), std::string("mixed-tc-c")}) {
    const Fixture f(name);
    const ModelPoint& p = f.scenario.points[0];
    const MomentValue mv = moment_map(f.scenario.model, f.rho, p);
    const double rate =
        flow_rates(f.scenario.model, phi_gradient(f.scenario.model, f.scenario.phi, mv.mu))(0);
    for (double t : {0.0, 1.0, 5.0}) {
      const int trunc = recommended_truncation(2.0 * t * rate);
      const double transition = check_transition_consistency(
          f.scenario.model, f.rho, f.scenario.phi, p, t, LaurentPoly::monomial(-1), 1, trunc);
      ok &= check(transition <= 1e-9, (name + " transition 1/w residual").c_str(), transition);
      const double commuting = check_commuting_formula(
          f.scenario.model, f.rho, f.scenario.phi, p, t, LaurentPoly::monomial(2),
          CoordId::w(1), trunc);
      ok &= check(commuting <= 1e-9, (name + " commuting w^2 residual").c_str(), commuting);
    }
  }
  return ok;
}

bool criterion_p_mix() {
  bool ok = true;
  for (const std::string& name : list_builtins()) {
    const Fixture f(name);
    for (int pi : regular_points(f)) {
      const auto [space, report] =
          build_P_mix(f.scenario.model, f.rho, f.scenario.points[pi]);
      ok &= check(report.dim == f.scenario.model.m_complex, (name + " dim P_mix = m").c_str(),
                  report.dim);
      ok &= check(report.lagrangian_residual <= 1e-9, (name + " Lagrangian residual").c_str(),
                  report.lagrangian_residual);
      ok &= check(report.real_rank == f.scenario.model.n_torus,
                  (name + " real rank = n").c_str(), report.real_rank);
    }
  }
  return ok;
}

bool criterion_convergence() {
  bool ok = true;
  {
    const Fixture f("cylinder");
    const auto rows = convergence_sweep(f.scenario.model, f.rho, f.scenario.phi,
                                        f.scenario.points[0], f.scenario.t_grid);
    for (size_t i = 0; i < rows.size(); ++i) {
      const double expected = std::atan(1.0 / (1.0 + rows[i].t));
      ok &= check(std::abs(rows[i].angle_max - expected) <= 1e-8,
                  "cylinder angle equals arctan(1/(1+t))",
                  std::abs(rows[i].angle_max - expected));
    }
    const SweepRow& last = rows.back();
    const double normalized = last.angle_max * (1.0 + last.t);
    ok &= check(last.t == 100.0 && normalized >= 0.98 && normalized <= 1.02,
                "cylinder angle*(1+t) lands in [0.98, 1.02] at t = 100", normalized);
  }
  for (const std::string& name : {std::string("weighted-c2"), std::string("mixed-tc-c")}) {
    const Fixture f(name);
    for (int pi : regular_points(f)) {
      const auto rows = convergence_sweep(f.scenario.model, f.rho, f.scenario.phi,
                                          f.scenario.points[pi], f.scenario.t_grid);
      for (size_t i = 1; i < rows.size(); ++i)
        ok &= check(rows[i].angle_max < rows[i - 1].angle_max,
                    (name + " angle column strictly decreasing").c_str(),
                    rows[i].angle_max - rows[i - 1].angle_max);
      // 1/t bound with (C, a) fitted on the first two grid entries at t >= 1.
      std::vector<const SweepRow*> late;
      for (const SweepRow& row : rows)
        if (row.t >= 1.0) late.push_back(&row);
      if (late.size() >= 2) {
        const double t1 = late[0]->t, a1 = late[0]->angle_max;
        const double t2 = late[1]->t, a2 = late[1]->angle_max;
        const double shift =
            (a1 > a2 && a2 > 0.0) ? std::max(0.0, (a2 * t2 - a1 * t1) / (a1 - a2)) : 0.0;
        const double c_fit = a1 * (t1 + shift);
        for (const SweepRow* row : late)
          ok &= check(row->angle_max * row->t <= c_fit * (1.0 + 1e-9),
                      (name + " angle bounded by C/t").c_str(), row->angle_max * row->t);
      }
    }
  }
  return ok;
}

bool criterion_oracles() {
  bool ok = true;
  for (const std::string& name : list_builtins()) {
    const Fixture f(name);
    const Report report = run_scenario(f.scenario);
    for (const CheckRecord& r : report.records) {
      if (r.check == "deriv.fd_agreement")
        ok &= check(r.passed(), (name + " symbolic/fd agreement").c_str(), r.value);
      if (r.check == "moment.identity")
        ok &= check(r.passed(), (name + " moment identity").c_str(), r.value);
    }
  }
  return ok;
}

bool criterion_geodesic_shadow() {
  bool ok = true;
  for (const std::string& name : list_builtins()) {
    const Fixture f(name);
    for (const ModelPoint& p : f.scenario.points) {
      const double dev =
          geodesic_linearity(f.scenario.model, f.rho, f.scenario.phi, p, f.scenario.t_grid);
      ok &= check(dev <= 1e-12, (name + " y^t affine with slope grad phi").c_str(), dev);
    }
  }
  return ok;
}

}  // namespace

int main() {
  criterion(1, "flow/series agreement on the cylinder (w = e, t = 1, N = 30)",
            criterion_flow_series);
  criterion(2, "block determinant: 1 + t on the cylinder, positive on every builtin",
            criterion_block_determinant);
  criterion(3, "Kahler compatibility: g_t SPD and (1,1) residual <= 1e-8",
            criterion_kahler_compatibility);
  criterion(4, "gluing: transition 1/w and commuting w^2 residuals <= 1e-9 at t in {0,1,5}",
            criterion_gluing);
  criterion(5, "P_mix: dim m, Lagrangian <= 1e-9, real rank n at regular points",
            criterion_p_mix);
  criterion(6, "polarization convergence: closed-form cylinder angles and C/t bounds",
            criterion_convergence);
  criterion(7, "oracle discipline: symbolic vs fd <= 1e-6, moment identity <= 1e-8",
            criterion_oracles);
  criterion(8, "geodesic shadow: y^t affine in t with slope grad phi within 1e-12",
            criterion_geodesic_shadow);

  if (g_failures == 0)
    std::printf("acceptance: all 8 criteria passed\n");
  else
    std::printf("acceptance: %d criterion(s) failed\n", g_failures);
  return g_failures == 0 ? 0 : 1;
}
