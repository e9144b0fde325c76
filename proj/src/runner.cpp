#include "polar_ray/runner.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <Eigen/Eigenvalues>
#include <json.hpp>

namespace polar_ray {

namespace {

using Json = nlohmann::ordered_json;

std::string fmt17(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

// Convergence gate for the truncated exp series at argument x: terms must be
// shrinking by N and the last one must sit below 1e-13 of the limit.
// Evaluated in log space; e^x only approximates the partial sum once |x| < N.
bool exp_series_converged(double x, int truncation) {
  const double ax = std::abs(x);
  if (ax == 0.0) return true;
  if (ax >= truncation) return false;
  const double log_last_term = truncation * std::log(ax) - std::lgamma(truncation + 1.0);
  return log_last_term <= std::log(1e-13) + x;
}

double pd_ratio(const Eigen::MatrixXd& sym) {
  if (sym.rows() == 0) return 1.0;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(sym);
  const double hi = eig.eigenvalues().cwiseAbs().maxCoeff();
  if (hi <= 1e-300) return 0.0;
  return eig.eigenvalues().minCoeff() / hi;
}

// Finite-difference differential of a field in the point coordinates:
// y_j slots scale w_j by e^{+-h}, theta_j slots rotate it, fiber slots shift
// Re/Im z_l.  Independent of the symbolic differential rows.
Eigen::RowVectorXd fd_differential_row(const Expr& field, const LocalModel& model,
                                       const ModelPoint& p, double h = 1e-4) {
  const int nk = model.torus_dim();
  auto value_at = [&](int slot, double step) {
    ModelPoint q = p;
    if (slot < nk) {
      q.w(slot) *= std::exp(step);
    } else if (slot < 2 * nk) {
      q.w(slot - nk) *= std::polar(1.0, step);
    } else {
      const int l = (slot - 2 * nk) / 2;
      if ((slot - 2 * nk) % 2 == 0)
        q.z(l) += step;
      else
        q.z(l) += Complex(0.0, step);
    }
    return field.eval(point_env(model, q)).real();
  };
  Eigen::RowVectorXd row(model.real_dim());
  for (int slot = 0; slot < model.real_dim(); ++slot) {
    auto central = [&](double step) {
      return (value_at(slot, step) - value_at(slot, -step)) / (2.0 * step);
    };
    row(slot) = (4.0 * central(h / 2.0) - central(h)) / 3.0;
  }
  return row;
}

class Battery {
 public:
  Battery(const Scenario& scenario, const RunOptions& options)
      : s_(scenario), truncation_(options.truncation.value_or(scenario.truncation)) {
    report_.scenario_name = s_.name;
    report_.seed = options.seed;
    report_.truncation = truncation_;
  }

  Report run() {
    validate_potentials();
    for (int pi = 0; pi < static_cast<int>(s_.points.size()); ++pi) point_checks(pi);
    finalize();
    return report_;
  }

 private:
  void add(const std::string& check, int point, std::optional<double> t, double value,
           double tol, bool pass) {
    report_.records.push_back({check, point, t, value, tol, pass ? "pass" : "fail"});
  }

  void skip(const std::string& check, int point, std::optional<double> t,
            const std::string& reason) {
    report_.records.push_back({check, point, t, 0.0, 0.0, "skipped:" + reason});
  }

  template <typename Fn>
  void guarded(const std::string& check, int point, std::optional<double> t, Fn&& fn) {
    try {
      fn();
    } catch (const Error& e) {
      report_.records.push_back(
          {check, point, t, 0.0, 0.0, std::string("error:") + errc_name(e.code())});
    }
  }

  void validate_potentials() {
    const double dev =
        invariance_deviation(s_.model, s_.rho, s_.points, 16, report_.seed);
    if (dev > s_.tolerances.invariance)
      throw Error(Errc::NonInvariantPotential,
                  "rho failed torus-invariance sampling (deviation " + fmt17(dev) + ")");
    add("potential.invariance", -1, std::nullopt, dev, s_.tolerances.invariance, true);
    rho_ = s_.rho.mark_invariance_validated();
  }

  void point_checks(int pi) {
    const ModelPoint& p = s_.points[pi];
    const RegularityReport reg = regularity(s_.model, p);
    add("point.regularity", pi, std::nullopt, static_cast<double>(reg.stab_dim),
        static_cast<double>(s_.model.n_torus), true);

    guarded("deriv.fd_agreement", pi, std::nullopt, [&] { derivative_checks(pi, p); });
    guarded("phi.convexity", pi, std::nullopt, [&] {
      const MomentValue mv = moment_map(s_.model, rho_, p);
      const double ratio = pd_ratio(phi_hessian(s_.model, s_.phi, mv.mu));
      add("phi.convexity", pi, std::nullopt, ratio, s_.tolerances.pd_ratio,
          ratio > s_.tolerances.pd_ratio);
    });
    guarded("moment.checks", pi, std::nullopt, [&] { moment_checks(pi, p); });
    guarded("pmix.checks", pi, std::nullopt, [&] { polarization_point_checks(pi, p, reg); });
    guarded("geodesic.linearity", pi, std::nullopt, [&] {
      const double dev = geodesic_linearity(s_.model, rho_, s_.phi, p, s_.t_grid);
      add("geodesic.linearity", pi, std::nullopt, dev, s_.tolerances.flow_linearity,
          dev <= s_.tolerances.flow_linearity);
    });

    for (double t : s_.t_grid) {
      guarded("flow.checks", pi, t, [&] { flow_checks(pi, p, t); });
      guarded("law.checks", pi, t, [&] { law_checks(pi, p, t); });
      guarded("block.checks", pi, t, [&] { block_checks(pi, p, t); });
      guarded("structure.checks", pi, t, [&] { structure_checks(pi, p, t); });
      guarded("pt.checks", pi, t, [&] { p_t_checks(pi, p, t); });
    }

    guarded("sweep.checks", pi, std::nullopt, [&] { sweep_checks(pi, p, reg); });
  }

  void derivative_checks(int pi, const ModelPoint& p) {
    EvalEnv env = point_env(s_.model, p);
    const MomentValue mv = moment_map(s_.model, rho_, p);
    env.mu = mv.mu;

    double worst = 0.0;
    auto compare = [&](const Expr& field, const VarId& var) {
      const Complex sym = field.derivative(var).eval(env);
      const Complex fd = fd_oracle(field, env, var);
      const double err = std::abs(sym - fd) / (1.0 + std::abs(sym));
      worst = std::max(worst, err);
    };
    auto sweep_field = [&](const Expr& field, bool second_order) {
      const std::set<VarId> vars = field.variables();
      for (const VarId& v1 : vars) {
        compare(field, v1);
        if (second_order)
          for (const VarId& v2 : vars) compare(field.derivative(v1), v2);
      }
    };
    sweep_field(rho_.expr(), true);
    for (const Expr& mu : moment_expressions(s_.model, rho_)) sweep_field(mu, false);
    sweep_field(s_.phi.expr(), true);
    add("deriv.fd_agreement", pi, std::nullopt, worst, s_.tolerances.deriv_fd,
        worst <= s_.tolerances.deriv_fd);
  }

  void moment_checks(int pi, const ModelPoint& p) {
    const SymplecticFrame frame = build_frame(s_.model, rho_, p);
    const MomentValue mv = moment_map(s_.model, rho_, p);
    const Eigen::MatrixXd fields = fundamental_fields(s_.model, p);
    const std::vector<Expr> mu_exprs = moment_expressions(s_.model, rho_);

    // d mu_j = omega(-, xi_j^#), against both the symbolic and the
    // finite-difference differential.
    double worst = 0.0;
    std::vector<Eigen::RowVectorXd> sym_rows(s_.model.n_torus);
    for (int j = 0; j < s_.model.n_torus; ++j) {
      const Eigen::RowVectorXd contraction =
          (frame.omega * fields.row(j).transpose()).transpose();
      const Eigen::RowVectorXcd sym_row = differential_row(mu_exprs[j], s_.model, p);
      sym_rows[j] = sym_row.real();
      const Eigen::RowVectorXd fd_row = fd_differential_row(mu_exprs[j], s_.model, p);
      worst = std::max(worst, (sym_rows[j] - contraction).cwiseAbs().maxCoeff());
      worst = std::max(worst, (fd_row - contraction).cwiseAbs().maxCoeff());
    }
    add("moment.identity", pi, std::nullopt, worst, s_.tolerances.moment_identity,
        worst <= s_.tolerances.moment_identity);

    const double asym = mv.jac_y.rows()
                            ? (mv.jac_y - mv.jac_y.transpose()).cwiseAbs().maxCoeff()
                            : 0.0;
    add("moment.jac_y_symmetric", pi, std::nullopt, asym, s_.tolerances.jac_y_symmetry,
        asym <= s_.tolerances.jac_y_symmetry);

    if (s_.model.torus_dim() == 0) {
      skip("moment.jac_y_pd", pi, std::nullopt, "no-torus-factor");
    } else if (!regularity(s_.model, p).is_regular) {
      skip("moment.jac_y_pd", pi, std::nullopt, "non-regular-point");
    } else {
      const double ratio = pd_ratio(mv.jac_y);
      add("moment.jac_y_pd", pi, std::nullopt, ratio, s_.tolerances.pd_ratio,
          ratio > s_.tolerances.pd_ratio);
    }

    double bracket_worst = 0.0;
    for (int i = 0; i < s_.model.n_torus; ++i)
      for (int j = i + 1; j < s_.model.n_torus; ++j)
        bracket_worst = std::max(
            bracket_worst, std::abs(poisson_bracket(frame, sym_rows[i], sym_rows[j])));
    add("bracket.torus_commute", pi, std::nullopt, bracket_worst,
        s_.tolerances.bracket_commute, bracket_worst <= s_.tolerances.bracket_commute);
  }

  void flow_checks(int pi, const ModelPoint& p, double t) {
    const FlowState state = closed_flow(s_.model, rho_, s_.phi, p, t);
    const MomentValue mv = moment_map(s_.model, rho_, p);
    const Eigen::VectorXd rates =
        flow_rates(s_.model, phi_gradient(s_.model, s_.phi, mv.mu));
    const int nk = s_.model.torus_dim();

    // Series vs closed form, gated on series convergence at this truncation.
    double worst_gap = 0.0;
    bool all_converged = true;
    for (int a = 0; a < s_.model.m_complex; ++a) {
      if (!exp_series_converged(t * rates(a), truncation_)) {
        all_converged = false;
        break;
      }
      const CoordId coord = a < nk ? CoordId::w(a + 1) : CoordId::z(a - nk + 1);
      const auto [value, diag] = lie_series(s_.model, rho_, s_.phi, p, t, coord, truncation_);
      const Complex closed = a < nk ? state.w_t(a) : state.z_t(a - nk);
      worst_gap = std::max(worst_gap, std::abs(value - closed) / (1.0 + std::abs(closed)));
    }
    if (all_converged)
      add("flow.series_agreement", pi, t, worst_gap, s_.tolerances.flow_series,
          worst_gap <= s_.tolerances.flow_series);
    else
      skip("flow.series_agreement", pi, t, "series-not-converged-at-truncation");

    double angle_dev = 0.0;
    for (int j = 0; j < nk; ++j)
      angle_dev = std::max(angle_dev, std::abs(std::arg(state.w_t(j)) - std::arg(p.w(j))));
    for (int l = 0; l < s_.model.r_fiber; ++l)
      if (std::abs(p.z(l)) > 0.0)
        angle_dev = std::max(angle_dev, std::abs(std::arg(state.z_t(l)) - std::arg(p.z(l))));
    add("flow.angle_preserved", pi, t, angle_dev, s_.tolerances.flow_angle,
        angle_dev <= s_.tolerances.flow_angle);

    // Exponent linearity recovered from the flowed coordinates themselves.
    double lin_dev = 0.0;
    const Eigen::VectorXd y0 = p.y();
    for (int j = 0; j < nk; ++j) {
      const double recovered = std::log(std::abs(state.w_t(j)));
      const double scale = 1.0 + std::abs(y0(j) + t * rates(j));
      lin_dev = std::max(lin_dev, std::abs(recovered - y0(j) - t * rates(j)) / scale);
    }
    add("flow.exponent_linearity", pi, t, lin_dev, s_.tolerances.flow_linearity,
        lin_dev <= s_.tolerances.flow_linearity);
  }

  void law_checks(int pi, const ModelPoint& p, double t) {
    const MomentValue mv = moment_map(s_.model, rho_, p);
    const Eigen::VectorXd rates =
        flow_rates(s_.model, phi_gradient(s_.model, s_.phi, mv.mu));
    const int nk = s_.model.torus_dim();
    const CoordId first = nk > 0 ? CoordId::w(1) : CoordId::z(1);
    const CoordId second = s_.model.m_complex >= 2
                               ? (nk >= 2 ? CoordId::w(2)
                                          : CoordId::z(nk > 0 ? 1 : 2))
                               : first;
    auto rate_of = [&](CoordId c) {
      if (c.kind == CoordId::Kind::W) return rates(c.index - 1);
      return rates(nk + c.index - 1);
    };

    const double rf = rate_of(first);
    const double rg = rate_of(second);
    if (exp_series_converged(t * rf, truncation_) &&
        exp_series_converged(t * rg, truncation_) &&
        exp_series_converged(t * (rf + rg), truncation_)) {
      const double res =
          check_product_law(s_.model, rho_, s_.phi, p, t, first, second, truncation_);
      add("law.product", pi, t, res, s_.tolerances.law_residual,
          res <= s_.tolerances.law_residual);
    } else {
      skip("law.product", pi, t, "series-not-converged-at-truncation");
    }

    if (exp_series_converged(2.0 * t * rf, truncation_)) {
      const double res = check_commuting_formula(s_.model, rho_, s_.phi, p, t,
                                                 LaurentPoly::monomial(2), first, truncation_);
      add("law.commuting", pi, t, res, s_.tolerances.law_residual,
          res <= s_.tolerances.law_residual);
    } else {
      skip("law.commuting", pi, t, "series-not-converged-at-truncation");
    }

    bool comp_ok = true;
    for (int a = 0; a < s_.model.m_complex && comp_ok; ++a)
      comp_ok = exp_series_converged(t * rates(a), truncation_);
    if (comp_ok) {
      const double res = check_composition_law(s_.model, rho_, s_.phi, p, t, truncation_);
      add("law.composition", pi, t, res, s_.tolerances.law_residual,
          res <= s_.tolerances.law_residual);
    } else {
      skip("law.composition", pi, t, "series-not-converged-at-truncation");
    }
  }

  void block_checks(int pi, const ModelPoint& p, double t) {
    try {
      const auto [block, det] = block_matrix(s_.model, rho_, s_.phi, p, t);
      const MomentValue mv = moment_map(s_.model, rho_, p);
      const int nk = s_.model.torus_dim();
      const Eigen::MatrixXd ha =
          phi_hessian(s_.model, s_.phi, mv.mu).topLeftCorner(nk, nk) * (0.5 * mv.jac_y);
      const double reference =
          nk == 0 ? 1.0
                  : (Eigen::MatrixXd::Identity(nk, nk) + 2.0 * t * ha).determinant();
      const double gap = std::abs(det - reference) / (1.0 + std::abs(reference));
      add("block.det_identity", pi, t, gap, s_.tolerances.block_det_identity,
          gap <= s_.tolerances.block_det_identity);
      add("block.det_positive", pi, t, det, 0.0, det > 0.0 && std::isfinite(det));
    } catch (const Error& e) {
      if (e.code() != Errc::SingularA) throw;
      skip("block.det_identity", pi, t, "singular-a");
      skip("block.det_positive", pi, t, "singular-a");
    }
  }

  void structure_checks(int pi, const ModelPoint& p, double t) {
    const ComplexStructureAt cs = complex_structure(s_.model, rho_, s_.phi, p, t);
    const SymplecticFrame frame = build_frame(s_.model, rho_, p);
    const int dim = s_.model.real_dim();

    const double j_sq =
        (cs.J * cs.J + Eigen::MatrixXd::Identity(dim, dim)).cwiseAbs().maxCoeff();
    add("J.square", pi, t, j_sq, s_.tolerances.j_square, j_sq <= s_.tolerances.j_square);

    const double compat =
        (cs.J.transpose() * frame.omega * cs.J - frame.omega).cwiseAbs().maxCoeff();
    add("J.compatibility", pi, t, compat, s_.tolerances.j_compatibility,
        compat <= s_.tolerances.j_compatibility);

    if (t == 0.0) {
      const double gap =
          (cs.J - standard_complex_structure(s_.model)).cwiseAbs().maxCoeff();
      add("J.t0_standard", pi, t, gap, s_.tolerances.j_standard_t0,
          gap <= s_.tolerances.j_standard_t0);
    }

    const double g_asym = (cs.g - cs.g.transpose()).cwiseAbs().maxCoeff();
    add("g.symmetric", pi, t, g_asym, s_.tolerances.g_symmetry,
        g_asym <= s_.tolerances.g_symmetry);

    const double ratio = pd_ratio(((cs.g + cs.g.transpose()) / 2.0).eval());
    add("g.positive_definite", pi, t, ratio, s_.tolerances.pd_ratio,
        ratio > s_.tolerances.pd_ratio);

    const double t11 = check_type_11(s_.model, rho_, s_.phi, p, t);
    add("type11.residual", pi, t, t11, s_.tolerances.type_11, t11 <= s_.tolerances.type_11);

    if (s_.model.torus_dim() == 0) {
      skip("transition.inverse_chart", pi, t, "no-torus-factor");
    } else {
      const MomentValue mv = moment_map(s_.model, rho_, p);
      const double rate = flow_rates(s_.model, phi_gradient(s_.model, s_.phi, mv.mu))(0);
      if (exp_series_converged(-t * rate, truncation_)) {
        const double res = check_transition_consistency(
            s_.model, rho_, s_.phi, p, t, LaurentPoly::monomial(-1), 1, truncation_);
        add("transition.inverse_chart", pi, t, res, s_.tolerances.transition,
            res <= s_.tolerances.transition);
      } else {
        skip("transition.inverse_chart", pi, t, "series-not-converged-at-truncation");
      }
    }
  }

  void polarization_point_checks(int pi, const ModelPoint& p, const RegularityReport& reg) {
    const auto [space, rep] = build_P_mix(s_.model, rho_, p);
    if (reg.is_regular) {
      add("pmix.dim", pi, std::nullopt, static_cast<double>(rep.dim),
          static_cast<double>(s_.model.m_complex), rep.dim == s_.model.m_complex);
      add("pmix.lagrangian", pi, std::nullopt, rep.lagrangian_residual,
          s_.tolerances.lagrangian, rep.lagrangian_residual <= s_.tolerances.lagrangian);
      add("pmix.real_rank", pi, std::nullopt, static_cast<double>(rep.real_rank),
          static_cast<double>(s_.model.n_torus), rep.real_rank == s_.model.n_torus);
    } else {
      // Reported, not asserted: the rank statements only hold on the regular
      // locus.
      report_.records.push_back({"pmix.dim", pi, std::nullopt,
                                 static_cast<double>(rep.dim),
                                 static_cast<double>(s_.model.m_complex),
                                 "skipped:non-regular-point"});
      skip("pmix.lagrangian", pi, std::nullopt, "non-regular-point");
      skip("pmix.real_rank", pi, std::nullopt, "non-regular-point");
    }

    const auto [d_c, i_c] = build_D_and_I(s_.model, rho_, p);
    const std::vector<Expr> mu_exprs = moment_expressions(s_.model, rho_);
    Eigen::MatrixXcd dmu(s_.model.n_torus, s_.model.real_dim());
    for (int i = 0; i < s_.model.n_torus; ++i)
      dmu.row(i) = differential_row(mu_exprs[i], s_.model, p);
    double residual = 0.0;
    if (i_c.dim() > 0) residual = (dmu * i_c.basis).cwiseAbs().maxCoeff();
    add("pmix.ic_in_dc", pi, std::nullopt, residual, s_.tolerances.lagrangian,
        residual <= s_.tolerances.lagrangian);
  }

  void p_t_checks(int pi, const ModelPoint& p, double t) {
    const ComplexSubspace p_t = build_P_t(s_.model, rho_, s_.phi, p, t);
    const SymplecticFrame frame = build_frame(s_.model, rho_, p);

    if (regularity(s_.model, p).is_regular) {
      const double lag = lagrangian_residual(p_t, frame.omega);
      add("pt.lagrangian", pi, t, lag, s_.tolerances.lagrangian,
          lag <= s_.tolerances.lagrangian);
    } else {
      skip("pt.lagrangian", pi, t, "non-regular-point");
    }

    const ComplexSubspace conj{p_t.basis.conjugate()};
    const Eigen::VectorXd angles = principal_angles(p_t, conj);
    const double min_angle = angles.size() ? angles(0) : M_PI / 2.0;
    add("pt.kahler", pi, t, min_angle, s_.tolerances.kahler_min_angle,
        min_angle > s_.tolerances.kahler_min_angle);

    if (t == 0.0) {
      const ComplexSubspace p_j = build_P_J(s_.model, p);
      const Eigen::VectorXd gap = principal_angles(p_t, p_j);
      const double max_gap = gap.size() ? gap(gap.size() - 1) : 0.0;
      add("pt.t0_equals_pj", pi, t, max_gap, s_.tolerances.p_t0_matches_p_j,
          max_gap <= s_.tolerances.p_t0_matches_p_j);
    }
  }

  void sweep_checks(int pi, const ModelPoint& p, const RegularityReport& reg) {
    if (!reg.is_regular) {
      skip("sweep.monotone", pi, std::nullopt, "non-regular-point");
      skip("sweep.rate_bound", pi, std::nullopt, "non-regular-point");
      skip("sweep.t0_row", pi, std::nullopt, "non-regular-point");
      return;
    }
    const std::vector<SweepRow> rows =
        convergence_sweep(s_.model, rho_, s_.phi, p, s_.t_grid);
    report_.sweeps.push_back({pi, rows});

    if (rows.size() < 2) {
      skip("sweep.monotone", pi, std::nullopt, "short-grid");
    } else {
      double min_drop = std::numeric_limits<double>::infinity();
      for (size_t i = 1; i < rows.size(); ++i)
        min_drop = std::min(min_drop, rows[i - 1].angle_max - rows[i].angle_max);
      add("sweep.monotone", pi, std::nullopt, min_drop, 0.0, min_drop > 0.0);
    }

    // Fit angle ~ C/(t+a) on the first two grid entries with t >= 1, then
    // bound angle(t) <= C/t on that range (tail behavior of A_t).
    std::vector<const SweepRow*> late;
    for (const SweepRow& row : rows)
      if (row.t >= 1.0) late.push_back(&row);
    if (late.size() < 2) {
      skip("sweep.rate_bound", pi, std::nullopt, "short-grid");
    } else {
      const double t1 = late[0]->t, a1 = late[0]->angle_max;
      const double t2 = late[1]->t, a2 = late[1]->angle_max;
      double shift = 0.0;
      if (a1 > a2 && a2 > 0.0) shift = std::max(0.0, (a2 * t2 - a1 * t1) / (a1 - a2));
      const double c_fit = a1 * (t1 + shift);
      double worst_ratio = 0.0;
      for (const SweepRow* row : late)
        if (c_fit > 0.0) worst_ratio = std::max(worst_ratio, row->angle_max * row->t / c_fit);
      add("sweep.rate_bound", pi, std::nullopt, worst_ratio, 1.0 + 1e-9,
          c_fit > 0.0 && worst_ratio <= 1.0 + 1e-9);
    }

    if (!rows.empty() && rows.front().t == 0.0) {
      const ComplexSubspace p_j = build_P_J(s_.model, p);
      const auto [p_mix, rep] = build_P_mix(s_.model, rho_, p);
      const Eigen::VectorXd angles = principal_angles(p_j, p_mix);
      const double reference = angles.size() ? angles(angles.size() - 1) : 0.0;
      const double gap = std::abs(rows.front().angle_max - reference);
      add("sweep.t0_row", pi, std::nullopt, gap, 1e-12, gap <= 1e-12);
    } else {
      skip("sweep.t0_row", pi, std::nullopt, "grid-does-not-start-at-zero");
    }
  }

  void finalize() {
    // Deterministic ordering: check id, then point, then t.
    std::stable_sort(report_.records.begin(), report_.records.end(),
                     [](const CheckRecord& a, const CheckRecord& b) {
                       if (a.check != b.check) return a.check < b.check;
                       if (a.point != b.point) return a.point < b.point;
                       const double ta = a.t.value_or(-1.0);
                       const double tb = b.t.value_or(-1.0);
                       return ta < tb;
                     });
    report_.passed = report_.failed = report_.skipped = 0;
    for (const CheckRecord& r : report_.records) {
      if (r.passed())
        ++report_.passed;
      else if (r.skipped())
        ++report_.skipped;
      else
        ++report_.failed;
    }
    report_.overall_pass = report_.failed == 0;
  }

  const Scenario& s_;
  int truncation_;
  ScalarField rho_{Expr::constant(0.0)};
  Report report_;
};

}  // namespace

Report run_scenario(const Scenario& scenario, const RunOptions& options) {
  return Battery(scenario, options).run();
}

std::string report_to_json(const Report& report, const std::string& timestamp) {
  Json j = Json::object();
  j["scenario"] = report.scenario_name;
  if (!timestamp.empty()) j["timestamp"] = timestamp;
  Json env = Json::object();
  env["version"] = kVersion;
  env["precision"] = "ieee754-binary64";
  env["seed"] = report.seed;
  env["truncation"] = report.truncation;
  j["environment"] = env;

  Json records = Json::array();
  for (const CheckRecord& r : report.records) {
    Json jr = Json::object();
    jr["check"] = r.check;
    jr["point"] = r.point;
    if (r.t)
      jr["t"] = *r.t;
    else
      jr["t"] = nullptr;
    jr["value"] = r.value;
    jr["tolerance"] = r.tolerance;
    jr["status"] = r.status;
    records.push_back(jr);
  }
  j["records"] = records;

  Json sweeps = Json::array();
  for (const SweepTable& table : report.sweeps) {
    Json jt = Json::object();
    jt["point"] = table.point;
    Json rows = Json::array();
    for (const SweepRow& row : table.rows) {
      Json jr = Json::object();
      jr["t"] = row.t;
      jr["angle_max"] = row.angle_max;
      jr["angle_min"] = row.angle_min;
      jr["normalized_rate"] = row.normalized_rate;
      jr["lagrangian_residual"] = row.lagrangian_residual;
      rows.push_back(jr);
    }
    jt["rows"] = rows;
    sweeps.push_back(jt);
  }
  j["sweeps"] = sweeps;

  Json summary = Json::object();
  summary["checks"] = report.passed + report.failed + report.skipped;
  summary["passed"] = report.passed;
  summary["failed"] = report.failed;
  summary["skipped"] = report.skipped;
  summary["overall_pass"] = report.overall_pass;
  j["summary"] = summary;
  return j.dump(2) + "\n";
}

Report report_from_json(const std::string& json_text) {
  Json j;
  try {
    j = Json::parse(json_text);
  } catch (const std::exception& e) {
    throw Error(Errc::ParseError, std::string("report JSON: ") + e.what());
  }
  try {
    Report report;
    report.scenario_name = j.at("scenario").get<std::string>();
    report.seed = j.at("environment").at("seed").get<std::uint64_t>();
    report.truncation = j.at("environment").at("truncation").get<int>();
    for (const Json& jr : j.at("records")) {
      CheckRecord r;
      r.check = jr.at("check").get<std::string>();
      r.point = jr.at("point").get<int>();
      if (!jr.at("t").is_null()) r.t = jr.at("t").get<double>();
      r.value = jr.at("value").get<double>();
      r.tolerance = jr.at("tolerance").get<double>();
      r.status = jr.at("status").get<std::string>();
      report.records.push_back(r);
    }
    for (const Json& jt : j.at("sweeps")) {
      SweepTable table;
      table.point = jt.at("point").get<int>();
      for (const Json& jr : jt.at("rows")) {
        SweepRow row;
        row.t = jr.at("t").get<double>();
        row.angle_max = jr.at("angle_max").get<double>();
        row.angle_min = jr.at("angle_min").get<double>();
        row.normalized_rate = jr.at("normalized_rate").get<double>();
        row.lagrangian_residual = jr.at("lagrangian_residual").get<double>();
        table.rows.push_back(row);
      }
      report.sweeps.push_back(table);
    }
    const Json& summary = j.at("summary");
    report.passed = summary.at("passed").get<int>();
    report.failed = summary.at("failed").get<int>();
    report.skipped = summary.at("skipped").get<int>();
    report.overall_pass = summary.at("overall_pass").get<bool>();
    return report;
  } catch (const Error&) {
    throw;
  } catch (const std::exception& e) {
    throw Error(Errc::ParseError, std::string("report JSON: ") + e.what());
  }
}

void write_report_file(const Report& report, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw Error(Errc::IoError, "cannot write report to '" + path + "'");
  const std::time_t now = std::time(nullptr);
  char stamp[32];
  std::strftime(stamp, sizeof(stamp), "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&now));
  out << report_to_json(report, stamp);
}

void write_csv_tables(const Report& report, const std::string& directory) {
  namespace fs = std::filesystem;
  std::error_code ec;
  fs::create_directories(directory, ec);
  if (ec) throw Error(Errc::IoError, "cannot create csv directory '" + directory + "'");

  {
    std::ofstream out(fs::path(directory) / "checks.csv");
    if (!out) throw Error(Errc::IoError, "cannot write checks.csv");
    out << "check,point,t,value,tolerance,status\n";
    for (const CheckRecord& r : report.records) {
      out << r.check << ',' << r.point << ',' << (r.t ? fmt17(*r.t) : "") << ','
          << fmt17(r.value) << ',' << fmt17(r.tolerance) << ',' << r.status << '\n';
    }
  }
  for (const SweepTable& table : report.sweeps) {
    std::ofstream out(fs::path(directory) /
                      ("sweep_point" + std::to_string(table.point) + ".csv"));
    if (!out) throw Error(Errc::IoError, "cannot write sweep csv");
    out << "t,angle_max,angle_min,normalized_rate,lagrangian_residual\n";
    for (const SweepRow& row : table.rows) {
      out << fmt17(row.t) << ',' << fmt17(row.angle_max) << ',' << fmt17(row.angle_min)
          << ',' << fmt17(row.normalized_rate) << ',' << fmt17(row.lagrangian_residual)
          << '\n';
    }
  }
}

void emit_plot_data(const std::string& report_json_path, const std::string& out_csv_path) {
  std::ifstream in(report_json_path);
  if (!in) throw Error(Errc::IoError, "cannot open report '" + report_json_path + "'");
  std::ostringstream buffer;
  buffer << in.rdbuf();
  const Report report = report_from_json(buffer.str());
  if (report.sweeps.empty() || report.sweeps.front().rows.empty())
    throw Error(Errc::IoError, "report contains no convergence sweep");

  std::ofstream out(out_csv_path);
  if (!out) throw Error(Errc::IoError, "cannot write '" + out_csv_path + "'");
  out << "t,angle_max\n";
  for (const SweepRow& row : report.sweeps.front().rows)
    out << fmt17(row.t) << ',' << fmt17(row.angle_max) << '\n';
}

}  // namespace polar_ray
