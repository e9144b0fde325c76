#include "polar_ray/calculus.hpp"

#include <cmath>

#include <Eigen/Eigenvalues>

namespace polar_ray {

namespace {

constexpr double kRealityTol = 1e-9;

double require_real(const Complex& v, const char* what) {
  if (std::abs(v.imag()) > kRealityTol * (1.0 + std::abs(v.real())))
    throw Error(Errc::NonInvariantPotential,
                std::string(what) + " evaluated to a non-real value (imag = " +
                    std::to_string(v.imag()) + ")");
  return v.real();
}

}  // namespace

ScalarField differentiate(const ScalarField& field, const VarId& var, int order) {
  if (order != 1 && order != 2)
    throw Error(Errc::DimensionMismatch, "derivative order must be 1 or 2");
  Expr d = field.expr().derivative(var);
  if (order == 2) d = d.derivative(var);
  return ScalarField(d);
}

std::vector<Expr> moment_expressions(const LocalModel& model, const ScalarField& rho) {
  const int nk = model.torus_dim();
  std::vector<Expr> mu;
  mu.reserve(model.n_torus);
  for (int j = 0; j < nk; ++j) {
    // mu_j = d rho / d s_j with s_j = 2 y_j.
    mu.push_back(Expr::product(Expr::constant(0.5), rho.expr().derivative(var_y(j + 1))));
  }
  for (int g = 0; g < model.k_stab; ++g) {
    Expr acc = Expr::constant(0.0);
    for (int l = 0; l < model.r_fiber; ++l) {
      const double b = static_cast<double>(model.weights(g, l));
      if (b == 0.0) continue;
      Expr euler = Expr::sum(
          Expr::product(Expr::variable(var_z(l + 1)), rho.expr().derivative(var_z(l + 1))),
          Expr::product(Expr::variable(var_zb(l + 1)), rho.expr().derivative(var_zb(l + 1))));
      acc = Expr::sum(acc, Expr::product(Expr::constant(b / 2.0), euler));
    }
    mu.push_back(acc);
  }
  return mu;
}

MomentValue moment_map(const LocalModel& model, const ScalarField& rho, const ModelPoint& p) {
  if (!rho.invariance_checked())
    throw Error(Errc::NonInvariantPotential, "potential has not passed invariance validation");
  const std::vector<Expr> mu_exprs = moment_expressions(model, rho);
  const EvalEnv env = point_env(model, p);

  MomentValue out;
  out.mu.resize(model.n_torus);
  for (int j = 0; j < model.n_torus; ++j)
    out.mu(j) = require_real(mu_exprs[j].eval(env), "moment component");

  const int nk = model.torus_dim();
  out.jac_y.resize(nk, nk);
  for (int i = 0; i < nk; ++i)
    for (int j = 0; j < nk; ++j)
      out.jac_y(i, j) = require_real(mu_exprs[i].derivative(var_y(j + 1)).eval(env),
                                     "moment Jacobian entry");
  return out;
}

Eigen::RowVectorXcd differential_row(const Expr& field, const LocalModel& model,
                                     const ModelPoint& p) {
  const int nk = model.torus_dim();
  const int r = model.r_fiber;
  const EvalEnv env = point_env(model, p);
  Eigen::RowVectorXcd row = Eigen::RowVectorXcd::Zero(model.real_dim());
  for (int j = 0; j < nk; ++j)
    row(j) = field.derivative(var_y(j + 1)).eval(env);
  // Fields live in the invariant variables, so the theta slots stay zero.
  for (int l = 0; l < r; ++l) {
    const Complex dz = field.derivative(var_z(l + 1)).eval(env);
    const Complex dzb = field.derivative(var_zb(l + 1)).eval(env);
    row(2 * nk + 2 * l) = dz + dzb;
    row(2 * nk + 2 * l + 1) = Complex(0.0, 1.0) * (dz - dzb);
  }
  return row;
}

Eigen::MatrixXcd holomorphic_differential_rows(const LocalModel& model, const ModelPoint& p) {
  const int nk = model.torus_dim();
  const int r = model.r_fiber;
  Eigen::MatrixXcd rows = Eigen::MatrixXcd::Zero(model.m_complex, model.real_dim());
  for (int j = 0; j < nk; ++j) {
    rows(j, j) = p.w(j);
    rows(j, nk + j) = Complex(0.0, 1.0) * p.w(j);
  }
  for (int l = 0; l < r; ++l) {
    rows(nk + l, 2 * nk + 2 * l) = 1.0;
    rows(nk + l, 2 * nk + 2 * l + 1) = Complex(0.0, 1.0);
  }
  return rows;
}

SymplecticFrame build_frame(const LocalModel& model, const ScalarField& rho,
                            const ModelPoint& p) {
  const int nk = model.torus_dim();
  const int m = model.m_complex;
  const EvalEnv env = point_env(model, p);

  // Complex Hessian in zeta = (w, z).  Differentials through y use the chain
  // rule d/dw_j = (1/(2 w_j)) d/dy_j.
  Eigen::MatrixXcd h(m, m);
  const Expr& rho_e = rho.expr();
  for (int a = 0; a < m; ++a) {
    for (int b = 0; b < m; ++b) {
      Expr first = (a < nk) ? rho_e.derivative(var_y(a + 1))
                            : rho_e.derivative(var_z(a - nk + 1));
      Expr second = (b < nk) ? first.derivative(var_y(b + 1))
                             : first.derivative(var_zb(b - nk + 1));
      Complex value = second.eval(env);
      if (a < nk) value /= 2.0 * p.w(a);
      if (b < nk) value /= 2.0 * std::conj(p.w(b));
      h(a, b) = value;
    }
  }
  // Hermitize; rho is real-valued so the asymmetric part is numerical noise.
  h = ((h + h.adjoint()) / 2.0).eval();

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> eig(h);
  if (eig.eigenvalues().minCoeff() <= 1e-12)
    throw Error(Errc::DegeneratePotential,
                "complex Hessian of the potential is not positive definite at the point");

  const Eigen::MatrixXcd rows = holomorphic_differential_rows(model, p);
  // omega(u, v) = -2 Im(U^T H conj(V)) with U = d zeta(u).
  const Eigen::MatrixXcd pairing = rows.transpose() * h * rows.conjugate();
  Eigen::MatrixXd omega = -2.0 * pairing.imag();
  omega = ((omega - omega.transpose()) / 2.0).eval();

  SymplecticFrame frame;
  frame.point = p;
  frame.h_rho = h;
  frame.omega = omega;
  frame.omega_inv = omega.inverse();
  const double id_err =
      (frame.omega * frame.omega_inv - Eigen::MatrixXd::Identity(2 * m, 2 * m)).cwiseAbs().maxCoeff();
  if (!std::isfinite(id_err) || id_err > 1e-10)
    throw Error(Errc::DegeneratePotential, "omega is numerically singular at the point");
  return frame;
}

Eigen::VectorXd phi_gradient(const LocalModel& model, const ScalarField& phi,
                             const Eigen::VectorXd& mu) {
  EvalEnv env;
  env.mu = mu;
  Eigen::VectorXd grad(model.n_torus);
  for (int j = 0; j < model.n_torus; ++j)
    grad(j) = require_real(phi.expr().derivative(var_mu(j + 1)).eval(env), "phi gradient entry");
  return grad;
}

Eigen::MatrixXd phi_hessian(const LocalModel& model, const ScalarField& phi,
                            const Eigen::VectorXd& mu) {
  EvalEnv env;
  env.mu = mu;
  const int n = model.n_torus;
  Eigen::MatrixXd hess(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      hess(i, j) = require_real(
          phi.expr().derivative(var_mu(i + 1)).derivative(var_mu(j + 1)).eval(env),
          "phi Hessian entry");
  return ((hess + hess.transpose()) / 2.0).eval();
}

Eigen::VectorXd hamiltonian_field(const LocalModel& model, const ScalarField& rho,
                                  const ScalarField& phi, const ModelPoint& p) {
  const MomentValue mv = moment_map(model, rho, p);
  const Eigen::VectorXd grad = phi_gradient(model, phi, mv.mu);
  const Eigen::MatrixXd fields = fundamental_fields(model, p);
  return fields.transpose() * grad;
}

double poisson_bracket(const SymplecticFrame& frame, const Eigen::RowVectorXd& df,
                       const Eigen::RowVectorXd& dg) {
  return -(df * frame.omega_inv * dg.transpose())(0, 0);
}

Complex poisson_bracket(const SymplecticFrame& frame, const Eigen::RowVectorXcd& df,
                        const Eigen::RowVectorXcd& dg) {
  return -(df * frame.omega_inv.cast<Complex>() * dg.transpose())(0, 0);
}

}  // namespace polar_ray
