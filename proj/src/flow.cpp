#include "polar_ray/flow.hpp"

#include <cmath>

namespace polar_ray {

namespace {

// Partial sums of exp(x): S_q = sum_{v<=q} x^v / v!.
std::vector<double> exp_partial_sums(double x, int truncation) {
  std::vector<double> sums(truncation + 1);
  double term = 1.0;
  double acc = 1.0;
  sums[0] = acc;
  for (int q = 1; q <= truncation; ++q) {
    term *= x / static_cast<double>(q);
    acc += term;
    sums[q] = acc;
  }
  return sums;
}

double exp_partial(double x, int truncation) {
  double term = 1.0;
  double acc = 1.0;
  for (int q = 1; q <= truncation; ++q) {
    term *= x / static_cast<double>(q);
    acc += term;
  }
  return acc;
}

// Exact integer power; Laurent exponents never hit the principal-branch pow.
Complex ipow(Complex base, int exponent) {
  Complex acc(1.0, 0.0);
  Complex b = base;
  int e = exponent < 0 ? -exponent : exponent;
  while (e > 0) {
    if (e & 1) acc *= b;
    b *= b;
    e >>= 1;
  }
  return exponent < 0 ? Complex(1.0, 0.0) / acc : acc;
}

Complex coordinate_value(const ModelPoint& p, CoordId c) {
  switch (c.kind) {
    case CoordId::Kind::W: return p.w(c.index - 1);
    case CoordId::Kind::Z: return p.z(c.index - 1);
    case CoordId::Kind::Unit: return Complex(1.0, 0.0);
  }
  throw Error(Errc::DimensionMismatch, "corrupt coordinate id");
}

double coordinate_rate(const LocalModel& model, const Eigen::VectorXd& rates, CoordId c) {
  const int nk = model.torus_dim();
  switch (c.kind) {
    case CoordId::Kind::W:
      if (c.index < 1 || c.index > nk)
        throw Error(Errc::DimensionMismatch, "w index out of range");
      return rates(c.index - 1);
    case CoordId::Kind::Z:
      if (c.index < 1 || c.index > model.r_fiber)
        throw Error(Errc::DimensionMismatch, "z index out of range");
      return rates(nk + c.index - 1);
    case CoordId::Kind::Unit:
      return 0.0;
  }
  throw Error(Errc::DimensionMismatch, "corrupt coordinate id");
}

}  // namespace

Eigen::VectorXd flow_rates(const LocalModel& model, const Eigen::VectorXd& phi_grad) {
  const int nk = model.torus_dim();
  Eigen::VectorXd rates(model.m_complex);
  for (int j = 0; j < nk; ++j) rates(j) = phi_grad(j);
  for (int l = 0; l < model.r_fiber; ++l) {
    double acc = 0.0;
    for (int g = 0; g < model.k_stab; ++g)
      acc += phi_grad(nk + g) * static_cast<double>(model.weights(g, l));
    rates(nk + l) = acc;
  }
  return rates;
}

FlowState closed_flow(const LocalModel& model, const ScalarField& rho,
                      const ScalarField& phi, const ModelPoint& p, double t) {
  if (t < 0.0) throw Error(Errc::DomainEscape, "flow time must be >= 0");
  const int nk = model.torus_dim();
  const int r = model.r_fiber;
  const int m = model.m_complex;

  const MomentValue mv = moment_map(model, rho, p);
  const Eigen::VectorXd grad = phi_gradient(model, phi, mv.mu);
  const Eigen::MatrixXd hess = phi_hessian(model, phi, mv.mu);
  const Eigen::VectorXd rates = flow_rates(model, grad);

  FlowState state;
  state.t = t;
  state.w_t.resize(nk);
  state.z_t.resize(r);
  state.y_t = p.y() + t * grad.head(nk);
  for (int j = 0; j < nk; ++j) state.w_t(j) = p.w(j) * std::exp(t * rates(j));
  for (int l = 0; l < r; ++l) state.z_t(l) = p.z(l) * std::exp(t * rates(nk + l));

  // Differentials of the moment components at p, as real-basis rows.
  const std::vector<Expr> mu_exprs = moment_expressions(model, rho);
  Eigen::MatrixXcd dmu(model.n_torus, model.real_dim());
  for (int i = 0; i < model.n_torus; ++i)
    dmu.row(i) = differential_row(mu_exprs[i], model, p);

  state.jac.resize(m, model.real_dim());
  state.jac.setZero();
  for (int j = 0; j < nk; ++j) {
    Eigen::RowVectorXcd row = Eigen::RowVectorXcd::Zero(model.real_dim());
    row(j) = 1.0;
    row(nk + j) = Complex(0.0, 1.0);
    for (int i = 0; i < model.n_torus; ++i) row += t * hess(j, i) * dmu.row(i);
    state.jac.row(j) = state.w_t(j) * row;
  }
  for (int l = 0; l < r; ++l) {
    Eigen::RowVectorXcd row = Eigen::RowVectorXcd::Zero(model.real_dim());
    row(2 * nk + 2 * l) = 1.0;
    row(2 * nk + 2 * l + 1) = Complex(0.0, 1.0);
    for (int g = 0; g < model.k_stab; ++g) {
      const double b = static_cast<double>(model.weights(g, l));
      if (b == 0.0) continue;
      for (int i = 0; i < model.n_torus; ++i)
        row += p.z(l) * t * b * hess(nk + g, i) * dmu.row(i);
    }
    state.jac.row(nk + l) = std::exp(t * rates(nk + l)) * row;
  }
  return state;
}

std::pair<Complex, SeriesDiagnostics> lie_series(const LocalModel& model,
                                                 const ScalarField& rho,
                                                 const ScalarField& phi, const ModelPoint& p,
                                                 double t, CoordId f, int truncation) {
  if (truncation < 1) throw Error(Errc::DimensionMismatch, "series truncation must be >= 1");
  const MomentValue mv = moment_map(model, rho, p);
  const Eigen::VectorXd rates = flow_rates(model, phi_gradient(model, phi, mv.mu));
  const Complex value = coordinate_value(p, f);
  const double rate = coordinate_rate(model, rates, f);

  const std::vector<double> sums = exp_partial_sums(t * rate, truncation);
  SeriesDiagnostics diag;
  diag.truncation = truncation;
  diag.partial_sums.reserve(truncation + 1);
  for (double s : sums) diag.partial_sums.push_back(value * s);
  const double last_term = std::abs(diag.partial_sums[truncation] -
                                    diag.partial_sums[truncation - 1]);
  diag.tail_bound = last_term * std::exp(std::abs(t * rate));
  diag.converged = last_term <= 1e-13 * std::abs(diag.partial_sums[truncation]);
  return {diag.partial_sums[truncation], diag};
}

double check_product_law(const LocalModel& model, const ScalarField& rho,
                         const ScalarField& phi, const ModelPoint& p, double t, CoordId f,
                         CoordId g, int truncation) {
  const MomentValue mv = moment_map(model, rho, p);
  const Eigen::VectorXd rates = flow_rates(model, phi_gradient(model, phi, mv.mu));
  const Complex vf = coordinate_value(p, f);
  const Complex vg = coordinate_value(p, g);
  const double cf = coordinate_rate(model, rates, f);
  const double cg = coordinate_rate(model, rates, g);

  // X^v(fg) = sum_l C(v,l) X^l(f) X^{v-l}(g) collapses to the summed rate.
  const Complex series_fg = vf * vg * exp_partial(t * (cf + cg), truncation);
  const Complex product = (vf * exp_partial(t * cf, truncation)) *
                          (vg * exp_partial(t * cg, truncation));
  return std::abs(series_fg - product);
}

double check_commuting_formula(const LocalModel& model, const ScalarField& rho,
                               const ScalarField& phi, const ModelPoint& p, double t,
                               const LaurentPoly& f, CoordId coord, int truncation) {
  const MomentValue mv = moment_map(model, rho, p);
  const Eigen::VectorXd rates = flow_rates(model, phi_gradient(model, phi, mv.mu));
  const Complex v = coordinate_value(p, coord);
  const double c = coordinate_rate(model, rates, coord);
  const Complex v_t = v * std::exp(t * c);

  Complex lhs(0.0, 0.0);  // series applied to f(coordinate)
  Complex rhs(0.0, 0.0);  // f evaluated at the flowed coordinate
  for (const auto& [expo, coeff] : f.terms) {
    if (expo < 0 && (std::abs(v) == 0.0 || std::abs(v_t) == 0.0))
      throw Error(Errc::DomainEscape, "Laurent term hits a vanishing coordinate");
    lhs += coeff * ipow(v, expo) * exp_partial(t * expo * c, truncation);
    rhs += coeff * ipow(v_t, expo);
  }
  return std::abs(lhs - rhs);
}

double check_composition_law(const LocalModel& model, const ScalarField& rho,
                             const ScalarField& phi, const ModelPoint& p, double t,
                             int truncation) {
  const int nk = model.torus_dim();
  const MomentValue mv = moment_map(model, rho, p);
  const Eigen::VectorXd grad = phi_gradient(model, phi, mv.mu);

  // Per-generator exponent contribution for each coordinate.
  Eigen::MatrixXd contrib = Eigen::MatrixXd::Zero(model.n_torus, model.m_complex);
  for (int j = 0; j < nk; ++j) contrib(j, j) = grad(j);
  for (int g = 0; g < model.k_stab; ++g)
    for (int l = 0; l < model.r_fiber; ++l)
      contrib(nk + g, nk + l) = grad(nk + g) * static_cast<double>(model.weights(g, l));

  double worst = 0.0;
  for (int a = 0; a < model.m_complex; ++a) {
    const double rate1 = contrib(0, a);
    double rate2 = 0.0;
    for (int i = 1; i < model.n_torus; ++i) rate2 += contrib(i, a);
    const Complex value = (a < nk) ? p.w(a) : p.z(a - nk);
    const Complex sequential =
        value * exp_partial(t * rate1, truncation) * exp_partial(t * rate2, truncation);
    const Complex joint = value * exp_partial(t * (rate1 + rate2), truncation);
    worst = std::max(worst, std::abs(sequential - joint));
  }
  return worst;
}

int recommended_truncation(double t_times_rate) {
  const double x = std::abs(t_times_rate);
  return std::max(30, static_cast<int>(std::ceil(std::exp(1.0) * x)) + 25);
}

}  // namespace polar_ray
