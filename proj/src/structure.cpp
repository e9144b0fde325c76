#include "polar_ray/structure.hpp"

#include <cmath>

#include <Eigen/Eigenvalues>
#include <Eigen/LU>

namespace polar_ray {

namespace {

void require_jac_y_pd(const Eigen::MatrixXd& jac_y) {
  if (jac_y.rows() == 0) return;  // no torus factor: vacuously fine
  const double asym = (jac_y - jac_y.transpose()).cwiseAbs().maxCoeff();
  if (asym > 1e-10)
    throw Error(Errc::SingularA, "moment Jacobian on the torus factor is not symmetric");
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(jac_y);
  const double lo = eig.eigenvalues().minCoeff();
  const double hi = eig.eigenvalues().maxCoeff();
  if (!(lo > 1e-10 * std::max(hi, 1e-300)))
    throw Error(Errc::SingularA, "moment Jacobian on the torus factor is not positive definite");
}

}  // namespace

std::pair<Eigen::MatrixXd, double> block_matrix(const LocalModel& model, const ScalarField& rho,
                                                const ScalarField& phi, const ModelPoint& p,
                                                double t) {
  const int nk = model.torus_dim();
  const MomentValue mv = moment_map(model, rho, p);
  require_jac_y_pd(mv.jac_y);

  const Eigen::MatrixXd a = 0.5 * mv.jac_y;
  const Eigen::MatrixXd h =
      phi_hessian(model, phi, mv.mu).topLeftCorner(nk, nk);
  const Eigen::MatrixXd ha = h * a;

  Eigen::MatrixXd block(2 * nk, 2 * nk);
  block.topLeftCorner(nk, nk) = Eigen::MatrixXd::Identity(nk, nk) + t * ha;
  block.topRightCorner(nk, nk) = t * ha;
  block.bottomLeftCorner(nk, nk) = t * ha;
  block.bottomRightCorner(nk, nk) = Eigen::MatrixXd::Identity(nk, nk) + t * ha;
  const double det = nk == 0 ? 1.0 : block.determinant();
  return {block, det};
}

ComplexStructureAt complex_structure(const LocalModel& model, const ScalarField& rho,
                                     const ScalarField& phi, const ModelPoint& p, double t) {
  const int m = model.m_complex;
  const SymplecticFrame frame = build_frame(model, rho, p);
  const FlowState state = closed_flow(model, rho, phi, p, t);

  // Stack holomorphic and antiholomorphic flowed differentials and scale each
  // row by its largest entry; row scaling commutes with the diagonal +/- i.
  Eigen::MatrixXcd stacked(2 * m, 2 * m);
  stacked.topRows(m) = state.jac;
  stacked.bottomRows(m) = state.jac.conjugate();
  for (int i = 0; i < 2 * m; ++i) {
    const double scale = stacked.row(i).cwiseAbs().maxCoeff();
    if (!(scale > 1e-300) || !std::isfinite(scale))
      throw Error(Errc::DegenerateFrame, "flowed differential row vanishes or overflows");
    stacked.row(i) /= scale;
  }
  Eigen::PartialPivLU<Eigen::MatrixXcd> lu(stacked);
  const double det_mag = std::abs(lu.determinant());
  if (!(det_mag > 1e-12))
    throw Error(Errc::DegenerateFrame, "flowed differentials are linearly dependent");

  Eigen::VectorXcd eigs(2 * m);
  eigs.head(m).setConstant(Complex(0.0, 1.0));
  eigs.tail(m).setConstant(Complex(0.0, -1.0));
  const Eigen::MatrixXcd j_complex = lu.solve(eigs.asDiagonal() * stacked);
  if (j_complex.imag().cwiseAbs().maxCoeff() > 1e-8)
    throw Error(Errc::DegenerateFrame, "complex structure failed to come out real");

  ComplexStructureAt out;
  out.t = t;
  out.J = j_complex.real();
  out.g = frame.omega * out.J;
  out.block_det = block_matrix(model, rho, phi, p, t).second;
  return out;
}

double check_type_11(const LocalModel& model, const ScalarField& rho, const ScalarField& phi,
                     const ModelPoint& p, double t) {
  const SymplecticFrame frame = build_frame(model, rho, p);
  const FlowState state = closed_flow(model, rho, phi, p, t);
  const int m = model.m_complex;

  Eigen::MatrixXcd rows = state.jac;
  for (int i = 0; i < m; ++i) {
    const double scale = rows.row(i).cwiseAbs().maxCoeff();
    if (scale > 0.0) rows.row(i) /= scale;
  }
  double worst = 0.0;
  for (int i = 0; i < m; ++i)
    for (int j = i + 1; j < m; ++j)
      worst = std::max(worst, std::abs(poisson_bracket(
                                  frame, Eigen::RowVectorXcd(rows.row(i)),
                                  Eigen::RowVectorXcd(rows.row(j)))));
  return worst;
}

double check_transition_consistency(const LocalModel& model, const ScalarField& rho,
                                    const ScalarField& phi, const ModelPoint& p, double t,
                                    const LaurentPoly& transition, int torus_index,
                                    int truncation) {
  // Same mechanism as the commuting formula with the roles of the two sides
  // fixed by the gluing statement: the original transition applied to the
  // flowed chart must agree with the flow of the transformed coordinate.
  return check_commuting_formula(model, rho, phi, p, t, transition,
                                 CoordId::w(torus_index), truncation);
}

double geodesic_linearity(const LocalModel& model, const ScalarField& rho,
                          const ScalarField& phi, const ModelPoint& p,
                          const std::vector<double>& t_grid) {
  const int nk = model.torus_dim();
  if (nk == 0) return 0.0;
  const MomentValue mv = moment_map(model, rho, p);
  const Eigen::VectorXd slope = phi_gradient(model, phi, mv.mu).head(nk);
  const Eigen::VectorXd y0 = p.y();
  double worst = 0.0;
  for (double t : t_grid) {
    const FlowState state = closed_flow(model, rho, phi, p, t);
    worst = std::max(worst, (state.y_t - y0 - t * slope).cwiseAbs().maxCoeff());
  }
  return worst;
}

Eigen::MatrixXd standard_complex_structure(const LocalModel& model) {
  const int nk = model.torus_dim();
  Eigen::MatrixXd j = Eigen::MatrixXd::Zero(model.real_dim(), model.real_dim());
  for (int i = 0; i < nk; ++i) {
    j(nk + i, i) = 1.0;   // J d/dy_i = d/dtheta_i
    j(i, nk + i) = -1.0;  // J d/dtheta_i = -d/dy_i
  }
  for (int l = 0; l < model.r_fiber; ++l) {
    j(2 * nk + 2 * l + 1, 2 * nk + 2 * l) = 1.0;
    j(2 * nk + 2 * l, 2 * nk + 2 * l + 1) = -1.0;
  }
  return j;
}

}  // namespace polar_ray
