#include "polar_ray/polarization.hpp"

#include <algorithm>
#include <cmath>

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

namespace polar_ray {

namespace {

constexpr double kRankTol = 1e-10;

// Rank with a loud failure when a singular value sits inside the ambiguity
// band around the threshold instead of silently picking a side.
int svd_rank(const Eigen::VectorXd& sv, const char* what) {
  const double scale = sv.size() ? sv(0) : 0.0;
  if (scale <= 1e-300) return 0;
  int rank = 0;
  for (Eigen::Index i = 0; i < sv.size(); ++i) {
    const double rel = sv(i) / scale;
    if (rel > 10.0 * kRankTol) {
      ++rank;
    } else if (rel > 0.1 * kRankTol) {
      throw Error(Errc::RankMismatch,
                  std::string(what) + ": singular value in the ambiguity band, candidate ranks " +
                      std::to_string(rank) + " and " + std::to_string(rank + 1));
    }
  }
  return rank;
}

Eigen::MatrixXcd kernel_basis(const Eigen::MatrixXcd& rows, const char* what) {
  const Eigen::Index cols = rows.cols();
  if (rows.rows() == 0) return Eigen::MatrixXcd::Identity(cols, cols);
  Eigen::JacobiSVD<Eigen::MatrixXcd> svd(rows, Eigen::ComputeFullV);
  const int rank = svd_rank(svd.singularValues(), what);
  return svd.matrixV().rightCols(cols - rank);
}

Eigen::MatrixXcd range_basis(const Eigen::MatrixXcd& columns, const char* what) {
  if (columns.cols() == 0) return columns;
  Eigen::JacobiSVD<Eigen::MatrixXcd> svd(columns, Eigen::ComputeThinU);
  const int rank = svd_rank(svd.singularValues(), what);
  return svd.matrixU().leftCols(rank);
}

}  // namespace

ComplexSubspace make_subspace(const Eigen::MatrixXcd& columns) {
  if (columns.cols() == 0) return ComplexSubspace{columns};
  Eigen::MatrixXcd normalized = columns;
  for (Eigen::Index c = 0; c < normalized.cols(); ++c) {
    const double norm = normalized.col(c).norm();
    if (!(norm > 1e-300))
      throw Error(Errc::RankMismatch, "subspace basis contains a zero column");
    normalized.col(c) /= norm;
  }
  Eigen::JacobiSVD<Eigen::MatrixXcd> svd(normalized, Eigen::ComputeThinU);
  if (svd.singularValues()(columns.cols() - 1) <= 1e-10)
    throw Error(Errc::RankMismatch, "subspace basis is rank-deficient");
  return ComplexSubspace{svd.matrixU().leftCols(columns.cols())};
}

ComplexSubspace build_P_J(const LocalModel& model, const ModelPoint& p) {
  const int nk = model.torus_dim();
  const int m = model.m_complex;
  Eigen::MatrixXcd cols = Eigen::MatrixXcd::Zero(model.real_dim(), m);
  for (int j = 0; j < nk; ++j) {
    // d/dwbar_j is proportional to d/dy_j + i d/dtheta_j.
    cols(j, j) = 1.0;
    cols(nk + j, j) = Complex(0.0, 1.0);
  }
  for (int l = 0; l < model.r_fiber; ++l) {
    cols(2 * nk + 2 * l, nk + l) = 1.0;
    cols(2 * nk + 2 * l + 1, nk + l) = Complex(0.0, 1.0);
  }
  (void)p;
  return make_subspace(cols);
}

std::pair<ComplexSubspace, ComplexSubspace> build_D_and_I(const LocalModel& model,
                                                          const ScalarField& rho,
                                                          const ModelPoint& p) {
  const std::vector<Expr> mu_exprs = moment_expressions(model, rho);
  Eigen::MatrixXcd dmu(model.n_torus, model.real_dim());
  for (int i = 0; i < model.n_torus; ++i)
    dmu.row(i) = differential_row(mu_exprs[i], model, p);

  ComplexSubspace d_c{kernel_basis(dmu, "ker dmu")};
  const Eigen::MatrixXd fields = fundamental_fields(model, p);
  ComplexSubspace i_c{range_basis(fields.transpose().cast<Complex>(), "orbit span")};
  return {d_c, i_c};
}

std::pair<ComplexSubspace, PolarizationReport> build_P_mix(const LocalModel& model,
                                                           const ScalarField& rho,
                                                           const ModelPoint& p) {
  const int m = model.m_complex;
  const std::vector<Expr> mu_exprs = moment_expressions(model, rho);

  // P_J cap D_C is the joint kernel of the holomorphic differentials and dmu.
  Eigen::MatrixXcd stacked(m + model.n_torus, model.real_dim());
  stacked.topRows(m) = holomorphic_differential_rows(model, p);
  for (int i = 0; i < model.n_torus; ++i)
    stacked.row(m + i) = differential_row(mu_exprs[i], model, p);
  const Eigen::MatrixXcd cap = kernel_basis(stacked, "P_J cap D_C");

  const Eigen::MatrixXd fields = fundamental_fields(model, p);
  const Eigen::MatrixXcd orbit =
      range_basis(fields.transpose().cast<Complex>(), "orbit span");

  Eigen::MatrixXcd joined(model.real_dim(), cap.cols() + orbit.cols());
  joined << cap, orbit;
  const Eigen::MatrixXcd basis = range_basis(joined, "P_mix");

  const bool regular = regularity(model, p).is_regular;
  if (regular && basis.cols() != cap.cols() + orbit.cols())
    throw Error(Errc::RankMismatch, "P_mix sum is not direct at a regular point");

  ComplexSubspace space{basis};
  PolarizationReport report;
  report.dim = space.dim();
  report.regular_point = regular;
  const SymplecticFrame frame = build_frame(model, rho, p);
  report.lagrangian_residual = lagrangian_residual(space, frame.omega);
  report.is_lagrangian = (report.dim == m) && report.lagrangian_residual <= 1e-9;

  // rk_R(P) = dim(P cap conj P): a conjugation-invariant subspace is the
  // complexification of its real points.
  ComplexSubspace conj_space{space.basis.conjugate()};
  report.real_rank = intersection_dim(space, conj_space);
  return {space, report};
}

ComplexSubspace build_P_t(const LocalModel& model, const ScalarField& rho,
                          const ScalarField& phi, const ModelPoint& p, double t) {
  const FlowState state = closed_flow(model, rho, phi, p, t);
  Eigen::MatrixXcd rows = state.jac;
  for (Eigen::Index i = 0; i < rows.rows(); ++i) {
    const double scale = rows.row(i).cwiseAbs().maxCoeff();
    if (!(scale > 1e-300) || !std::isfinite(scale))
      throw Error(Errc::DegenerateFrame, "flowed differential row vanishes or overflows");
    rows.row(i) /= scale;
  }
  Eigen::JacobiSVD<Eigen::MatrixXcd> svd(rows, Eigen::ComputeFullV);
  const int rank = svd_rank(svd.singularValues(), "d zeta^t");
  if (rank != model.m_complex)
    throw Error(Errc::DegenerateFrame, "flowed differentials do not have full rank");
  return ComplexSubspace{svd.matrixV().rightCols(model.real_dim() - rank)};
}

Eigen::VectorXd principal_angles(const ComplexSubspace& a, const ComplexSubspace& b) {
  if (a.dim() != b.dim() || a.ambient() != b.ambient())
    throw Error(Errc::DimensionMismatch, "principal angles need equal-dimensional subspaces");
  if (a.dim() == 0) return Eigen::VectorXd();
  const Eigen::MatrixXcd overlap = a.basis.adjoint() * b.basis;
  Eigen::JacobiSVD<Eigen::MatrixXcd> svd(overlap, Eigen::ComputeFullV);

  // acos(sigma) is accurate only away from sigma = 1; small angles are
  // recovered from the residual of the aligned basis (sine route).
  const Eigen::MatrixXcd aligned = b.basis * svd.matrixV();
  const Eigen::MatrixXcd residual = aligned - a.basis * (a.basis.adjoint() * aligned);
  Eigen::VectorXd angles(a.dim());
  for (int i = 0; i < a.dim(); ++i) {
    const double c = std::clamp(svd.singularValues()(i), 0.0, 1.0);
    const double s = std::clamp(residual.col(i).norm(), 0.0, 1.0);
    angles(i) = (c * c > 0.5) ? std::asin(s) : std::acos(c);
  }
  // Singular values come out descending, so angles are already ascending.
  return angles;
}

double lagrangian_residual(const ComplexSubspace& space, const Eigen::MatrixXd& omega) {
  const Eigen::MatrixXcd pairing =
      space.basis.transpose() * omega.cast<Complex>() * space.basis;
  return pairing.size() ? pairing.cwiseAbs().maxCoeff() : 0.0;
}

int intersection_dim(const ComplexSubspace& a, const ComplexSubspace& b) {
  if (a.dim() == 0 || b.dim() == 0) return 0;
  Eigen::MatrixXcd joined(a.ambient(), a.dim() + b.dim());
  joined << a.basis, b.basis;
  Eigen::JacobiSVD<Eigen::MatrixXcd> svd(joined);
  const int rank = svd_rank(svd.singularValues(), "subspace intersection");
  return a.dim() + b.dim() - rank;
}

std::vector<SweepRow> convergence_sweep(const LocalModel& model, const ScalarField& rho,
                                        const ScalarField& phi, const ModelPoint& p,
                                        const std::vector<double>& t_grid) {
  for (size_t i = 1; i < t_grid.size(); ++i)
    if (!(t_grid[i] > t_grid[i - 1]))
      throw Error(Errc::DimensionMismatch, "t grid must be strictly increasing");
  if (!regularity(model, p).is_regular)
    throw Error(Errc::RankMismatch, "convergence sweep requires a regular point");

  const auto [p_mix, report] = build_P_mix(model, rho, p);
  const SymplecticFrame frame = build_frame(model, rho, p);
  const MomentValue mv = moment_map(model, rho, p);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(phi_hessian(model, phi, mv.mu));
  const double h_scale = eig.eigenvalues().minCoeff();

  std::vector<SweepRow> rows;
  rows.reserve(t_grid.size());
  for (double t : t_grid) {
    const ComplexSubspace p_t = build_P_t(model, rho, phi, p, t);
    const Eigen::VectorXd angles = principal_angles(p_t, p_mix);
    SweepRow row;
    row.t = t;
    row.angle_max = angles.size() ? angles(angles.size() - 1) : 0.0;
    row.angle_min = angles.size() ? angles(0) : 0.0;
    row.normalized_rate = row.angle_max * (1.0 + t * h_scale);
    row.lagrangian_residual = lagrangian_residual(p_t, frame.omega);
    rows.push_back(row);
  }
  return rows;
}

}  // namespace polar_ray
