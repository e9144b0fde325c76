#pragma once

#include <vector>

#include <Eigen/Dense>

#include "polar_ray/model.hpp"

namespace polar_ray {

// All real matrices in this project are written in the fixed basis
//   (y_1..y_{n-k}, theta_1..theta_{n-k}, Re z_1, Im z_1, ..., Re z_r, Im z_r)
// of the underlying real tangent space; complexified vectors use the same
// basis with complex coefficients.

// omega = i ddbar(rho) at a point, together with its inverse and the complex
// Hessian of rho in the holomorphic coordinates zeta = (w_1..w_{n-k}, z_1..z_r).
struct SymplecticFrame {
  ModelPoint point;
  Eigen::MatrixXd omega;      // 2m x 2m, antisymmetric
  Eigen::MatrixXd omega_inv;  // omega^{-1}
  Eigen::MatrixXcd h_rho;     // m x m Hermitian positive definite
};

struct MomentValue {
  Eigen::VectorXd mu;      // length n
  Eigen::MatrixXd jac_y;   // (n-k) x (n-k), d mu_i / d y_j on the torus factor
};

// Exact symbolic derivative of a scalar field (order 1 or 2 in the same
// variable).  Differentiating by an absent variable yields the zero field.
ScalarField differentiate(const ScalarField& field, const VarId& var, int order = 1);

// The moment components as expression trees over (y, z, zb):
//   mu_j     = (1/2) d rho / d y_j                      for the torus factor,
//   mu_gamma = sum_l B(gamma,l) * (z_l drho/dz_l + zb_l drho/dzb_l)/2  for the fiber.
// The fiber form is the symmetrized Euler operator; for an invariant rho it
// equals sum_l B(gamma,l) |z_l|^2 drho/dt_l with t_l = |z_l|^2.
std::vector<Expr> moment_expressions(const LocalModel& model, const ScalarField& rho);

MomentValue moment_map(const LocalModel& model, const ScalarField& rho, const ModelPoint& p);

// Differential of the field as a real-basis row covector.  General fields give
// complex rows; fields that are real-valued at p give rows with negligible
// imaginary part.
Eigen::RowVectorXcd differential_row(const Expr& field, const LocalModel& model,
                                     const ModelPoint& p);

// Rows of the holomorphic differentials d zeta_a at the point, a = w_1..z_r
// (m x 2m):  dw_j = w_j (dy_j + i dtheta_j), dz_l = d(Re z_l) + i d(Im z_l).
Eigen::MatrixXcd holomorphic_differential_rows(const LocalModel& model, const ModelPoint& p);

SymplecticFrame build_frame(const LocalModel& model, const ScalarField& rho,
                            const ModelPoint& p);

// X_phi = sum_j (dphi/dmu_j)(mu(p)) xi_j^#(p) as a real tangent vector.
Eigen::VectorXd hamiltonian_field(const LocalModel& model, const ScalarField& rho,
                                  const ScalarField& phi, const ModelPoint& p);

// {f, g} = omega(X_f, X_g) with i_{X_f} omega = -df; in components
// {f, g} = -df . omega^{-1} . dg^T.  The complex overload extends bilinearly.
double poisson_bracket(const SymplecticFrame& frame, const Eigen::RowVectorXd& df,
                       const Eigen::RowVectorXd& dg);
Complex poisson_bracket(const SymplecticFrame& frame, const Eigen::RowVectorXcd& df,
                        const Eigen::RowVectorXcd& dg);

// Gradient and Hessian of phi (a field in mu1..mun) at a moment value.
Eigen::VectorXd phi_gradient(const LocalModel& model, const ScalarField& phi,
                             const Eigen::VectorXd& mu);
Eigen::MatrixXd phi_hessian(const LocalModel& model, const ScalarField& phi,
                            const Eigen::VectorXd& mu);

}  // namespace polar_ray
