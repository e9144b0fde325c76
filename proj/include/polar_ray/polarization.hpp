#pragma once

#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "polar_ray/structure.hpp"

namespace polar_ray {

// A complex subspace of the complexified tangent space at a point, stored as
// an orthonormal basis-column matrix (2m x d) in the fixed real basis.
struct ComplexSubspace {
  Eigen::MatrixXcd basis;

  int dim() const { return static_cast<int>(basis.cols()); }
  int ambient() const { return static_cast<int>(basis.rows()); }
};

// Orthonormalizes the columns and checks they are independent (smallest
// singular value above 1e-10 after column normalization).
ComplexSubspace make_subspace(const Eigen::MatrixXcd& columns);

struct PolarizationReport {
  int dim = 0;
  bool is_lagrangian = false;
  int real_rank = 0;
  double lagrangian_residual = 0.0;
  bool regular_point = true;
};

// P_J = T^{0,1}_J: span of d/dwbar_j, d/dzbar_l.
ComplexSubspace build_P_J(const LocalModel& model, const ModelPoint& p);

// D_C = (ker dmu) tensor C and I_C = span of the fundamental fields.
std::pair<ComplexSubspace, ComplexSubspace> build_D_and_I(const LocalModel& model,
                                                          const ScalarField& rho,
                                                          const ModelPoint& p);

// P_mix = (P_J cap D_C) + I_C; the intersection is the kernel of the stacked
// defining rows [d zeta; dmu].  Throws RankMismatch if the sum fails to be
// direct at a regular point.
std::pair<ComplexSubspace, PolarizationReport> build_P_mix(const LocalModel& model,
                                                           const ScalarField& rho,
                                                           const ModelPoint& p);

// P_t: the -i eigenspace of J_t, computed as the kernel of the flowed
// holomorphic differentials.
ComplexSubspace build_P_t(const LocalModel& model, const ScalarField& rho,
                          const ScalarField& phi, const ModelPoint& p, double t);

// Principal angles between equal-dimensional subspaces under the Hermitian
// inner product of the chart's real coordinates; ascending, in [0, pi/2].
Eigen::VectorXd principal_angles(const ComplexSubspace& a, const ComplexSubspace& b);

// max |omega(u, v)| over basis pairs (bilinear extension of omega).
double lagrangian_residual(const ComplexSubspace& space, const Eigen::MatrixXd& omega);

// dim of the intersection of two subspaces (SVD rank of the concatenation).
int intersection_dim(const ComplexSubspace& a, const ComplexSubspace& b);

struct SweepRow {
  double t = 0.0;
  double angle_max = 0.0;
  double angle_min = 0.0;
  double normalized_rate = 0.0;  // angle_max * (1 + t * min eig of H_phi)
  double lagrangian_residual = 0.0;
};

// Principal-angle convergence P_t -> P_mix over an increasing t grid.
std::vector<SweepRow> convergence_sweep(const LocalModel& model, const ScalarField& rho,
                                        const ScalarField& phi, const ModelPoint& p,
                                        const std::vector<double>& t_grid);

}  // namespace polar_ray
