#pragma once

#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "polar_ray/flow.hpp"

namespace polar_ray {

// Complex structure and metric induced at a point by the flowed coordinates.
struct ComplexStructureAt {
  double t = 0.0;
  Eigen::MatrixXd J;  // 2m x 2m, J^2 = -I
  Eigen::MatrixXd g;  // g = omega . J, symmetric positive definite at regular points
  double block_det = 1.0;
};

// The 2(n-k) x 2(n-k) nondegeneracy block [[I + tHA, tHA], [tHA, I + tHA]]
// with A = (1/2) jac_y and H the torus block of the phi Hessian at mu(p).
// Its determinant equals det(I + 2tHA).
std::pair<Eigen::MatrixXd, double> block_matrix(const LocalModel& model, const ScalarField& rho,
                                                const ScalarField& phi, const ModelPoint& p,
                                                double t);

// J_t from the stacked differentials S = [d zeta^t; conj d zeta^t] via
// S J = diag(iI, -iI) S; g_t = omega . J_t.
ComplexStructureAt complex_structure(const LocalModel& model, const ScalarField& rho,
                                     const ScalarField& phi, const ModelPoint& p, double t);

// max_{i<j} |{zeta_i^t, zeta_j^t}| over max-normalized flowed differentials;
// zero iff omega is (1,1) for J_t.
double check_type_11(const LocalModel& model, const ScalarField& rho, const ScalarField& phi,
                     const ModelPoint& p, double t);

// Gluing check: |transition(flowed coordinate) - series-flow of the
// transformed coordinate| for a Laurent transition on torus coordinate j.
double check_transition_consistency(const LocalModel& model, const ScalarField& rho,
                                    const ScalarField& phi, const ModelPoint& p, double t,
                                    const LaurentPoly& transition, int torus_index,
                                    int truncation);

// max over the grid of |y^t - y - t grad phi|_inf restricted to the torus
// factor; the verifiable shadow of the geodesic-ray statement.
double geodesic_linearity(const LocalModel& model, const ScalarField& rho,
                          const ScalarField& phi, const ModelPoint& p,
                          const std::vector<double>& t_grid);

// The standard complex structure matrix in the fixed real basis.
Eigen::MatrixXd standard_complex_structure(const LocalModel& model);

}  // namespace polar_ray
