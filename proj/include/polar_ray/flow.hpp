#pragma once

#include <map>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "polar_ray/calculus.hpp"

namespace polar_ray {

// Names a holomorphic coordinate (or the unit constant) for the series ops.
struct CoordId {
  enum class Kind { W, Z, Unit };
  Kind kind = Kind::W;
  int index = 1;  // 1-based within its block; ignored for Unit

  static CoordId w(int j) { return {Kind::W, j}; }
  static CoordId z(int l) { return {Kind::Z, l}; }
  static CoordId unit() { return {Kind::Unit, 1}; }
};

// Finite Laurent polynomial in a single coordinate; the transition-function
// surrogate for the commuting-formula and gluing checks.
struct LaurentPoly {
  std::map<int, Complex> terms;  // exponent -> coefficient

  static LaurentPoly monomial(int exponent, Complex coeff = Complex(1.0, 0.0)) {
    LaurentPoly p;
    p.terms[exponent] = coeff;
    return p;
  }
};

// State of the imaginary-time flow at parameter t, evaluated at a source
// point p.  The flow is radial on the torus factor: |w_j^t| = |w_j| e^{t c_j},
// arg w_j^t = arg w_j, and y^t = y + t * grad phi (exact, by construction).
struct FlowState {
  double t = 0.0;
  Eigen::VectorXcd w_t;
  Eigen::VectorXcd z_t;
  Eigen::VectorXd y_t;
  Eigen::MatrixXcd jac;  // m x 2m rows: d w^t_j, d z^t_l over the real basis at p
};

struct SeriesDiagnostics {
  int truncation = 0;
  std::vector<Complex> partial_sums;  // length truncation + 1
  double tail_bound = 0.0;
  bool converged = false;
};

// Exponent rates of the closed flow per holomorphic coordinate:
//   c(w_j) = dphi/dmu_j,   c(z_l) = sum_gamma dphi/dmu_gamma B(gamma,l).
Eigen::VectorXd flow_rates(const LocalModel& model, const Eigen::VectorXd& phi_grad);

FlowState closed_flow(const LocalModel& model, const ScalarField& rho,
                      const ScalarField& phi, const ModelPoint& p, double t);

// Truncated Lie series of a coordinate under e^{-itX_phi}; uses the exact
// power recursion (-i)^q X^q(zeta) = zeta c^q, so each term is
// zeta (t c)^q / q!.
std::pair<Complex, SeriesDiagnostics> lie_series(const LocalModel& model,
                                                 const ScalarField& rho,
                                                 const ScalarField& phi, const ModelPoint& p,
                                                 double t, CoordId f, int truncation);

// |series(fg) - series(f) series(g)| at truncation N.
double check_product_law(const LocalModel& model, const ScalarField& rho,
                         const ScalarField& phi, const ModelPoint& p, double t, CoordId f,
                         CoordId g, int truncation);

// |series of (f o coordinate) - f(flowed coordinate)| for a Laurent polynomial
// f in the named coordinate.
double check_commuting_formula(const LocalModel& model, const ScalarField& rho,
                               const ScalarField& phi, const ModelPoint& p, double t,
                               const LaurentPoly& f, CoordId coord, int truncation);

// Sequential vs joint flow of every coordinate for the commuting split
// X_1 = c_1 xi_1^#, X_2 = sum_{i>=2} c_i xi_i^#; max residual over coordinates.
double check_composition_law(const LocalModel& model, const ScalarField& rho,
                             const ScalarField& phi, const ModelPoint& p, double t,
                             int truncation);

// Truncation that keeps the exp-series tail below ~1e-13 relative for the
// given |t * rate|; never below the default 30.
int recommended_truncation(double t_times_rate);

}  // namespace polar_ray
