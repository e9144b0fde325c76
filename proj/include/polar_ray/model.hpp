#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "polar_ray/expr.hpp"

namespace polar_ray {

// A torus-symmetric local model T_C^{n-k} x C^r.  T^n = T^{n-k} x T^k acts by
// translation on the torus factor and through the integer weight matrix B
// (shape k x r) on the fiber: z_l -> exp(i sum_g s_g B(g,l)) z_l.
struct LocalModel {
  int n_torus = 1;   // n
  int k_stab = 0;    // k, stabilizer torus dimension at the base point
  int r_fiber = 0;   // r
  int m_complex = 1; // m = (n - k) + r
  Eigen::MatrixXi weights;  // k x r

  int torus_dim() const { return n_torus - k_stab; }
  int real_dim() const { return 2 * m_complex; }
};

LocalModel build_model(int n, int k, int r, const Eigen::MatrixXi& weights);

// A point of T_C^{n-k} x C^r: every w entry nonzero, z arbitrary.
struct ModelPoint {
  Eigen::VectorXcd w;
  Eigen::VectorXcd z;

  Eigen::VectorXd y() const;      // log|w_j|
  Eigen::VectorXd theta() const;  // arg w_j
  double fiber_angle(int l) const;  // arg z_l (1-based); DomainEscape at z_l = 0
};

ModelPoint make_point(const LocalModel& model, const Eigen::VectorXcd& w,
                      const Eigen::VectorXcd& z);

// g . p for torus element with angles s (length n).
ModelPoint apply_torus(const LocalModel& model, const ModelPoint& p,
                       const Eigen::VectorXd& angles);

// Evaluation environment at a point: y_j = log|w_j|, z, zb = conj(z).
// mu is left empty; callers bind it when a field in the mu variables is in play.
EvalEnv point_env(const LocalModel& model, const ModelPoint& p);

// Scalar field over the model's invariant variables (y, z, zb for potentials;
// mu for convex functions on the moment image).  Carries the flag recording
// that torus invariance was checked; moment-map construction insists on it.
class ScalarField {
 public:
  explicit ScalarField(Expr expr) : expr_(std::move(expr)) {}

  static ScalarField parse(const std::string& text) { return ScalarField(Expr::parse(text)); }

  const Expr& expr() const { return expr_; }
  bool invariance_checked() const { return invariance_checked_; }

  ScalarField mark_invariance_validated() const {
    ScalarField out = *this;
    out.invariance_checked_ = true;
    return out;
  }

 private:
  Expr expr_;
  bool invariance_checked_ = false;
};

// Samples group_samples random torus elements (uniform angles, seeded) and
// checks |rho(g.p) - rho(p)| <= tol at every sample point.
bool validate_invariance(const LocalModel& model, const ScalarField& rho,
                         const std::vector<ModelPoint>& samples, int group_samples,
                         double tol, std::uint64_t seed);

// Worst deviation seen by the sampling above; what validate_invariance compares
// against tol.
double invariance_deviation(const LocalModel& model, const ScalarField& rho,
                            const std::vector<ModelPoint>& samples, int group_samples,
                            std::uint64_t seed);

struct RegularityReport {
  ModelPoint point;
  int stab_dim = 0;
  bool is_regular = false;
};

// Rows of the n x 2m matrix of fundamental vector fields at p, in the real
// basis (y_1..y_{n-k}, th_1..th_{n-k}, Re z_1, Im z_1, ...).
Eigen::MatrixXd fundamental_fields(const LocalModel& model, const ModelPoint& p);

RegularityReport regularity(const LocalModel& model, const ModelPoint& p);

}  // namespace polar_ray
