#pragma once

// Shared desk-scale fixtures for the unit suites.

#include <cmath>
#include <random>

#include "polar_ray/model.hpp"

namespace fixtures {

using namespace polar_ray;

inline const double kE = std::exp(1.0);

inline LocalModel cylinder() { return build_model(1, 0, 0, Eigen::MatrixXi(0, 0)); }

inline LocalModel weighted_c2() {
  Eigen::MatrixXi weights(1, 2);
  weights << 1, 2;
  return build_model(1, 1, 2, weights);
}

// T_C x C with fiber weight 3 (the heavier variant used by op-level tests).
inline LocalModel mixed_tc_c(int weight = 3) {
  Eigen::MatrixXi weights(1, 1);
  weights << weight;
  return build_model(2, 1, 1, weights);
}

// T_C^2 with coupled potential; exercises off-diagonal H_phi A blocks.
inline LocalModel tc2() { return build_model(2, 0, 0, Eigen::MatrixXi(0, 0)); }

inline ScalarField rho_cylinder() {
  return ScalarField::parse("y1^2").mark_invariance_validated();
}
inline ScalarField phi_quadratic() { return ScalarField::parse("mu1^2/2"); }

inline ScalarField rho_weighted_c2() {
  return ScalarField::parse("z1*zb1 + z2*zb2").mark_invariance_validated();
}

inline ScalarField rho_mixed() {
  return ScalarField::parse("y1^2 + z1*zb1").mark_invariance_validated();
}
inline ScalarField phi_mixed() {
  return ScalarField::parse("mu1^2/2 + mu2^2/2 + mu1*mu2/4");
}

inline ScalarField rho_tc2() {
  return ScalarField::parse("y1^2 + y2^2 + y1*y2/2").mark_invariance_validated();
}

inline ModelPoint cyl_point(Complex w) {
  Eigen::VectorXcd wv(1);
  wv(0) = w;
  return make_point(cylinder(), wv, Eigen::VectorXcd(0));
}

inline ModelPoint wc2_point(Complex z1, Complex z2) {
  Eigen::VectorXcd zv(2);
  zv << z1, z2;
  return make_point(weighted_c2(), Eigen::VectorXcd(0), zv);
}

inline ModelPoint mixed_point(Complex w, Complex z, int weight = 3) {
  Eigen::VectorXcd wv(1);
  Eigen::VectorXcd zv(1);
  wv(0) = w;
  zv(0) = z;
  return make_point(mixed_tc_c(weight), wv, zv);
}

inline ModelPoint tc2_point(Complex w1, Complex w2) {
  Eigen::VectorXcd wv(2);
  wv << w1, w2;
  return make_point(tc2(), wv, Eigen::VectorXcd(0));
}

}  // namespace fixtures
