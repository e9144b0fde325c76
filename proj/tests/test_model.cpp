#include <doctest.h>

#include <cmath>
#include <random>

#include "polar_ray/model.hpp"

using namespace polar_ray;

namespace {

LocalModel cylinder() { return build_model(1, 0, 0, Eigen::MatrixXi(0, 0)); }

LocalModel weighted_c2() {
  Eigen::MatrixXi weights(1, 2);
  weights << 1, 2;
  return build_model(1, 1, 2, weights);
}

LocalModel mixed_tc_c() {
  Eigen::MatrixXi weights(1, 1);
  weights << 3;
  return build_model(2, 1, 1, weights);
}

ModelPoint cyl_point(Complex w) {
  Eigen::VectorXcd wv(1);
  wv(0) = w;
  return make_point(cylinder(), wv, Eigen::VectorXcd(0));
}

ModelPoint wc2_point(Complex z1, Complex z2) {
  Eigen::VectorXcd zv(2);
  zv << z1, z2;
  return make_point(weighted_c2(), Eigen::VectorXcd(0), zv);
}

}  // namespace

TEST_CASE("build_model dimension bookkeeping") {
  CHECK(cylinder().m_complex == 1);
  CHECK(weighted_c2().m_complex == 2);
  CHECK(weighted_c2().torus_dim() == 0);
  CHECK(mixed_tc_c().m_complex == 2);
  CHECK(mixed_tc_c().torus_dim() == 1);
}

TEST_CASE("build_model rejects bad data") {
  CHECK_THROWS_AS(build_model(0, 0, 0, Eigen::MatrixXi(0, 0)), Error);
  CHECK_THROWS_AS(build_model(1, 2, 1, Eigen::MatrixXi(2, 1)), Error);  // k > n
  CHECK_THROWS_AS(build_model(1, 1, 2, Eigen::MatrixXi(1, 1)), Error);  // B shape
  Eigen::MatrixXi zero_row(1, 2);
  zero_row.setZero();
  CHECK_THROWS_AS(build_model(1, 1, 2, zero_row), Error);  // ineffective action
  Eigen::MatrixXi dependent(2, 2);
  dependent << 1, 2, 2, 4;
  CHECK_THROWS_AS(build_model(2, 2, 2, dependent), Error);  // rank 1 < k
}

TEST_CASE("points must avoid the torus degeneracy") {
  CHECK_THROWS_AS(cyl_point(Complex(0.0, 0.0)), Error);
  CHECK_NOTHROW(wc2_point(Complex(0, 0), Complex(0, 0)));  // fiber may vanish
}

TEST_CASE("invariance sampling accepts invariant potentials") {
  const double e = std::exp(1.0);
  {
    const auto model = cylinder();
    const ScalarField rho = ScalarField::parse("y1^2");
    CHECK(validate_invariance(model, rho, {cyl_point(Complex(e, 0.0))}, 16, 1e-10, 7));
  }
  {
    const auto model = weighted_c2();
    const ScalarField rho = ScalarField::parse("z1*zb1 + z2*zb2");
    CHECK(validate_invariance(model, rho, {wc2_point(Complex(1, 0), Complex(0, 0))}, 16,
                              1e-10, 7));
  }
}

TEST_CASE("invariance sampling rejects Re(z1)") {
  const auto model = weighted_c2();
  const ScalarField rho = ScalarField::parse("(z1 + zb1)/2");
  CHECK_FALSE(validate_invariance(model, rho, {wc2_point(Complex(1, 0), Complex(0, 0))}, 16,
                                  1e-10, 7));
}

TEST_CASE("invariance sampling requires enough group samples") {
  const auto model = cylinder();
  const ScalarField rho = ScalarField::parse("y1^2");
  CHECK_THROWS_AS(validate_invariance(model, rho, {cyl_point(Complex(1, 0))}, 3, 1e-10, 7),
                  Error);
}

TEST_CASE("regularity on the three reference models") {
  const double e = std::exp(1.0);
  {
    const auto report = regularity(cylinder(), cyl_point(Complex(e, 0.0)));
    CHECK(report.stab_dim == 0);
    CHECK(report.is_regular);
  }
  {
    const auto report = regularity(weighted_c2(), wc2_point(Complex(0, 0), Complex(0, 0)));
    CHECK(report.stab_dim == 1);
    CHECK_FALSE(report.is_regular);
  }
  {
    const auto report = regularity(weighted_c2(), wc2_point(Complex(1, 0), Complex(0, 0)));
    CHECK(report.stab_dim == 0);
    CHECK(report.is_regular);
  }
}

TEST_CASE("stabilizer dimension is constant along orbits") {
  const auto model = weighted_c2();
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> dist(0.0, 2.0 * M_PI);
  for (const ModelPoint& p : {wc2_point(Complex(1, 0), Complex(0, 0)),
                              wc2_point(Complex(0.3, -0.4), Complex(1, 1)),
                              wc2_point(Complex(0, 0), Complex(0, 0))}) {
    const int base = regularity(model, p).stab_dim;
    for (int trial = 0; trial < 8; ++trial) {
      Eigen::VectorXd angles(1);
      angles << dist(rng);
      CHECK(regularity(model, apply_torus(model, p, angles)).stab_dim == base);
    }
  }
}

TEST_CASE("fiber angles are defined away from the origin") {
  const ModelPoint p = wc2_point(Complex(0, 1), Complex(0, 0));
  CHECK(p.fiber_angle(1) == doctest::Approx(M_PI / 2.0));
  CHECK_THROWS_AS(p.fiber_angle(2), Error);
  CHECK_THROWS_AS(p.fiber_angle(3), Error);
}

TEST_CASE("torus action matches the weight representation") {
  const auto model = weighted_c2();
  const ModelPoint p = wc2_point(Complex(1, 0), Complex(1, 0));
  Eigen::VectorXd angles(1);
  angles << M_PI / 2.0;
  const ModelPoint q = apply_torus(model, p, angles);
  CHECK(std::abs(q.z(0) - Complex(0, 1)) < 1e-15);   // weight 1: quarter turn
  CHECK(std::abs(q.z(1) - Complex(-1, 0)) < 1e-15);  // weight 2: half turn
}
