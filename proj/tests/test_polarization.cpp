#include <doctest.h>

#include "fixtures.hpp"
#include "polar_ray/polarization.hpp"

using namespace polar_ray;
using namespace fixtures;

namespace {

// Maximum principal angle between a subspace and the span of a single vector.
double max_angle_to(const ComplexSubspace& space, const Eigen::VectorXcd& direction) {
  Eigen::MatrixXcd col(direction.size(), 1);
  col.col(0) = direction;
  const Eigen::VectorXd angles = principal_angles(space, make_subspace(col));
  return angles(angles.size() - 1);
}

}  // namespace

TEST_CASE("P_J spans the antiholomorphic directions") {
  {
    // cylinder: d/dwbar is proportional to d/dy + i d/dtheta
    const auto p_j = build_P_J(cylinder(), cyl_point(Complex(kE, 0)));
    CHECK(p_j.dim() == 1);
    Eigen::VectorXcd dir(2);
    dir << 1.0, Complex(0, 1);
    CHECK(max_angle_to(p_j, dir) < 1e-12);
  }
  {
    const auto p_j = build_P_J(weighted_c2(), wc2_point(Complex(1, 0), Complex(0, 1)));
    CHECK(p_j.dim() == 2);
  }
}

TEST_CASE("D_C and I_C at reference points") {
  {
    // cylinder at w = e: both are the angular line
    const auto [d_c, i_c] = build_D_and_I(cylinder(), rho_cylinder(), cyl_point(Complex(kE, 0)));
    CHECK(d_c.dim() == 1);
    CHECK(i_c.dim() == 1);
    Eigen::VectorXcd dir(2);
    dir << 0.0, 1.0;
    CHECK(max_angle_to(d_c, dir) < 1e-10);
    CHECK(max_angle_to(i_c, dir) < 1e-10);
  }
  {
    // fixed point of weighted C^2: orbit collapses, dmu vanishes
    const auto [d_c, i_c] =
        build_D_and_I(weighted_c2(), rho_weighted_c2(), wc2_point(Complex(0, 0), Complex(0, 0)));
    CHECK(d_c.dim() == 4);
    CHECK(i_c.dim() == 0);
  }
  {
    // mixed model at a regular point: 2m - n = 2 and n = 2
    const auto [d_c, i_c] = build_D_and_I(mixed_tc_c(), rho_mixed(),
                                          mixed_point(Complex(kE, 0), Complex(1, 0)));
    CHECK(d_c.dim() == 2);
    CHECK(i_c.dim() == 2);
  }
}

TEST_CASE("I_C sits inside D_C") {
  const auto model = mixed_tc_c();
  const auto rho = rho_mixed();
  for (const ModelPoint& p : {mixed_point(Complex(kE, 0), Complex(1, 0)),
                              mixed_point(Complex(0.7, 0.7), Complex(0, 0))}) {
    const auto [d_c, i_c] = build_D_and_I(model, rho, p);
    if (i_c.dim() == 0) continue;
    CHECK(intersection_dim(d_c, i_c) == i_c.dim());
  }
}

TEST_CASE("P_mix structure on the cylinder") {
  const auto [space, report] = build_P_mix(cylinder(), rho_cylinder(), cyl_point(Complex(kE, 0)));
  CHECK(report.dim == 1);
  CHECK(report.is_lagrangian);
  CHECK(report.real_rank == 1);  // real polarization: n = m
  Eigen::VectorXcd dir(2);
  dir << 0.0, 1.0;
  CHECK(max_angle_to(space, dir) < 1e-10);
}

TEST_CASE("P_mix structure on the mixed model") {
  const auto [space, report] =
      build_P_mix(mixed_tc_c(), rho_mixed(), mixed_point(Complex(kE, 0), Complex(1, 0)));
  CHECK(report.dim == 2);
  CHECK(report.is_lagrangian);
  CHECK(report.real_rank == 2);
  CHECK(report.regular_point);
}

TEST_CASE("P_mix at a non-regular point is reported, not asserted") {
  const auto [space, report] = build_P_mix(weighted_c2(), rho_weighted_c2(),
                                           wc2_point(Complex(0, 0), Complex(0, 0)));
  CHECK_FALSE(report.regular_point);
  // At the origin P_J cap D_C is all of P_J, so the dimension stays m here.
  CHECK(report.dim == 2);
}

TEST_CASE("P_t interpolates from P_J") {
  const auto model = cylinder();
  const auto rho = rho_cylinder();
  const auto phi = phi_quadratic();
  const ModelPoint p = cyl_point(Complex(kE, 0));
  {
    const auto p_0 = build_P_t(model, rho, phi, p, 0.0);
    const auto p_j = build_P_J(model, p);
    const Eigen::VectorXd angles = principal_angles(p_0, p_j);
    CHECK(angles(angles.size() - 1) < 1e-10);
  }
  {
    // dy^t = 2 dy at t = 1: kernel direction (1/2, i)
    const auto p_1 = build_P_t(model, rho, phi, p, 1.0);
    Eigen::VectorXcd dir(2);
    dir << 0.5, Complex(0, 1);
    CHECK(max_angle_to(p_1, dir) < 1e-10);
  }
  {
    // Lagrangian at every t
    const auto frame = build_frame(model, rho, p);
    for (double t : {0.0, 1.0, 10.0, 100.0})
      CHECK(lagrangian_residual(build_P_t(model, rho, phi, p, t), frame.omega) <= 1e-9);
  }
}

TEST_CASE("principal angles") {
  const auto model = cylinder();
  const ModelPoint p = cyl_point(Complex(kE, 0));
  const auto p_j = build_P_J(model, p);
  {
    const Eigen::VectorXd zero = principal_angles(p_j, p_j);
    CHECK(zero.cwiseAbs().maxCoeff() < 1e-12);
  }
  const auto [p_mix, report] = build_P_mix(model, rho_cylinder(), p);
  {
    // P_0 vs P_mix: vectors (1, i) against (0, 1) give arctan(1) = pi/4
    const Eigen::VectorXd angles = principal_angles(p_j, p_mix);
    CHECK(angles(0) == doctest::Approx(M_PI / 4.0).epsilon(1e-12));
  }
  for (double t : {0.0, 1.0, 10.0, 100.0}) {
    const auto p_t = build_P_t(model, rho_cylinder(), phi_quadratic(), p, t);
    const Eigen::VectorXd angles = principal_angles(p_t, p_mix);
    CHECK(angles(0) == doctest::Approx(std::atan(1.0 / (1.0 + t))).epsilon(1e-10));
  }
}

TEST_CASE("principal angles demand matching dimensions") {
  const auto model = weighted_c2();
  const ModelPoint p = wc2_point(Complex(1, 0), Complex(0, 0));
  const auto p_j = build_P_J(model, p);
  const auto [d_c, i_c] = build_D_and_I(model, rho_weighted_c2(), p);
  CHECK_THROWS_AS(principal_angles(p_j, i_c), Error);
}

TEST_CASE("P_t stays transverse to its conjugate") {
  const auto model = weighted_c2();
  const auto rho = rho_weighted_c2();
  const ModelPoint p = wc2_point(Complex(1, 0), Complex(1, 0));
  for (double t : {0.0, 1.0, 10.0, 100.0}) {
    const auto p_t = build_P_t(model, rho, phi_quadratic(), p, t);
    const ComplexSubspace conj_p{p_t.basis.conjugate()};
    const Eigen::VectorXd angles = principal_angles(p_t, conj_p);
    CHECK(angles(0) > 1e-6);
  }
}

TEST_CASE("convergence sweep matches the cylinder closed form") {
  const std::vector<double> grid = {0.0, 1.0, 10.0, 100.0};
  const auto rows = convergence_sweep(cylinder(), rho_cylinder(), phi_quadratic(),
                                      cyl_point(Complex(kE, 0)), grid);
  REQUIRE(rows.size() == 4);
  for (size_t i = 0; i < grid.size(); ++i) {
    CHECK(rows[i].angle_max ==
          doctest::Approx(std::atan(1.0 / (1.0 + grid[i]))).epsilon(1e-10));
    CHECK(rows[i].lagrangian_residual <= 1e-9);
  }
  // normalized column approaches 1: tan x ~ x
  CHECK(rows[3].normalized_rate == doctest::Approx(1.0).epsilon(0.02));
  // monotone decrease
  for (size_t i = 1; i < rows.size(); ++i) CHECK(rows[i].angle_max < rows[i - 1].angle_max);
}

TEST_CASE("convergence sweep rejects non-regular points and bad grids") {
  CHECK_THROWS_AS(convergence_sweep(weighted_c2(), rho_weighted_c2(), phi_quadratic(),
                                    wc2_point(Complex(0, 0), Complex(0, 0)), {0.0, 1.0}),
                  Error);
  CHECK_THROWS_AS(convergence_sweep(cylinder(), rho_cylinder(), phi_quadratic(),
                                    cyl_point(Complex(kE, 0)), {1.0, 1.0}),
                  Error);
}

TEST_CASE("make_subspace rejects dependent columns") {
  Eigen::MatrixXcd cols(2, 2);
  cols << Complex(1, 0), Complex(2, 0), Complex(0, 1), Complex(0, 2);
  CHECK_THROWS_AS(make_subspace(cols), Error);
}
