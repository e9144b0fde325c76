#include "polar_ray/model.hpp"

#include <cmath>
#include <random>

#include <Eigen/SVD>

namespace polar_ray {

LocalModel build_model(int n, int k, int r, const Eigen::MatrixXi& weights) {
  if (n < 1) throw Error(Errc::DimensionMismatch, "torus dimension n must be >= 1");
  if (k < 0 || k > n) throw Error(Errc::DimensionMismatch, "need 0 <= k <= n");
  if (r < 0) throw Error(Errc::DimensionMismatch, "fiber dimension r must be >= 0");
  if (weights.rows() != k || weights.cols() != r)
    throw Error(Errc::DimensionMismatch, "weight matrix must have shape k x r");

  if (k >= 1) {
    // Effective action: B must have full row rank.
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(weights.cast<double>());
    const auto& sv = svd.singularValues();
    if (sv.size() < k || sv(k - 1) <= 1e-12 * std::max(1.0, sv.size() ? sv(0) : 0.0))
      throw Error(Errc::DimensionMismatch, "weight matrix must have full row rank (effective action)");
  }

  LocalModel model;
  model.n_torus = n;
  model.k_stab = k;
  model.r_fiber = r;
  model.m_complex = (n - k) + r;
  model.weights = weights;
  if (model.m_complex != n - k + r)
    throw Error(Errc::DimensionMismatch, "m != (n - k) + r");
  return model;
}

Eigen::VectorXd ModelPoint::y() const {
  Eigen::VectorXd out(w.size());
  for (Eigen::Index j = 0; j < w.size(); ++j) out(j) = std::log(std::abs(w(j)));
  return out;
}

Eigen::VectorXd ModelPoint::theta() const {
  Eigen::VectorXd out(w.size());
  for (Eigen::Index j = 0; j < w.size(); ++j) out(j) = std::arg(w(j));
  return out;
}

double ModelPoint::fiber_angle(int l) const {
  if (l < 1 || l > z.size())
    throw Error(Errc::DimensionMismatch, "fiber index out of range");
  if (std::abs(z(l - 1)) == 0.0)
    throw Error(Errc::DomainEscape, "fiber angle undefined at z = 0");
  return std::arg(z(l - 1));
}

ModelPoint make_point(const LocalModel& model, const Eigen::VectorXcd& w,
                      const Eigen::VectorXcd& z) {
  if (w.size() != model.torus_dim() || z.size() != model.r_fiber)
    throw Error(Errc::DimensionMismatch, "point has wrong coordinate counts for model");
  for (Eigen::Index j = 0; j < w.size(); ++j)
    if (std::abs(w(j)) <= 0.0)
      throw Error(Errc::DimensionMismatch, "torus coordinates must be nonzero");
  return ModelPoint{w, z};
}

ModelPoint apply_torus(const LocalModel& model, const ModelPoint& p,
                       const Eigen::VectorXd& angles) {
  if (angles.size() != model.n_torus)
    throw Error(Errc::DimensionMismatch, "torus element needs n angles");
  const int nk = model.torus_dim();
  ModelPoint out = p;
  for (int j = 0; j < nk; ++j) out.w(j) *= std::polar(1.0, angles(j));
  for (int l = 0; l < model.r_fiber; ++l) {
    double phase = 0.0;
    for (int g = 0; g < model.k_stab; ++g) phase += angles(nk + g) * model.weights(g, l);
    out.z(l) *= std::polar(1.0, phase);
  }
  return out;
}

EvalEnv point_env(const LocalModel& model, const ModelPoint& p) {
  EvalEnv env;
  env.y = p.y();
  env.z = p.z;
  env.zb = p.z.conjugate();
  env.mu.resize(0);
  (void)model;
  return env;
}

double invariance_deviation(const LocalModel& model, const ScalarField& rho,
                            const std::vector<ModelPoint>& samples, int group_samples,
                            std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> angle(0.0, 2.0 * M_PI);
  double worst = 0.0;
  for (const ModelPoint& p : samples) {
    const EvalEnv env0 = point_env(model, p);
    const Complex base = rho.expr().eval(env0);
    for (int s = 0; s < group_samples; ++s) {
      Eigen::VectorXd angles(model.n_torus);
      for (int j = 0; j < model.n_torus; ++j) angles(j) = angle(rng);
      const ModelPoint q = apply_torus(model, p, angles);
      const Complex moved = rho.expr().eval(point_env(model, q));
      worst = std::max(worst, std::abs(moved - base));
    }
    // A potential must also be real-valued.
    worst = std::max(worst, std::abs(base.imag()));
  }
  return worst;
}

bool validate_invariance(const LocalModel& model, const ScalarField& rho,
                         const std::vector<ModelPoint>& samples, int group_samples,
                         double tol, std::uint64_t seed) {
  if (group_samples < 4)
    throw Error(Errc::DimensionMismatch, "invariance check needs at least 4 group samples");
  return invariance_deviation(model, rho, samples, group_samples, seed) <= tol;
}

Eigen::MatrixXd fundamental_fields(const LocalModel& model, const ModelPoint& p) {
  const int nk = model.torus_dim();
  const int r = model.r_fiber;
  Eigen::MatrixXd fields = Eigen::MatrixXd::Zero(model.n_torus, model.real_dim());
  for (int j = 0; j < nk; ++j) fields(j, nk + j) = 1.0;  // d/dtheta_j
  for (int g = 0; g < model.k_stab; ++g) {
    for (int l = 0; l < r; ++l) {
      // Velocity of z_l under the weight-b rotation is i*b*z_l.
      const double b = static_cast<double>(model.weights(g, l));
      fields(nk + g, 2 * nk + 2 * l) = -b * p.z(l).imag();
      fields(nk + g, 2 * nk + 2 * l + 1) = b * p.z(l).real();
    }
  }
  return fields;
}

RegularityReport regularity(const LocalModel& model, const ModelPoint& p) {
  const Eigen::MatrixXd fields = fundamental_fields(model, p);
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(fields);
  const auto& sv = svd.singularValues();
  const double scale = sv.size() ? sv(0) : 0.0;
  int rank = 0;
  for (Eigen::Index i = 0; i < sv.size(); ++i)
    if (sv(i) > 1e-10 * std::max(1.0, scale)) ++rank;
  RegularityReport report;
  report.point = p;
  report.stab_dim = model.n_torus - rank;
  report.is_regular = (report.stab_dim == 0);
  return report;
}

}  // namespace polar_ray
