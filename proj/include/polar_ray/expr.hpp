#pragma once

#include <complex>
#include <memory>
#include <set>
#include <string>

#include <Eigen/Dense>

#include "polar_ray/error.hpp"

namespace polar_ray {

using Complex = std::complex<double>;

// Variable universe of the expression grammar: y1..y9 (log-radial torus
// coordinates), z1..z9 / zb1..zb9 (fiber coordinates and their conjugates,
// treated as independent Wirtinger variables), mu1..mu9 (moment coordinates).
enum class VarKind { Y, Z, Zb, Mu };

struct VarId {
  VarKind kind;
  int index;  // 1-based, 1..9

  friend bool operator==(const VarId& a, const VarId& b) {
    return a.kind == b.kind && a.index == b.index;
  }
  friend bool operator<(const VarId& a, const VarId& b) {
    if (a.kind != b.kind) return a.kind < b.kind;
    return a.index < b.index;
  }
};

std::string var_name(const VarId& v);
VarId parse_var(const std::string& name);  // throws UnknownVariable

inline VarId var_y(int i) { return {VarKind::Y, i}; }
inline VarId var_z(int i) { return {VarKind::Z, i}; }
inline VarId var_zb(int i) { return {VarKind::Zb, i}; }
inline VarId var_mu(int i) { return {VarKind::Mu, i}; }

// Evaluation environment. Vectors are indexed by (VarId.index - 1); an access
// past the stored size is an UnknownVariable error so dimension mistakes in
// scenarios fail loudly instead of reading garbage.
struct EvalEnv {
  Eigen::VectorXd y;
  Eigen::VectorXcd z;
  Eigen::VectorXcd zb;
  Eigen::VectorXd mu;

  Complex lookup(const VarId& v) const;
  void set(const VarId& v, Complex value);
};

// Immutable expression tree with exact symbolic differentiation.
// Power nodes carry a constant exponent (integer or real); this is all the
// potentials in scope need and keeps the derivative rules closed.
class Expr {
 public:
  struct Node;
  using NodePtr = std::shared_ptr<const Node>;

  Expr() : Expr(constant(0.0)) {}

  static Expr constant(double c);
  static Expr variable(VarId v);
  static Expr sum(const Expr& a, const Expr& b);
  static Expr sub(const Expr& a, const Expr& b);
  static Expr product(const Expr& a, const Expr& b);
  static Expr quotient(const Expr& a, const Expr& b);
  static Expr power(const Expr& base, double exponent);
  static Expr exp(const Expr& a);
  static Expr log(const Expr& a);
  static Expr negate(const Expr& a);

  // Recursive-descent parser for the scenario grammar:
  //   identifiers y1..y9, z1..z9, zb1..zb9, mu1..mu9; operators + - * / ^;
  //   functions exp(...), log(...); parentheses; numeric literals.
  // Exponents must fold to a numeric constant.
  static Expr parse(const std::string& text);

  Complex eval(const EvalEnv& env) const;
  Expr derivative(const VarId& v) const;

  bool is_constant() const;
  double constant_value() const;  // valid only when is_constant()
  std::set<VarId> variables() const;
  std::string to_string() const;

  const NodePtr& node() const { return node_; }

 private:
  explicit Expr(NodePtr n) : node_(std::move(n)) {}
  NodePtr node_;
};

// Central finite difference with one Richardson extrapolation step.
// Independent oracle for Expr::derivative; it only ever evaluates the
// undifferentiated tree.
Complex fd_oracle(const Expr& field, const EvalEnv& env, const VarId& var, double h = 1e-4);

}  // namespace polar_ray
