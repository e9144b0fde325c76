#include "polar_ray/expr.hpp"

#include <cctype>
#include <cmath>
#include <sstream>

namespace polar_ray {

std::string var_name(const VarId& v) {
  const char* prefix = nullptr;
  switch (v.kind) {
    case VarKind::Y: prefix = "y"; break;
    case VarKind::Z: prefix = "z"; break;
    case VarKind::Zb: prefix = "zb"; break;
    case VarKind::Mu: prefix = "mu"; break;
  }
  return std::string(prefix) + std::to_string(v.index);
}

VarId parse_var(const std::string& name) {
  auto split = [&](const std::string& prefix, VarKind kind) -> VarId {
    std::string digits = name.substr(prefix.size());
    if (digits.size() != 1 || digits[0] < '1' || digits[0] > '9')
      throw Error(Errc::UnknownVariable, "bad variable index in '" + name + "' (expected 1..9)");
    return {kind, digits[0] - '0'};
  };
  if (name.rfind("zb", 0) == 0) return split("zb", VarKind::Zb);
  if (name.rfind("mu", 0) == 0) return split("mu", VarKind::Mu);
  if (name.rfind("y", 0) == 0) return split("y", VarKind::Y);
  if (name.rfind("z", 0) == 0) return split("z", VarKind::Z);
  throw Error(Errc::UnknownVariable, "unknown variable '" + name + "'");
}

Complex EvalEnv::lookup(const VarId& v) const {
  const int i = v.index - 1;
  switch (v.kind) {
    case VarKind::Y:
      if (i >= y.size()) throw Error(Errc::UnknownVariable, var_name(v) + " not bound");
      return Complex(y(i), 0.0);
    case VarKind::Z:
      if (i >= z.size()) throw Error(Errc::UnknownVariable, var_name(v) + " not bound");
      return z(i);
    case VarKind::Zb:
      if (i >= zb.size()) throw Error(Errc::UnknownVariable, var_name(v) + " not bound");
      return zb(i);
    case VarKind::Mu:
      if (i >= mu.size()) throw Error(Errc::UnknownVariable, var_name(v) + " not bound");
      return Complex(mu(i), 0.0);
  }
  throw Error(Errc::UnknownVariable, "corrupt variable id");
}

void EvalEnv::set(const VarId& v, Complex value) {
  const int i = v.index - 1;
  switch (v.kind) {
    case VarKind::Y:
      if (i >= y.size()) throw Error(Errc::UnknownVariable, var_name(v) + " not bound");
      y(i) = value.real();
      return;
    case VarKind::Z:
      if (i >= z.size()) throw Error(Errc::UnknownVariable, var_name(v) + " not bound");
      z(i) = value;
      return;
    case VarKind::Zb:
      if (i >= zb.size()) throw Error(Errc::UnknownVariable, var_name(v) + " not bound");
      zb(i) = value;
      return;
    case VarKind::Mu:
      if (i >= mu.size()) throw Error(Errc::UnknownVariable, var_name(v) + " not bound");
      mu(i) = value.real();
      return;
  }
}

struct Expr::Node {
  enum class Kind { Constant, Variable, Sum, Product, Power, Exp, Log };

  Kind kind;
  double value = 0.0;        // Constant
  VarId var{VarKind::Y, 1};  // Variable
  NodePtr lhs, rhs;          // Sum/Product children; unary child in lhs
  double exponent = 0.0;     // Power
};

namespace {

using Node = Expr::Node;
using NodePtr = Expr::NodePtr;
using Kind = Node::Kind;

NodePtr make_const(double c) {
  auto n = std::make_shared<Node>();
  n->kind = Kind::Constant;
  n->value = c;
  return n;
}

bool is_const(const NodePtr& n, double c) {
  return n->kind == Kind::Constant && n->value == c;
}

NodePtr make_sum(NodePtr a, NodePtr b) {
  if (a->kind == Kind::Constant && b->kind == Kind::Constant) return make_const(a->value + b->value);
  if (is_const(a, 0.0)) return b;
  if (is_const(b, 0.0)) return a;
  auto n = std::make_shared<Node>();
  n->kind = Kind::Sum;
  n->lhs = std::move(a);
  n->rhs = std::move(b);
  return n;
}

NodePtr make_product(NodePtr a, NodePtr b) {
  if (a->kind == Kind::Constant && b->kind == Kind::Constant) return make_const(a->value * b->value);
  if (is_const(a, 0.0) || is_const(b, 0.0)) return make_const(0.0);
  if (is_const(a, 1.0)) return b;
  if (is_const(b, 1.0)) return a;
  auto n = std::make_shared<Node>();
  n->kind = Kind::Product;
  n->lhs = std::move(a);
  n->rhs = std::move(b);
  return n;
}

NodePtr make_power(NodePtr base, double exponent) {
  if (exponent == 0.0) return make_const(1.0);
  if (exponent == 1.0) return base;
  if (base->kind == Kind::Constant) return make_const(std::pow(base->value, exponent));
  auto n = std::make_shared<Node>();
  n->kind = Kind::Power;
  n->lhs = std::move(base);
  n->exponent = exponent;
  return n;
}

NodePtr make_unary(Kind kind, NodePtr child) {
  if (child->kind == Kind::Constant) {
    if (kind == Kind::Exp) return make_const(std::exp(child->value));
    return make_const(std::log(child->value));
  }
  auto n = std::make_shared<Node>();
  n->kind = kind;
  n->lhs = std::move(child);
  return n;
}

Complex pow_eval(Complex base, double exponent) {
  const double r = std::nearbyint(exponent);
  if (r == exponent && std::abs(r) <= 64.0) {
    // Exact repeated multiplication for integer exponents; keeps Laurent
    // monomials like zb1^-1 away from the principal-branch pow.
    Complex acc(1.0, 0.0);
    Complex b = base;
    long e = static_cast<long>(std::abs(r));
    while (e > 0) {
      if (e & 1) acc *= b;
      b *= b;
      e >>= 1;
    }
    return r < 0 ? Complex(1.0, 0.0) / acc : acc;
  }
  return std::pow(base, Complex(exponent, 0.0));
}

Complex eval_node(const Node& n, const EvalEnv& env) {
  switch (n.kind) {
    case Kind::Constant: return Complex(n.value, 0.0);
    case Kind::Variable: return env.lookup(n.var);
    case Kind::Sum: return eval_node(*n.lhs, env) + eval_node(*n.rhs, env);
    case Kind::Product: return eval_node(*n.lhs, env) * eval_node(*n.rhs, env);
    case Kind::Power: return pow_eval(eval_node(*n.lhs, env), n.exponent);
    case Kind::Exp: return std::exp(eval_node(*n.lhs, env));
    case Kind::Log: return std::log(eval_node(*n.lhs, env));
  }
  throw Error(Errc::ParseError, "corrupt expression node");
}

NodePtr diff_node(const NodePtr& n, const VarId& v) {
  switch (n->kind) {
    case Kind::Constant:
      return make_const(0.0);
    case Kind::Variable:
      return make_const(n->var == v ? 1.0 : 0.0);
    case Kind::Sum:
      return make_sum(diff_node(n->lhs, v), diff_node(n->rhs, v));
    case Kind::Product:
      return make_sum(make_product(diff_node(n->lhs, v), n->rhs),
                      make_product(n->lhs, diff_node(n->rhs, v)));
    case Kind::Power:
      // d(f^c) = c f^(c-1) df
      return make_product(make_const(n->exponent),
                          make_product(make_power(n->lhs, n->exponent - 1.0), diff_node(n->lhs, v)));
    case Kind::Exp:
      return make_product(make_unary(Kind::Exp, n->lhs), diff_node(n->lhs, v));
    case Kind::Log:
      return make_product(make_power(n->lhs, -1.0), diff_node(n->lhs, v));
  }
  throw Error(Errc::ParseError, "corrupt expression node");
}

void collect_vars(const NodePtr& n, std::set<VarId>& out) {
  switch (n->kind) {
    case Kind::Constant: return;
    case Kind::Variable: out.insert(n->var); return;
    case Kind::Sum:
    case Kind::Product:
      collect_vars(n->lhs, out);
      collect_vars(n->rhs, out);
      return;
    case Kind::Power:
    case Kind::Exp:
    case Kind::Log:
      collect_vars(n->lhs, out);
      return;
  }
}

std::string fmt_double(double v) {
  if (v == std::nearbyint(v) && std::abs(v) < 1e15) {
    std::ostringstream os;
    os << static_cast<long long>(v);
    return os.str();
  }
  std::ostringstream os;
  os.precision(17);
  os << v;
  return os.str();
}

// Precedence levels for printing: 0 sum, 1 product, 2 power/unary, 3 atom.
std::string print_node(const NodePtr& n, int parent_level) {
  std::string body;
  int level = 3;
  switch (n->kind) {
    case Kind::Constant:
      body = fmt_double(n->value);
      if (n->value < 0) level = 2;
      break;
    case Kind::Variable:
      body = var_name(n->var);
      break;
    case Kind::Sum:
      body = print_node(n->lhs, 0) + " + " + print_node(n->rhs, 0);
      level = 0;
      break;
    case Kind::Product:
      body = print_node(n->lhs, 1) + "*" + print_node(n->rhs, 1);
      level = 1;
      break;
    case Kind::Power:
      body = print_node(n->lhs, 3) + "^" + fmt_double(n->exponent);
      level = 2;
      break;
    case Kind::Exp:
      body = "exp(" + print_node(n->lhs, 0) + ")";
      break;
    case Kind::Log:
      body = "log(" + print_node(n->lhs, 0) + ")";
      break;
  }
  if (level < parent_level) return "(" + body + ")";
  return body;
}

class Parser {
 public:
  explicit Parser(const std::string& text) : text_(text) {}

  NodePtr run() {
    NodePtr e = parse_sum();
    skip_ws();
    if (pos_ != text_.size()) fail("unexpected trailing input");
    return e;
  }

 private:
  [[noreturn]] void fail(const std::string& msg) {
    throw Error(Errc::ParseError, msg + " at offset " + std::to_string(pos_) + " in '" + text_ + "'");
  }

  void skip_ws() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
  }

  bool eat(char c) {
    skip_ws();
    if (pos_ < text_.size() && text_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  char peek() {
    skip_ws();
    return pos_ < text_.size() ? text_[pos_] : '\0';
  }

  NodePtr parse_sum() {
    NodePtr e = parse_term();
    for (;;) {
      if (eat('+')) {
        e = make_sum(e, parse_term());
      } else if (eat('-')) {
        e = make_sum(e, make_product(make_const(-1.0), parse_term()));
      } else {
        return e;
      }
    }
  }

  NodePtr parse_term() {
    NodePtr e = parse_unary();
    for (;;) {
      if (eat('*')) {
        e = make_product(e, parse_unary());
      } else if (eat('/')) {
        e = make_product(e, make_power(parse_unary(), -1.0));
      } else {
        return e;
      }
    }
  }

  NodePtr parse_unary() {
    if (eat('-')) return make_product(make_const(-1.0), parse_unary());
    return parse_power();
  }

  NodePtr parse_power() {
    NodePtr base = parse_atom();
    if (eat('^')) {
      NodePtr ex = parse_unary();  // right-associative, allows y^-2
      if (ex->kind != Kind::Constant) fail("exponent must fold to a numeric constant");
      return make_power(base, ex->value);
    }
    return base;
  }

  NodePtr parse_atom() {
    skip_ws();
    if (pos_ >= text_.size()) fail("unexpected end of input");
    char c = text_[pos_];
    if (c == '(') {
      ++pos_;
      NodePtr e = parse_sum();
      if (!eat(')')) fail("expected ')'");
      return e;
    }
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return parse_number();
    if (std::isalpha(static_cast<unsigned char>(c))) return parse_ident();
    fail(std::string("unexpected character '") + c + "'");
  }

  NodePtr parse_number() {
    size_t start = pos_;
    while (pos_ < text_.size() &&
           (std::isdigit(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '.' ||
            text_[pos_] == 'e' || text_[pos_] == 'E' ||
            ((text_[pos_] == '+' || text_[pos_] == '-') && pos_ > start &&
             (text_[pos_ - 1] == 'e' || text_[pos_ - 1] == 'E')))) {
      ++pos_;
    }
    double v = 0.0;
    size_t used = 0;
    try {
      v = std::stod(text_.substr(start, pos_ - start), &used);
    } catch (const std::exception&) {
      fail("bad numeric literal");
    }
    if (used != pos_ - start) fail("bad numeric literal");
    return make_const(v);
  }

  NodePtr parse_ident() {
    size_t start = pos_;
    while (pos_ < text_.size() && (std::isalnum(static_cast<unsigned char>(text_[pos_])))) ++pos_;
    std::string name = text_.substr(start, pos_ - start);
    if (name == "exp" || name == "log") {
      if (!eat('(')) fail("expected '(' after function name");
      NodePtr arg = parse_sum();
      if (!eat(')')) fail("expected ')'");
      return make_unary(name == "exp" ? Kind::Exp : Kind::Log, arg);
    }
    auto n = std::make_shared<Node>();
    n->kind = Kind::Variable;
    n->var = parse_var(name);
    return n;
  }

  const std::string& text_;
  size_t pos_ = 0;
};

}  // namespace

Expr Expr::constant(double c) { return Expr(make_const(c)); }

Expr Expr::variable(VarId v) {
  auto n = std::make_shared<Node>();
  n->kind = Kind::Variable;
  n->var = v;
  return Expr(std::move(n));
}

Expr Expr::sum(const Expr& a, const Expr& b) { return Expr(make_sum(a.node_, b.node_)); }

Expr Expr::sub(const Expr& a, const Expr& b) {
  return Expr(make_sum(a.node_, make_product(make_const(-1.0), b.node_)));
}

Expr Expr::product(const Expr& a, const Expr& b) { return Expr(make_product(a.node_, b.node_)); }

Expr Expr::quotient(const Expr& a, const Expr& b) {
  return Expr(make_product(a.node_, make_power(b.node_, -1.0)));
}

Expr Expr::power(const Expr& base, double exponent) { return Expr(make_power(base.node_, exponent)); }

Expr Expr::exp(const Expr& a) { return Expr(make_unary(Kind::Exp, a.node_)); }

Expr Expr::log(const Expr& a) { return Expr(make_unary(Kind::Log, a.node_)); }

Expr Expr::negate(const Expr& a) { return Expr(make_product(make_const(-1.0), a.node_)); }

Expr Expr::parse(const std::string& text) { return Expr(Parser(text).run()); }

Complex Expr::eval(const EvalEnv& env) const { return eval_node(*node_, env); }

Expr Expr::derivative(const VarId& v) const { return Expr(diff_node(node_, v)); }

bool Expr::is_constant() const { return node_->kind == Kind::Constant; }

double Expr::constant_value() const {
  if (!is_constant()) throw Error(Errc::ParseError, "expression is not a constant");
  return node_->value;
}

std::set<VarId> Expr::variables() const {
  std::set<VarId> out;
  collect_vars(node_, out);
  return out;
}

std::string Expr::to_string() const { return print_node(node_, 0); }

Complex fd_oracle(const Expr& field, const EvalEnv& env, const VarId& var, double h) {
  if (h <= 0.0) throw Error(Errc::DomainEscape, "fd_oracle requires h > 0");
  auto central = [&](double step) {
    EvalEnv up = env;
    EvalEnv dn = env;
    up.set(var, env.lookup(var) + Complex(step, 0.0));
    dn.set(var, env.lookup(var) - Complex(step, 0.0));
    return (field.eval(up) - field.eval(dn)) / Complex(2.0 * step, 0.0);
  };
  const Complex d_h = central(h);
  const Complex d_h2 = central(h / 2.0);
  return (4.0 * d_h2 - d_h) / 3.0;
}

}  // namespace polar_ray
