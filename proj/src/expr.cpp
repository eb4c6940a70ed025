#include "ofsym/expr.hpp"

#include <cmath>
#include <cstdio>
#include <sstream>

namespace ofsym {

const char* var_name(Var v) {
  switch (v) {
    case Var::X: return "x";
    case Var::T: return "t";
    case Var::S: return "S";
  }
  return "?";
}

ParseError::ParseError(const std::string& msg, std::size_t off)
    : Error(msg + " (at byte " + std::to_string(off) + ")"), offset(off) {}

EvalError::EvalError(const std::string& msg, std::string sub)
    : Error(msg + " in " + sub), subexpr(std::move(sub)) {}

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

namespace detail {

enum class Kind { Constant, Variable, Neg, Add, Sub, Mul, Div, Pow, Call, Quad };
enum class Fn { Exp, Ln, Sin, Cos, Tan, Arctan, Sqrt };

const char* fn_name(Fn f) {
  switch (f) {
    case Fn::Exp: return "exp";
    case Fn::Ln: return "ln";
    case Fn::Sin: return "sin";
    case Fn::Cos: return "cos";
    case Fn::Tan: return "tan";
    case Fn::Arctan: return "arctan";
    case Fn::Sqrt: return "sqrt";
  }
  return "?";
}

struct Node {
  Kind kind;
  double value = 0.0;  // Constant payload, Quad anchor
  Var var = Var::X;    // Variable payload, Quad integration variable
  Fn fn = Fn::Exp;
  std::shared_ptr<const Node> a, b;
  std::shared_ptr<NumericFunction> quad;  // Quad only
};

using NodePtr = std::shared_ptr<const Node>;

NodePtr make_const(double v) {
  auto n = std::make_shared<Node>();
  n->kind = Kind::Constant;
  n->value = v;
  return n;
}

NodePtr make_var(Var v) {
  auto n = std::make_shared<Node>();
  n->kind = Kind::Variable;
  n->var = v;
  return n;
}

bool is_const(const NodePtr& n, double v) {
  return n->kind == Kind::Constant && n->value == v;
}

}  // namespace detail

using detail::Kind;
using detail::Fn;
using detail::Node;
using detail::NodePtr;

Expr::Expr() : node_(detail::make_const(0.0)) {}

Expr Expr::constant(double v) { return Expr(detail::make_const(v)); }
Expr Expr::variable(Var v) { return Expr(detail::make_var(v)); }

static Expr make_binary(Kind k, Expr a, Expr b) {
  const NodePtr& na = a.node();
  const NodePtr& nb = b.node();
  const bool ca = na->kind == Kind::Constant;
  const bool cb = nb->kind == Kind::Constant;
  if (ca && cb) {
    double r = 0;
    bool fold = true;
    switch (k) {
      case Kind::Add: r = na->value + nb->value; break;
      case Kind::Sub: r = na->value - nb->value; break;
      case Kind::Mul: r = na->value * nb->value; break;
      case Kind::Div:
        if (nb->value != 0.0) r = na->value / nb->value; else fold = false;
        break;
      case Kind::Pow:
        r = std::pow(na->value, nb->value);
        fold = std::isfinite(r);
        break;
      default: fold = false;
    }
    if (fold && std::isfinite(r)) return Expr::constant(r);
  }
  switch (k) {
    case Kind::Add:
      if (detail::is_const(na, 0)) return b;
      if (detail::is_const(nb, 0)) return a;
      break;
    case Kind::Sub:
      if (detail::is_const(nb, 0)) return a;
      if (detail::is_const(na, 0)) return -b;
      break;
    case Kind::Mul:
      if (detail::is_const(na, 0) || detail::is_const(nb, 0)) return Expr::constant(0);
      if (detail::is_const(na, 1)) return b;
      if (detail::is_const(nb, 1)) return a;
      break;
    case Kind::Div:
      if (detail::is_const(na, 0) && !detail::is_const(nb, 0)) return Expr::constant(0);
      if (detail::is_const(nb, 1)) return a;
      break;
    case Kind::Pow:
      if (detail::is_const(nb, 1)) return a;
      if (detail::is_const(nb, 0)) return Expr::constant(1);
      break;
    default: break;
  }
  auto n = std::make_shared<Node>();
  n->kind = k;
  n->a = na;
  n->b = nb;
  return Expr(n);
}

Expr operator+(Expr a, Expr b) { return make_binary(Kind::Add, a, b); }
Expr operator-(Expr a, Expr b) { return make_binary(Kind::Sub, a, b); }
Expr operator*(Expr a, Expr b) { return make_binary(Kind::Mul, a, b); }
Expr operator/(Expr a, Expr b) { return make_binary(Kind::Div, a, b); }
Expr Expr::pow(Expr a, Expr b) { return make_binary(Kind::Pow, a, b); }

Expr operator-(Expr a) {
  const NodePtr& na = a.node();
  if (na->kind == Kind::Constant) return Expr::constant(-na->value);
  if (na->kind == Kind::Neg) return Expr(na->a);
  auto n = std::make_shared<Node>();
  n->kind = Kind::Neg;
  n->a = na;
  return Expr(n);
}

static Expr make_call(Fn f, Expr a) {
  const NodePtr& na = a.node();
  if (na->kind == Kind::Constant) {
    double r = 0;
    switch (f) {
      case Fn::Exp: r = std::exp(na->value); break;
      case Fn::Ln: r = std::log(na->value); break;
      case Fn::Sin: r = std::sin(na->value); break;
      case Fn::Cos: r = std::cos(na->value); break;
      case Fn::Tan: r = std::tan(na->value); break;
      case Fn::Arctan: r = std::atan(na->value); break;
      case Fn::Sqrt: r = std::sqrt(na->value); break;
    }
    if (std::isfinite(r)) return Expr::constant(r);
  }
  auto n = std::make_shared<Node>();
  n->kind = Kind::Call;
  n->fn = f;
  n->a = na;
  return Expr(n);
}

Expr Expr::exp(Expr a) { return make_call(Fn::Exp, a); }
Expr Expr::ln(Expr a) { return make_call(Fn::Ln, a); }
Expr Expr::sin(Expr a) { return make_call(Fn::Sin, a); }
Expr Expr::cos(Expr a) { return make_call(Fn::Cos, a); }
Expr Expr::tan(Expr a) { return make_call(Fn::Tan, a); }
Expr Expr::arctan(Expr a) { return make_call(Fn::Arctan, a); }
Expr Expr::sqrt(Expr a) { return make_call(Fn::Sqrt, a); }

static std::string node_str(const NodePtr& n);

static double eval_node(const NodePtr& n, const Bindings& b);

static double checked(double r, const NodePtr& n, const char* what) {
  if (!std::isfinite(r)) throw EvalError(std::string("domain error: ") + what, node_str(n));
  return r;
}

static double eval_node(const NodePtr& n, const Bindings& b) {
  switch (n->kind) {
    case Kind::Constant: return n->value;
    case Kind::Variable: {
      auto v = b.get(n->var);
      if (!v) throw EvalError("unbound symbol", var_name(n->var));
      return *v;
    }
    case Kind::Neg: return -eval_node(n->a, b);
    case Kind::Add: return eval_node(n->a, b) + eval_node(n->b, b);
    case Kind::Sub: return eval_node(n->a, b) - eval_node(n->b, b);
    case Kind::Mul: return eval_node(n->a, b) * eval_node(n->b, b);
    case Kind::Div: {
      double num = eval_node(n->a, b);
      double den = eval_node(n->b, b);
      if (den == 0.0) throw EvalError("domain error: division by zero", node_str(n));
      return checked(num / den, n, "non-finite quotient");
    }
    case Kind::Pow: {
      double base = eval_node(n->a, b);
      double ex = eval_node(n->b, b);
      return checked(std::pow(base, ex), n, "pow outside domain");
    }
    case Kind::Call: {
      double v = eval_node(n->a, b);
      switch (n->fn) {
        case Fn::Exp: return checked(std::exp(v), n, "exp overflow");
        case Fn::Ln:
          if (v <= 0.0) throw EvalError("domain error: ln of non-positive", node_str(n));
          return std::log(v);
        case Fn::Sin: return std::sin(v);
        case Fn::Cos: return std::cos(v);
        case Fn::Tan: return checked(std::tan(v), n, "tan pole");
        case Fn::Arctan: return std::atan(v);
        case Fn::Sqrt:
          if (v < 0.0) throw EvalError("domain error: sqrt of negative", node_str(n));
          return std::sqrt(v);
      }
      break;
    }
    case Kind::Quad: {
      auto v = b.get(n->var);
      if (!v) throw EvalError("unbound symbol", var_name(n->var));
      return (*n->quad)(*v);
    }
  }
  throw Error("corrupt expression node");
}

double Expr::eval(const Bindings& b) const { return eval_node(node_, b); }

bool Expr::is_constant() const { return node_->kind == Kind::Constant; }

static bool depends(const NodePtr& n, Var v) {
  switch (n->kind) {
    case Kind::Constant: return false;
    case Kind::Variable: return n->var == v;
    case Kind::Neg: return depends(n->a, v);
    case Kind::Call: return depends(n->a, v);
    case Kind::Quad: return n->var == v || depends(n->a, v);
    default: return depends(n->a, v) || depends(n->b, v);
  }
}

bool Expr::depends_on(Var v) const { return depends(node_, v); }

Expr Expr::diff(Var v) const {
  const NodePtr& n = node_;
  switch (n->kind) {
    case Kind::Constant: return constant(0);
    case Kind::Variable: return constant(n->var == v ? 1 : 0);
    case Kind::Neg: return -Expr(n->a).diff(v);
    case Kind::Add: return Expr(n->a).diff(v) + Expr(n->b).diff(v);
    case Kind::Sub: return Expr(n->a).diff(v) - Expr(n->b).diff(v);
    case Kind::Mul: {
      Expr a(n->a), b(n->b);
      return a.diff(v) * b + a * b.diff(v);
    }
    case Kind::Div: {
      Expr a(n->a), b(n->b);
      return (a.diff(v) * b - a * b.diff(v)) / (b * b);
    }
    case Kind::Pow: {
      Expr a(n->a), b(n->b);
      if (!b.depends_on(v)) {
        // d(a^b) = b a^(b-1) a' for exponents free of v; valid for a < 0 too
        return b * pow(a, b - constant(1)) * a.diff(v);
      }
      // general rule needs ln a; evaluation will flag non-positive bases
      return pow(a, b) * (b.diff(v) * ln(a) + b * a.diff(v) / a);
    }
    case Kind::Call: {
      Expr a(n->a);
      Expr da = a.diff(v);
      switch (n->fn) {
        case Fn::Exp: return exp(a) * da;
        case Fn::Ln: return da / a;
        case Fn::Sin: return cos(a) * da;
        case Fn::Cos: return -(sin(a) * da);
        case Fn::Tan: return da / (cos(a) * cos(a));
        case Fn::Arctan: return da / (constant(1) + a * a);
        case Fn::Sqrt: return da / (constant(2) * sqrt(a));
      }
      break;
    }
    case Kind::Quad: {
      if (n->var == v) return Expr(n->a);
      // integrand is a function of the integration variable only, so
      // differentiation under the integral sign reduces to zero here
      Expr di = Expr(n->a).diff(v);
      if (di.is_constant() && di.eval(Bindings{}) == 0.0) return constant(0);
      return antiderivative(di, n->var, n->value, n->quad->tol());
    }
  }
  throw Error("corrupt expression node");
}

Expr Expr::subst(Var v, const Expr& repl) const {
  const NodePtr& n = node_;
  switch (n->kind) {
    case Kind::Constant: return *this;
    case Kind::Variable: return n->var == v ? repl : *this;
    case Kind::Neg: return -Expr(n->a).subst(v, repl);
    case Kind::Add: return Expr(n->a).subst(v, repl) + Expr(n->b).subst(v, repl);
    case Kind::Sub: return Expr(n->a).subst(v, repl) - Expr(n->b).subst(v, repl);
    case Kind::Mul: return Expr(n->a).subst(v, repl) * Expr(n->b).subst(v, repl);
    case Kind::Div: return Expr(n->a).subst(v, repl) / Expr(n->b).subst(v, repl);
    case Kind::Pow: return pow(Expr(n->a).subst(v, repl), Expr(n->b).subst(v, repl));
    case Kind::Call: {
      Expr a = Expr(n->a).subst(v, repl);
      switch (n->fn) {
        case Fn::Exp: return exp(a);
        case Fn::Ln: return ln(a);
        case Fn::Sin: return sin(a);
        case Fn::Cos: return cos(a);
        case Fn::Tan: return tan(a);
        case Fn::Arctan: return arctan(a);
        case Fn::Sqrt: return sqrt(a);
      }
      break;
    }
    case Kind::Quad: {
      if (n->var == v)
        throw Error("cannot substitute the integration variable of an antiderivative");
      Expr inner = Expr(n->a).subst(v, repl);
      if (inner.node() == n->a) return *this;
      return antiderivative(inner, n->var, n->value, n->quad->tol());
    }
  }
  throw Error("corrupt expression node");
}

static std::string node_str(const NodePtr& n) {
  switch (n->kind) {
    case Kind::Constant: return format_double(n->value);
    case Kind::Variable: return var_name(n->var);
    case Kind::Neg: return "(-" + node_str(n->a) + ")";
    case Kind::Add: return "(" + node_str(n->a) + " + " + node_str(n->b) + ")";
    case Kind::Sub: return "(" + node_str(n->a) + " - " + node_str(n->b) + ")";
    case Kind::Mul: return "(" + node_str(n->a) + " * " + node_str(n->b) + ")";
    case Kind::Div: return "(" + node_str(n->a) + " / " + node_str(n->b) + ")";
    case Kind::Pow: return "(" + node_str(n->a) + " ^ " + node_str(n->b) + ")";
    case Kind::Call: return std::string(detail::fn_name(n->fn)) + "(" + node_str(n->a) + ")";
    case Kind::Quad:
      return "int(" + node_str(n->a) + ", " + var_name(n->var) + ", " +
             format_double(n->value) + ")";
  }
  return "?";
}

std::string Expr::str() const { return node_str(node_); }

static bool same(const NodePtr& a, const NodePtr& b) {
  if (a == b) return true;
  if (a->kind != b->kind) return false;
  switch (a->kind) {
    case Kind::Constant: return a->value == b->value;
    case Kind::Variable: return a->var == b->var;
    case Kind::Neg: return same(a->a, b->a);
    case Kind::Call: return a->fn == b->fn && same(a->a, b->a);
    case Kind::Quad:
      return a->var == b->var && a->value == b->value && same(a->a, b->a);
    default: return same(a->a, b->a) && same(a->b, b->b);
  }
}

bool Expr::same_structure(const Expr& other) const { return same(node_, other.node_); }

// ---------------------------------------------------------------------------
// Quadrature

namespace {

struct SimpsonPanel {
  double integral;
  double err;
};

double simpson(double fa, double fm, double fb, double h) {
  return (fa + 4.0 * fm + fb) * (h / 6.0);
}

double simpson_adaptive(const std::function<double(double)>& f, double a, double m,
                        double b, double fa, double fm, double fb, double whole,
                        double tol, int depth) {
  if (depth > 52) throw QuadratureError("quadrature subdivision budget exhausted");
  const double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
  const double flm = f(lm), frm = f(rm);
  if (!std::isfinite(flm) || !std::isfinite(frm))
    throw QuadratureError("integrand not finite inside interval");
  const double left = simpson(fa, flm, fm, m - a);
  const double right = simpson(fm, frm, fb, b - m);
  const double delta = left + right - whole;
  if (std::fabs(delta) <= 15.0 * tol)
    return left + right + delta / 15.0;  // Richardson correction
  return simpson_adaptive(f, a, lm, m, fa, flm, fm, left, 0.5 * tol, depth + 1) +
         simpson_adaptive(f, m, rm, b, fm, frm, fb, right, 0.5 * tol, depth + 1);
}

}  // namespace

double integrate_adaptive(const std::function<double(double)>& f, double a, double b,
                          double tol) {
  if (a == b) return 0.0;
  const double fa = f(a), fb = f(b);
  const double m = 0.5 * (a + b);
  const double fm = f(m);
  if (!std::isfinite(fa) || !std::isfinite(fb) || !std::isfinite(fm))
    throw QuadratureError("integrand not finite at quadrature nodes");
  const double whole = simpson(fa, fm, fb, b - a);
  return simpson_adaptive(f, a, m, b, fa, fm, fb, whole, tol, 0);
}

NumericFunction::NumericFunction(Expr integrand, Var v, double ref, double tol)
    : integrand_(std::move(integrand)), var_(v), ref_(ref), tol_(tol) {
  if (tol <= 0) throw Error("quadrature tolerance must be positive");
  for (Var other : {Var::X, Var::T, Var::S}) {
    if (other != v && integrand_.depends_on(other))
      throw Error(std::string("antiderivative integrand depends on ") + var_name(other));
  }
}

double NumericFunction::operator()(double v) const {
  std::lock_guard<std::mutex> lock(mutex_);
  auto hit = cache_.find(v);
  if (hit != cache_.end()) return hit->second;
  if (v == ref_) {
    cache_[v] = 0.0;
    return 0.0;
  }
  // integrate from the nearest already-known anchor to keep intervals short
  double anchor = ref_, anchor_val = 0.0;
  if (!cache_.empty()) {
    auto it = cache_.lower_bound(v);
    if (it == cache_.end()) {
      --it;
    } else if (it != cache_.begin()) {
      auto prev = std::prev(it);
      if (std::fabs(prev->first - v) < std::fabs(it->first - v)) it = prev;
    }
    if (std::fabs(it->first - v) < std::fabs(ref_ - v)) {
      anchor = it->first;
      anchor_val = it->second;
    }
  }
  Var var = var_;
  const Expr& g = integrand_;
  auto f = [&](double p) {
    Bindings b;
    switch (var) {
      case Var::X: b.x = p; break;
      case Var::T: b.t = p; break;
      case Var::S: b.s = p; break;
    }
    return g.eval(b);
  };
  const double value = anchor_val + integrate_adaptive(f, anchor, v, tol_);
  cache_[v] = value;
  return value;
}

Expr antiderivative(const Expr& integrand, Var v, double ref, double tol) {
  if (integrand.is_constant() && integrand.eval(Bindings{}) == 0.0)
    return Expr::constant(0);
  auto n = std::make_shared<Node>();
  n->kind = Kind::Quad;
  n->a = integrand.node();
  n->var = v;
  n->value = ref;
  n->quad = std::make_shared<NumericFunction>(integrand, v, ref, tol);
  return Expr(n);
}

}  // namespace ofsym
