#pragma once

#include <cstddef>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace ofsym {

enum class Var { X, T, S };

const char* var_name(Var v);

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Syntax/identifier problems carry the byte offset into the input text.
struct ParseError : Error {
  ParseError(const std::string& msg, std::size_t offset);
  std::size_t offset;
};

// Domain violations (ln of non-positive, division by zero, unbound symbol)
// carry a printout of the offending subexpression.
struct EvalError : Error {
  EvalError(const std::string& msg, std::string subexpr);
  std::string subexpr;
};

struct QuadratureError : Error {
  using Error::Error;
};

// Variable/constant bindings for evaluation. Constants are inlined at parse
// time, so only the three variables can appear free.
struct Bindings {
  std::optional<double> x, t, s;

  Bindings() = default;
  static Bindings at_x(double xv) { return {xv, std::nullopt, std::nullopt}; }
  static Bindings at_tx(double tv, double xv) { return {xv, tv, std::nullopt}; }
  Bindings(std::optional<double> xv, std::optional<double> tv, std::optional<double> sv)
      : x(xv), t(tv), s(sv) {}

  std::optional<double> get(Var v) const {
    switch (v) {
      case Var::X: return x;
      case Var::T: return t;
      case Var::S: return s;
    }
    return std::nullopt;
  }
};

namespace detail {
struct Node;
}
class NumericFunction;

// Immutable symbolic expression over {x, t, S}. Copy is a cheap shared
// handle; all operations return new trees. Construction folds constants and
// the 0/1 identities but performs no other simplification.
class Expr {
 public:
  Expr();  // the constant 0

  static Expr constant(double v);
  static Expr variable(Var v);

  // exp, ln, sin, cos, tan, arctan, sqrt
  static Expr exp(Expr a);
  static Expr ln(Expr a);
  static Expr sin(Expr a);
  static Expr cos(Expr a);
  static Expr tan(Expr a);
  static Expr arctan(Expr a);
  static Expr sqrt(Expr a);
  static Expr pow(Expr base, Expr exponent);

  double eval(const Bindings& b) const;
  double eval_x(double x) const { return eval(Bindings::at_x(x)); }
  double eval_tx(double t, double x) const { return eval(Bindings::at_tx(t, x)); }

  Expr diff(Var v) const;
  Expr subst(Var v, const Expr& replacement) const;
  bool depends_on(Var v) const;
  bool is_constant() const;

  // Fully parenthesized form; parse(str()) reproduces the tree for any
  // expression built from the published grammar.
  std::string str() const;

  bool same_structure(const Expr& other) const;

  friend Expr operator+(Expr a, Expr b);
  friend Expr operator-(Expr a, Expr b);
  friend Expr operator*(Expr a, Expr b);
  friend Expr operator/(Expr a, Expr b);
  friend Expr operator-(Expr a);

  // Numeric antiderivative anchored at `ref`: d/dv of the result is
  // `integrand` again, evaluation goes through adaptive quadrature.
  friend Expr antiderivative(const Expr& integrand, Var v, double ref, double tol);

  std::shared_ptr<const detail::Node> node() const { return node_; }
  explicit Expr(std::shared_ptr<const detail::Node> n) : node_(std::move(n)) {}

 private:
  std::shared_ptr<const detail::Node> node_;
};

inline Expr operator+(Expr a, double b) { return a + Expr::constant(b); }
inline Expr operator+(double a, Expr b) { return Expr::constant(a) + b; }
inline Expr operator-(Expr a, double b) { return a - Expr::constant(b); }
inline Expr operator-(double a, Expr b) { return Expr::constant(a) - b; }
inline Expr operator*(Expr a, double b) { return a * Expr::constant(b); }
inline Expr operator*(double a, Expr b) { return Expr::constant(a) * b; }
inline Expr operator/(Expr a, double b) { return a / Expr::constant(b); }
inline Expr operator/(double a, Expr b) { return Expr::constant(a) / b; }

// Quadrature-backed u(v) = \int_ref^v integrand, with u(ref) = 0 exactly.
// Immutable after construction; the value cache is internally synchronized,
// so concurrent evaluation is safe.
class NumericFunction {
 public:
  NumericFunction(Expr integrand, Var v, double ref, double tol);

  double operator()(double v) const;
  double ref() const { return ref_; }
  double tol() const { return tol_; }
  const Expr& integrand() const { return integrand_; }
  Var var() const { return var_; }

 private:
  Expr integrand_;
  Var var_;
  double ref_;
  double tol_;
  mutable std::map<double, double> cache_;
  mutable std::mutex mutex_;
};

Expr antiderivative(const Expr& integrand, Var v, double ref, double tol = 1e-10);

// Adaptive Simpson with Richardson correction. Throws QuadratureError when
// the subdivision budget is exhausted or the integrand is not finite.
double integrate_adaptive(const std::function<double(double)>& f, double a, double b,
                          double tol);

// Parse against the published grammar: decimal literals, identifiers,
// + - * / ^ (right-associative), parentheses, calls, unary minus. Names in
// `constants` are inlined as literals.
Expr parse(const std::string& text, const std::map<std::string, double>& constants = {});

std::string format_double(double v);  // %.17g, used everywhere output must be stable

}  // namespace ofsym
