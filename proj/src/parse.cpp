#include "ofsym/expr.hpp"

#include <cctype>
#include <cstdlib>

namespace ofsym {

// Grammar:
//   expr   := term { ('+'|'-') term }
//   term   := factor { ('*'|'/') factor }
//   factor := '-' factor | power
//   power  := atom [ '^' factor ]          (right-associative)
//   atom   := number | ident | ident '(' expr {',' expr} ')' | '(' expr ')'
namespace {

class Parser {
 public:
  Parser(const std::string& text, const std::map<std::string, double>& constants)
      : text_(text), constants_(constants) {}

  Expr run() {
    Expr e = expr();
    skip_ws();
    if (pos_ != text_.size())
      throw ParseError("unexpected trailing input", pos_);
    return e;
  }

 private:
  const std::string& text_;
  const std::map<std::string, double>& constants_;
  std::size_t pos_ = 0;

  void skip_ws() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
  }

  char peek() {
    skip_ws();
    return pos_ < text_.size() ? text_[pos_] : '\0';
  }

  bool consume(char c) {
    if (peek() == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  Expr expr() {
    Expr lhs = term();
    for (;;) {
      char c = peek();
      if (c == '+') {
        ++pos_;
        lhs = lhs + term();
      } else if (c == '-') {
        ++pos_;
        lhs = lhs - term();
      } else {
        return lhs;
      }
    }
  }

  Expr term() {
    Expr lhs = factor();
    for (;;) {
      char c = peek();
      if (c == '*') {
        ++pos_;
        lhs = lhs * factor();
      } else if (c == '/') {
        ++pos_;
        lhs = lhs / factor();
      } else {
        return lhs;
      }
    }
  }

  Expr factor() {
    if (consume('-')) return -factor();
    return power();
  }

  Expr power() {
    Expr base = atom();
    if (consume('^')) return Expr::pow(base, factor());
    return base;
  }

  Expr atom() {
    char c = peek();
    if (c == '(') {
      ++pos_;
      Expr inner = expr();
      if (!consume(')')) throw ParseError("expected ')'", pos_);
      return inner;
    }
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return number();
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') return identifier();
    if (c == '\0') throw ParseError("unexpected end of input", pos_);
    throw ParseError(std::string("unexpected character '") + c + "'", pos_);
  }

  Expr number() {
    skip_ws();
    const char* begin = text_.c_str() + pos_;
    char* end = nullptr;
    double v = std::strtod(begin, &end);
    if (end == begin) throw ParseError("malformed number", pos_);
    pos_ += static_cast<std::size_t>(end - begin);
    return Expr::constant(v);
  }

  Expr identifier() {
    skip_ws();
    const std::size_t start = pos_;
    while (pos_ < text_.size() &&
           (std::isalnum(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '_'))
      ++pos_;
    const std::string name = text_.substr(start, pos_ - start);
    if (peek() == '(') return call(name, start);
    if (name == "x") return Expr::variable(Var::X);
    if (name == "t") return Expr::variable(Var::T);
    if (name == "S") return Expr::variable(Var::S);
    auto it = constants_.find(name);
    if (it != constants_.end()) return Expr::constant(it->second);
    throw ParseError("unknown identifier '" + name + "'", start);
  }

  Expr call(const std::string& name, std::size_t start) {
    ++pos_;  // '('
    std::vector<Expr> args;
    args.push_back(expr());
    while (consume(',')) args.push_back(expr());
    if (!consume(')')) throw ParseError("expected ')'", pos_);

    auto unary = [&](Expr (*fn)(Expr)) {
      if (args.size() != 1)
        throw ParseError("'" + name + "' takes one argument", start);
      return fn(args[0]);
    };
    if (name == "exp") return unary(&Expr::exp);
    if (name == "ln") return unary(&Expr::ln);
    if (name == "sin") return unary(&Expr::sin);
    if (name == "cos") return unary(&Expr::cos);
    if (name == "tan") return unary(&Expr::tan);
    if (name == "arctan") return unary(&Expr::arctan);
    if (name == "sqrt") return unary(&Expr::sqrt);
    if (name == "pow") {
      if (args.size() != 2) throw ParseError("'pow' takes two arguments", start);
      return Expr::pow(args[0], args[1]);
    }
    throw ParseError("unknown function '" + name + "'", start);
  }
};

}  // namespace

Expr parse(const std::string& text, const std::map<std::string, double>& constants) {
  return Parser(text, constants).run();
}

}  // namespace ofsym
