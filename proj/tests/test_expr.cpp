#include <doctest.h>

#include <cmath>
#include <random>
#include <thread>

#include "ofsym/expr.hpp"

using namespace ofsym;

namespace {

Expr xv() { return Expr::variable(Var::X); }

// Random expression trees kept safe around x = 0.7: denominators bounded
// away from zero, transcendental arguments squashed.
Expr random_tree(std::mt19937& rng, int depth) {
  std::uniform_real_distribution<double> cdist(0.2, 2.5);
  std::uniform_int_distribution<int> pick(0, depth <= 0 ? 1 : 11);
  switch (pick(rng)) {
    case 0: return Expr::constant(cdist(rng));
    case 1: return xv();
    case 2: return random_tree(rng, depth - 1) + random_tree(rng, depth - 1);
    case 3: return random_tree(rng, depth - 1) - random_tree(rng, depth - 1);
    case 4: return random_tree(rng, depth - 1) * random_tree(rng, depth - 1);
    case 5: {
      Expr den = 1.5 + Expr::cos(random_tree(rng, depth - 1)) *
                           Expr::cos(random_tree(rng, depth - 1));
      return random_tree(rng, depth - 1) / den;
    }
    case 6: return Expr::exp(0.8 * Expr::sin(random_tree(rng, depth - 1)));
    case 7: return Expr::ln(1.5 + Expr::sin(random_tree(rng, depth - 1)));
    case 8: return Expr::sqrt(1.5 + Expr::cos(random_tree(rng, depth - 1)));
    case 9: return Expr::tan(Expr::sin(random_tree(rng, depth - 1)));
    case 10: return Expr::arctan(random_tree(rng, depth - 1));
    default:
      return Expr::pow(1.5 + Expr::sin(random_tree(rng, depth - 1)),
                       Expr::constant(cdist(rng)));
  }
}

double fd_derivative(const Expr& e, double x, double h) {
  return (e.eval_x(x + h) - e.eval_x(x - h)) / (2 * h);
}

}  // namespace

TEST_CASE("parse: identity and structure") {
  CHECK(parse("x").same_structure(xv()));
  const Expr expected = 1 + 0.3 * Expr::exp(xv() - 1.5);
  CHECK(parse("1 + 0.3*exp(x - 1.5)").same_structure(expected));
  CHECK(parse("1 + eps*exp(x - x0)", {{"eps", 0.3}, {"x0", 1.5}})
            .same_structure(expected));
}

TEST_CASE("parse: caret is right-associative") {
  CHECK(parse("2^3^2").eval(Bindings{}) == 512.0);
  CHECK(parse("(2^3)^2").eval(Bindings{}) == 64.0);
  CHECK(parse("-2^2").eval(Bindings{}) == -4.0);
}

TEST_CASE("parse: errors carry byte offsets") {
  CHECK_THROWS_AS(parse("1 +"), ParseError);
  try {
    parse("1 + qq");
  } catch (const ParseError& e) {
    CHECK(e.offset == 4);
  }
  try {
    parse("sun(x)");
  } catch (const ParseError& e) {
    CHECK(e.offset == 0);
    CHECK(std::string(e.what()).find("unknown function") != std::string::npos);
  }
  CHECK_THROWS_AS(parse("(x"), ParseError);
  CHECK_THROWS_AS(parse("x y"), ParseError);
  CHECK_THROWS_AS(parse("pow(x)"), ParseError);
}

TEST_CASE("print then parse reproduces the tree") {
  std::mt19937 rng(20240517);
  for (int i = 0; i < 200; ++i) {
    const Expr e = random_tree(rng, 5);
    const Expr back = parse(e.str());
    CHECK(back.same_structure(e));
  }
}

TEST_CASE("eval: examples and domain errors") {
  CHECK(parse("x^2").eval_x(3.0) == 9.0);
  CHECK_THROWS_AS(parse("ln(x)").eval_x(0.0), EvalError);
  CHECK_THROWS_AS(parse("1/x").eval_x(0.0), EvalError);
  CHECK_THROWS_AS(parse("x + t").eval_x(1.0), EvalError);  // t unbound

  const Expr sigma = 1 + 0.1 * Expr::sin(xv());
  const Expr sigma2 = sigma * sigma;
  CHECK(sigma2.eval_x(M_PI / 2) == doctest::Approx(1.21).epsilon(1e-12));
}

TEST_CASE("diff: fixed examples") {
  const Expr dln = Expr::ln(xv()).diff(Var::X);
  CHECK(dln.eval_x(2.5) == doctest::Approx(0.4).epsilon(1e-14));

  const double eps = 0.7, omega = 1.9;
  const Expr e = 1 + eps * Expr::sin(omega * xv());
  const Expr expected = Expr::constant(eps * omega) * Expr::cos(omega * xv());
  const Expr got = e.diff(Var::X);
  for (double x : {-1.0, 0.3, 0.9, 2.0})
    CHECK(got.eval_x(x) == doctest::Approx(expected.eval_x(x)).epsilon(1e-13));
}

TEST_CASE("diff matches central differences on random trees") {
  std::mt19937 rng(77);
  const double x = 0.7, h = 1e-5;
  int tested = 0, attempts = 0;
  while (tested < 100 && attempts < 400) {
    ++attempts;
    const Expr e = random_tree(rng, 6);
    double fd1 = 0, fd2 = 0, sym = 0;
    try {
      fd1 = fd_derivative(e, x, h);
      fd2 = fd_derivative(e, x, h / 2);
      sym = e.diff(Var::X).eval_x(x);
    } catch (const Error&) {
      continue;  // singular draw; the property applies away from singularities
    }
    if (!std::isfinite(fd1) || !std::isfinite(fd2)) continue;
    if (std::fabs(fd1 - fd2) > 1e-7 * (1.0 + std::fabs(fd2))) continue;  // FD unconverged
    ++tested;
    CHECK(std::fabs(sym - fd1) <= 1e-6 * (1.0 + std::fabs(fd1)));
  }
  CHECK(tested == 100);
}

TEST_CASE("subst: stock price to log price") {
  const Expr s = Expr::variable(Var::S);
  const Expr e = (s * s).subst(Var::S, Expr::exp(xv()));
  CHECK(e.eval_x(0.5) == doctest::Approx(std::exp(1.0)).epsilon(1e-14));
  CHECK_FALSE(e.depends_on(Var::S));
}

TEST_CASE("antiderivative: anchored exactly, simple integrands") {
  const Expr u = antiderivative(Expr::constant(1), Var::X, 0.0, 1e-10);
  CHECK(u.eval_x(0.0) == 0.0);
  CHECK(u.eval_x(3.25) == doctest::Approx(3.25).epsilon(1e-12));
  CHECK(u.eval_x(-1.5) == doctest::Approx(-1.5).epsilon(1e-12));

  const Expr v = antiderivative(1 / xv(), Var::X, 1.0, 1e-11);
  for (double x : {0.4, 0.9, 1.0, 2.0, 3.7})
    CHECK(v.eval_x(x) == doctest::Approx(std::log(x)).epsilon(1e-10));
}

TEST_CASE("antiderivative: perturbed-exponential closed form") {
  const double eps = 0.3, x0 = 1.5;
  const Expr integrand = 1 / (1 + eps * Expr::exp(xv() - x0));
  const Expr u = antiderivative(integrand, Var::X, x0, 1e-11);
  auto closed = [&](double x) {
    return (x - x0) - std::log(1 + eps * std::exp(x - x0)) + std::log(1 + eps);
  };
  for (double x : {0.0, 0.8, 1.5, 2.2, 3.0})
    CHECK(u.eval_x(x) == doctest::Approx(closed(x)).epsilon(1e-10));

  // monotone where the integrand is positive
  double prev = u.eval_x(-1.0);
  for (double x = -0.5; x <= 3.0; x += 0.5) {
    const double cur = u.eval_x(x);
    CHECK(cur > prev);
    prev = cur;
  }
}

TEST_CASE("antiderivative of a derivative restores the function") {
  std::mt19937 rng(1234);
  for (int i = 0; i < 20; ++i) {
    const Expr f = random_tree(rng, 4);
    Expr df;
    double base;
    try {
      df = f.diff(Var::X);
      base = f.eval_x(0.2);
      // probe smoothness on the window first
      for (double x = -0.4; x <= 1.4; x += 0.12) (void)df.eval_x(x);
    } catch (const Error&) {
      continue;
    }
    const Expr u = antiderivative(df, Var::X, 0.2, 1e-11);
    for (double x : {-0.3, 0.5, 1.3}) {
      const double want = f.eval_x(x) - base;
      CHECK(u.eval_x(x) == doctest::Approx(want).epsilon(5e-9));
    }
  }
}

TEST_CASE("diff of an antiderivative returns the integrand") {
  const Expr integrand = Expr::exp(Expr::sin(xv()));
  const Expr u = antiderivative(integrand, Var::X, 0.0, 1e-10);
  CHECK(u.diff(Var::X).same_structure(integrand));
  CHECK((u.diff(Var::T).is_constant()));
}

TEST_CASE("quadrature error paths") {
  CHECK_THROWS_AS(integrate_adaptive([](double x) { return 1.0 / x; }, -1.0, 1.0, 1e-12),
                  QuadratureError);
  CHECK_THROWS_AS(antiderivative(1 / xv(), Var::X, -1.0, 1e-10).eval_x(1.0),
                  Error);
}

TEST_CASE("concurrent evaluation of a shared antiderivative") {
  const Expr u = antiderivative(1 / (1 + xv() * xv()), Var::X, 0.0, 1e-11);
  std::vector<std::thread> workers;
  std::vector<double> results(8);
  for (int k = 0; k < 8; ++k) {
    workers.emplace_back([&u, &results, k] {
      double acc = 0;
      for (int i = 0; i <= 50; ++i) acc = u.eval_x(-2.0 + 4.0 * i / 50);
      results[static_cast<std::size_t>(k)] = acc;
    });
  }
  for (auto& w : workers) w.join();
  for (double r : results)
    CHECK(r == doctest::Approx(std::atan(2.0)).epsilon(1e-10));
}
