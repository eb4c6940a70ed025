#include <doctest.h>

#include <cmath>

#include "ofsym/timedep.hpp"

using namespace ofsym;

namespace {

Expr tv() { return Expr::variable(Var::T); }

TimeDepModel model_const(double p, double q) {
  TimeDepModel m;
  m.p = Expr::constant(p);
  m.q = Expr::constant(q);
  return m;
}

std::function<State6(double)> state_of(const TimeDepSymmetry& sym) {
  return [&sym](double t) { return sym.state(t); };
}

}  // namespace

TEST_CASE("determining residuals: zero state") {
  const TimeDepModel m = model_const(0.3, 1.2);
  auto zero = [](double) { return State6::Zero(); };
  const Eigen::Vector3d r = determining_residuals(m, zero, 1.0);
  CHECK(r.cwiseAbs().maxCoeff() <= 1e-14);
}

TEST_CASE("determining residuals: pure exponential scaling profile") {
  const double q = 1.0;
  const TimeDepModel m = model_const(0.0, q);
  auto state = [q](double t) {
    State6 y = State6::Zero();
    y[0] = std::exp(2 * q * t);
    y[1] = 2 * q * y[0];
    y[2] = 4 * q * q * y[0];
    return y;
  };
  const Eigen::Vector3d r = determining_residuals(m, state, 0.8);
  CHECK(std::fabs(r[2]) <= 1e-8);  // third-order equation closes exactly
}

TEST_CASE("determining residuals: random smooth non-solution is rejected") {
  const TimeDepModel m = model_const(0.2, 0.9);
  auto state = [](double t) {
    State6 y;
    y << std::sin(t), std::cos(t), t, std::exp(0.3 * t), 1.0, t * t;
    return y;
  };
  const Eigen::Vector3d r = determining_residuals(m, state, 1.0);
  CHECK(r.cwiseAbs().maxCoeff() > 1e-3);
}

TEST_CASE("solve_determining: trivial translation for p = q = 0") {
  State6 init = State6::Zero();
  init[0] = 1.0;
  const TimeDepSymmetry sym = solve_determining(model_const(0, 0), 0.0, 2.0, init);
  for (double t : {0.0, 0.9, 2.0}) {
    const State6 y = sym.state(t);
    CHECK(y[0] == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(std::fabs(y[3]) <= 1e-12);
    CHECK(std::fabs(y[5]) <= 1e-12);
  }
  CHECK(sym.max_r1 <= 1e-8);
  CHECK(sym.max_r2 <= 1e-8);
  CHECK(sym.max_r3 <= 1e-8);
}

TEST_CASE("solve_determining: hyperbolic profile for constant q") {
  State6 init = State6::Zero();
  init[1] = 1.0;
  const TimeDepSymmetry sym = solve_determining(model_const(0, 1), 0.0, 2.0, init);
  for (double t : {0.3, 1.0, 1.7}) {
    CHECK(sym.state(t)[0] ==
          doctest::Approx(std::sinh(2 * t) / 2).epsilon(1e-8));
  }
}

TEST_CASE("solve_determining: residuals stay within budget for varying q") {
  TimeDepModel m;
  m.p = 0.2 * Expr::sin(tv());
  m.q = 1 + 0.1 * tv();
  for (int k = 0; k < 6; ++k) {
    State6 init = State6::Zero();
    init[k] = 1.0;
    const TimeDepSymmetry sym = solve_determining(m, 0.0, 2.0, init);
    const double bound = 1e-8 * (1 + sym.state_scale);
    CHECK(sym.max_r1 <= bound);
    CHECK(sym.max_r2 <= bound);
    CHECK(sym.max_r3 <= bound);
  }
}

TEST_CASE("symmetry basis: heat limit spans polynomial time profiles") {
  const auto basis = symmetry_basis(model_const(0, 0), 0.0, 2.0);
  REQUIRE(basis.size() == 6);
  // initial-condition matrix is the identity by construction
  for (int k = 0; k < 6; ++k)
    for (int j = 0; j < 6; ++j)
      CHECK(basis[k].init[j] == (j == k ? 1.0 : 0.0));

  // tau components of the first three elements: 1, t, t^2/2
  for (double t : {0.4, 1.1, 2.0}) {
    CHECK(basis[0].state(t)[0] == doctest::Approx(1.0).epsilon(1e-10));
    CHECK(basis[1].state(t)[0] == doctest::Approx(t).epsilon(1e-10));
    CHECK(basis[2].state(t)[0] == doctest::Approx(t * t / 2).epsilon(1e-8));
  }
}

TEST_CASE("symmetry basis: constant-q time profiles match the exponential span") {
  const double q = 1.0;
  const auto basis = symmetry_basis(model_const(0.5, q), 0.0, 2.0);
  REQUIRE(basis.size() == 6);
  auto project_err = [&](const TimeDepSymmetry& sym) {
    // least-squares projection of tau(t) on {1, e^{2qt}, e^{-2qt}}
    const int n = 41;
    Eigen::MatrixXd A(n, 3);
    Eigen::VectorXd b(n);
    for (int i = 0; i < n; ++i) {
      const double t = 2.0 * i / (n - 1);
      A(i, 0) = 1.0;
      A(i, 1) = std::exp(2 * q * t);
      A(i, 2) = std::exp(-2 * q * t);
      b[i] = sym.state(t)[0];
    }
    const Eigen::VectorXd coef = A.colPivHouseholderQr().solve(b);
    return (A * coef - b).cwiseAbs().maxCoeff();
  };
  for (const auto& sym : basis) CHECK(project_err(sym) <= 1e-6);
}

TEST_CASE("symmetry basis: linearly varying q keeps dimension six") {
  TimeDepModel m;
  m.p = Expr::constant(0);
  m.q = 1 + 0.1 * tv();
  const auto basis = symmetry_basis(m, 0.0, 2.0);
  REQUIRE(basis.size() == 6);
  for (const auto& sym : basis) {
    const double bound = 1e-8 * (1 + sym.state_scale);
    CHECK(sym.max_r1 <= bound);
    CHECK(sym.max_r2 <= bound);
    CHECK(sym.max_r3 <= bound);
  }
}

TEST_CASE("constant-coefficient embedding reproduces the exponential translation") {
  const double kappa = 1.3, mu = 0.3, lambda = 0.1;
  TimeDepModel m = model_const(kappa * (mu - lambda), kappa);
  State6 init = State6::Zero();
  init[3] = 1.0;
  init[4] = kappa;
  const TimeDepSymmetry sym = solve_determining(m, 0.0, 2.0, init);
  for (double t : {0.0, 0.8, 2.0}) {
    const State6 y = sym.state(t);
    CHECK(y[3] == doctest::Approx(std::exp(kappa * t)).epsilon(1e-8));
    CHECK(std::fabs(y[0]) <= 1e-10);   // no d/dt part
    CHECK(std::fabs(y[5]) <= 1e-8);    // no homogeneity part
  }
  // the coefficient field is e^{kappa t} d/dx
  const FlowField f = sym.flow_field(m);
  CHECK(f.xi_x(1.0, 0.7) == doctest::Approx(std::exp(kappa)).epsilon(1e-8));
  CHECK(std::fabs(f.a(1.0, 0.7)) <= 1e-8);
}

TEST_CASE("log-affine solutions solve the time-dependent equation") {
  TimeDepModel m;
  m.p = Expr::constant(0.3);
  m.q = 1 + 0.1 * tv();
  const LnSolution lnF = log_affine_solution(m, 0.8, 0.0, 2.0);
  const GridSpec grid{-2, 2, 101, 0, 2, 101};
  CHECK(timedep_residual(m, lnF, grid).max_abs <= 1e-8);
}

TEST_CASE("basis fields transport an exact solution to solutions") {
  // independent validation of the determining system for time-varying q:
  // push a log-affine solution along each basis field and re-check the PDE
  TimeDepModel m;
  m.p = Expr::constant(0.3);
  m.q = 1 + 0.1 * tv();
  const LnSolution lnF = log_affine_solution(m, 0.8, -0.5, 2.5);
  const GridSpec grid{-2, 2, 81, 0.3, 1.7, 81};
  const double base = timedep_residual(m, lnF, grid).max_abs;

  const auto basis = symmetry_basis(m, -0.5, 2.5);
  const Expr p = m.p, q = m.q;
  auto beff = [p, q](double t, double x) {
    const Bindings b{std::nullopt, t, std::nullopt};
    return (p.eval(b) - 0.5) - x * q.eval(b);
  };
  for (int k : {0, 1, 3, 5}) {
    const FlowField field = basis[static_cast<std::size_t>(k)].flow_field(m);
    LnSolution transported = [&, field](double t, double x) {
      Eigen::VectorXd y0(3);
      y0 << t, x, 0.0;
      auto rhs = [&field](double, const Eigen::VectorXd& y) {
        Eigen::VectorXd d(3);
        d[0] = -field.xi_t(y[0]);
        d[1] = -field.xi_x(y[0], y[1]);
        d[2] = field.a(y[0], y[1]);
        return d;
      };
      OdeOptions opt;
      opt.abs_tol = 1e-12;
      opt.rel_tol = 1e-12;
      const Eigen::VectorXd yf =
          integrate_ode(rhs, 0.0, 0.05, y0, opt).states().back();
      return lnF(yf[0], yf[1]) + yf[2];
    };
    const double moved = residual_coeffs([](double) { return 0.5; }, beff,
                                         transported, grid)
                             .max_abs;
    CAPTURE(k);
    CHECK(moved <= std::max(10 * base, 1e-6));
  }

  // negative control: a constant shift is not a symmetry when q varies
  const FlowField not_symmetry{[](double) { return 0.0; },
                               [](double, double) { return 1.0; },
                               [](double, double) { return 0.0; }};
  LnSolution shifted = [&](double t, double x) { return lnF(t, x - 0.05); };
  const double bad = residual_coeffs([](double) { return 0.5; }, beff, shifted, grid)
                         .max_abs;
  CHECK(bad > 1e-3);
  (void)not_symmetry;
}

TEST_CASE("integrator failure surfaces as an error") {
  TimeDepModel m;
  m.p = 1 / (1 - tv());  // pole inside the span
  m.q = Expr::constant(1);
  State6 init = State6::Zero();
  init[3] = 1.0;
  CHECK_THROWS(solve_determining(m, 0.0, 2.0, init));
}
