#include <doctest.h>

#include <cmath>

#include "ofsym/pdesolve.hpp"
#include "ofsym/solutions.hpp"

using namespace ofsym;

namespace {

Expr xv() { return Expr::variable(Var::X); }

ModelSpec heat_model() {
  ModelSpec m;
  m.sigma = Expr::constant(std::sqrt(2.0));  // diffusion coefficient one
  m.drift_contra = Expr::constant(0);
  return m;
}

ModelSpec schwartz_model() {
  return ModelSpec::constant_coefficients(2.0, 0.3, 0.1, 0.2);
}

// max relative error between an FD solution and a reference at the final
// time, away from the boundary cells
double final_time_error(const GridSolution& sol, const LnSolution& ref, int skip) {
  const Eigen::ArrayXd xs = sol.grid.x_points();
  const int last = sol.grid.n_t - 1;
  const double t = sol.grid.t_max;
  double err = 0;
  for (int i = skip; i < sol.grid.n_x - skip; ++i) {
    const double got = sol.lnF(last, i);
    const double want = ref(t, xs[i]);
    err = std::max(err, std::fabs(std::exp(got) - std::exp(want)) /
                            std::max(1e-12, std::fabs(std::exp(want))));
  }
  return err;
}

}  // namespace

TEST_CASE("residual: exponential solution of the heat form") {
  const GridSpec grid{-1, 1, 101, 0, 1, 101};
  const ResidualReport rep =
      residual(heat_model(), [](double t, double x) { return x + t; }, grid);
  CHECK(rep.max_abs <= 1e-9);
  CHECK(rep.l2_mean <= rep.max_abs);
  CHECK(rep.l2_mean >= 0.0);
}

TEST_CASE("residual: mean-reverting closed form passes, perturbation fails") {
  const ClosedFormSolution sol = schwartz_solution(2.0, 0.1, 0.3, 0.2);
  const GridSpec grid{std::log(0.5), std::log(2.0), 401, 0, 2, 401};
  const ResidualReport ok = residual(schwartz_model(), sol.callable(), grid);
  CHECK(ok.max_abs <= 1e-8);

  const LnSolution bad = [&sol](double t, double x) {
    return sol.lnF.eval_tx(t, x) + 0.01 * x * x;
  };
  const ResidualReport broken = residual(schwartz_model(), bad, grid);
  CHECK(broken.max_abs > 1e-3);
}

TEST_CASE("residual: non-finite solutions are rejected") {
  const GridSpec grid{-1, 1, 17, 0, 1, 17};
  CHECK_THROWS_AS(
      residual(heat_model(), [](double, double) { return std::nan(""); }, grid),
      SolveError);
}

TEST_CASE("solve_fd: Gaussian spreading under the heat form") {
  // domain wide enough that the extrapolation closure sees decayed tails
  const double s0 = 2.0;
  const Expr g = Expr::exp(-(xv() * xv()) / (2 * s0));
  const GridSpec grid{-8, 8, 401, 0, 0.5, 401};
  const GridSolution sol = solve_fd(heat_model(), g, grid, 0.5);

  auto exact = [s0](double t, double x) {
    const double s = s0 + 2 * t;
    return -x * x / (2 * s) + 0.5 * std::log(s0 / s);
  };
  const Eigen::ArrayXd xs = grid.x_points();
  double err = 0;
  for (int i = 0; i < grid.n_x; ++i) {
    if (std::fabs(xs[i]) > 2.5) continue;
    const double got = std::exp(sol.lnF(grid.n_t - 1, i));
    const double want = std::exp(exact(0.5, xs[i]));
    err = std::max(err, std::fabs(got - want) / want);
  }
  CHECK(err <= 1e-4);
}

TEST_CASE("solve_fd: matches the constant-parameter closed form at t = 1") {
  const ClosedFormSolution ref = schwartz_solution(2.0, 0.1, 0.3, 0.2);
  const GridSpec grid{std::log(0.5), std::log(2.0), 401, 0, 1, 401};
  const GridSolution sol = solve_fd(schwartz_model(), Expr::exp(xv()), grid, 0.5);
  CHECK(final_time_error(sol, ref.callable(), 5) <= 1e-4);
}

TEST_CASE("solve_fd: second-order convergence under refinement") {
  const ClosedFormSolution ref = schwartz_solution(2.0, 0.1, 0.3, 0.2);
  std::vector<double> errs;
  for (int n : {51, 101, 201}) {
    const GridSpec grid{std::log(0.5), std::log(2.0), n, 0, 1, n};
    const GridSolution sol = solve_fd(schwartz_model(), Expr::exp(xv()), grid, 0.5);
    errs.push_back(final_time_error(sol, ref.callable(), 5));
  }
  const double order1 = std::log2(errs[0] / errs[1]);
  const double order2 = std::log2(errs[1] / errs[2]);
  CHECK(order1 >= 1.9);
  CHECK(order2 >= 1.9);
}

TEST_CASE("solve_fd: heat benchmark converges at order two as well") {
  const double s0 = 2.0;
  const Expr g = Expr::exp(-(xv() * xv()) / (2 * s0));
  auto exact = [s0](double t, double x) {
    const double s = s0 + 2 * t;
    return -x * x / (2 * s) + 0.5 * std::log(s0 / s);
  };
  std::vector<double> errs;
  for (int n : {101, 201, 401}) {
    const GridSpec grid{-8, 8, n, 0, 0.5, n};
    const GridSolution sol = solve_fd(heat_model(), g, grid, 0.5);
    const Eigen::ArrayXd xs = grid.x_points();
    double err = 0;
    for (int i = 0; i < grid.n_x; ++i) {
      if (std::fabs(xs[i]) > 2.5) continue;
      const double got = std::exp(sol.lnF(grid.n_t - 1, i));
      const double want = std::exp(exact(0.5, xs[i]));
      err = std::max(err, std::fabs(got - want) / want);
    }
    errs.push_back(err);
  }
  CHECK(std::log2(errs[0] / errs[1]) >= 1.9);
  CHECK(std::log2(errs[1] / errs[2]) >= 1.9);
}

TEST_CASE("solve_fd: input validation") {
  const GridSpec grid{-1, 1, 33, 0, 1, 9};
  CHECK_THROWS_AS(solve_fd(heat_model(), xv(), grid, 0.5), SolveError);  // g <= 0
  CHECK_THROWS_AS(solve_fd(heat_model(), Expr::exp(xv()), grid, 1.5), Error);
}

TEST_CASE("flow transport: time translation is a fixed point") {
  const ClosedFormSolution sol = schwartz_solution(2.0, 0.1, 0.3, 0.2);
  const GridSpec grid{std::log(0.5), std::log(2.0), 101, 0.2, 1.8, 101};
  const FlowField time_shift{[](double) { return 1.0; },
                             [](double, double) { return 0.0; },
                             [](double, double) { return 0.0; }};
  const ResidualReport base = residual(schwartz_model(), sol.callable(), grid);
  const ResidualReport moved =
      flow_transport_check(schwartz_model(), time_shift, sol.callable(), 0.1, grid);
  CHECK(moved.max_abs <= 10 * base.max_abs + 1e-12);
}

TEST_CASE("flow transport: symmetry accepted, non-symmetry rejected") {
  // sigma = 1, drift x (m = 1, c = 0); invariant solution along e^t d/dx
  ModelSpec model;
  model.sigma = Expr::constant(1);
  model.drift_contra = xv();
  const Metric1D metric = Metric1D::from_sigma(model.sigma);
  const ClosedFormSolution sol = invariant_solution(metric, 1.0, 0.0, 0.0);
  const GridSpec grid{-1, 1, 101, 0, 2, 101};

  const FlowField z1{[](double) { return 0.0; },
                     [](double t, double) { return std::exp(t); },
                     [](double, double) { return 0.0; }};
  const ResidualReport good =
      flow_transport_check(model, z1, sol.callable(), 0.1, grid);
  CHECK(good.max_abs <= 1e-6);

  const FlowField bad{[](double) { return 0.0; },
                      [](double, double x) { return x * x; },
                      [](double, double) { return 0.0; }};
  const ResidualReport rejected =
      flow_transport_check(model, bad, sol.callable(), 0.1, grid);
  CHECK(rejected.max_abs > 1e-3);
}

TEST_CASE("flow transport: leaving the domain is an error") {
  const GridSpec grid{-1, 1, 33, 0, 1, 33};
  const FlowField runaway{[](double) { return 0.0; },
                          [](double, double) { return 100.0; },
                          [](double, double) { return 0.0; }};
  CHECK_THROWS_AS(flow_transport_check(heat_model(), runaway,
                                       [](double t, double x) { return x + t; }, 0.1,
                                       grid),
                  FlowDomainError);
}

TEST_CASE("grid solution interpolant guards its domain") {
  const GridSpec grid{-1, 1, 33, 0, 0.5, 33};
  const GridSolution sol = solve_fd(heat_model(), Expr::exp(xv()), grid, 0.5);
  const LnSolution f = sol.interpolant();
  CHECK(std::isfinite(f(0.25, 0.0)));
  CHECK_THROWS_AS(f(0.25, 2.0), FlowDomainError);
}
