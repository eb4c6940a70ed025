#pragma once

#include "ofsym/ode.hpp"
#include "ofsym/pdesolve.hpp"

namespace ofsym {

// Time-dependent model in normalized form: F_t = 1/2 F_xx + (p(t) - 1/2
// - x q(t)) F_x, with the volatility scaled to one.
struct TimeDepModel {
  Expr p = Expr::constant(0);  // q (mu - lambda)
  Expr q = Expr::constant(0);  // mean-reversion rate

  double p_at(double t) const { return p.eval(Bindings{std::nullopt, t, std::nullopt}); }
  double q_at(double t) const { return q.eval(Bindings{std::nullopt, t, std::nullopt}); }
};

using State6 = Eigen::Matrix<double, 6, 1>;  // (tau, tau', tau'', b, b', f)

// One symmetry trajectory. The vector field it induces is
//   tau d/dt + (b + tau' x / 2) d/dx + (f + A x + B x^2 / 2) F d/dF
// with A = b q - b' - (tau'/2)(p - 1/2) and B = q tau' - tau''/2.
struct TimeDepSymmetry {
  OdeSolution trajectory;
  State6 init = State6::Zero();
  double max_r1 = 0, max_r2 = 0, max_r3 = 0;
  double state_scale = 0;  // max |state| over the verified samples

  State6 state(double t) const { return trajectory.at(t); }
  FlowField flow_field(const TimeDepModel& model) const;
};

// Residuals of the three determining equations at time t, for a state
// supplied as a function of t. The highest derivative of each cascade
// (tau''', b'', f') is estimated by central differences of the supplied
// state, so the check stays independent of the integrator.
Eigen::Vector3d determining_residuals(const TimeDepModel& model,
                                      const std::function<State6(double)>& state,
                                      double t, double fd_h = 5e-3);

TimeDepSymmetry solve_determining(const TimeDepModel& model, double t0, double t1,
                                  const State6& init);

// Integrates the six canonical unit initial vectors; the basis dimension is
// certified by the identity initial-condition matrix together with successful
// integration.
std::vector<TimeDepSymmetry> symmetry_basis(const TimeDepModel& model, double t0,
                                            double t1);

// Exact log-affine solution family of the time-dependent equation,
// ln F = alpha(t) x + gamma(t); used as an independent oracle.
LnSolution log_affine_solution(const TimeDepModel& model, double alpha0, double t0,
                               double t1);

// Residual of a candidate ln F under the time-dependent equation.
ResidualReport timedep_residual(const TimeDepModel& model, const LnSolution& lnF,
                                const GridSpec& grid);

}  // namespace ofsym
