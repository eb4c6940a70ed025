#include "ofsym/timedep.hpp"

#include <cmath>

namespace ofsym {

namespace {

struct Coeffs {
  double p, q, dp, dq;
};

Coeffs coeffs_at(const TimeDepModel& model, const Expr& dp, const Expr& dq, double t) {
  const Bindings b{std::nullopt, t, std::nullopt};
  return {model.p.eval(b), model.q.eval(b), dp.eval(b), dq.eval(b)};
}

// cascaded right-hand sides implied by the determining equations
double tau_ppp(const Coeffs& c, const State6& y) {
  return (4 * c.q * c.q + 2 * c.dq) * y[1];
}

double b_pp(const Coeffs& c, const State6& y) {
  return -0.5 * c.dp * y[1] - 1.5 * (c.p - 0.5) * c.q * y[1] +
         y[3] * (c.dq + c.q * c.q);
}

double f_p(const Coeffs& c, const State6& y) {
  return 0.5 * (c.q * y[1] - 0.5 * y[2]) +
         (c.p - 0.5) * (y[3] * c.q - y[4] - 0.5 * y[1] * (c.p - 0.5));
}

}  // namespace

FlowField TimeDepSymmetry::flow_field(const TimeDepModel& model) const {
  const OdeSolution traj = trajectory;
  const Expr p = model.p, q = model.q;
  auto state_at = [traj](double t) { return State6(traj.at(t)); };
  return FlowField{
      [state_at](double t) { return state_at(t)[0]; },
      [state_at](double t, double x) {
        const State6 y = state_at(t);
        return y[3] + 0.5 * y[1] * x;
      },
      [state_at, p, q](double t, double x) {
        const State6 y = state_at(t);
        const Bindings b{std::nullopt, t, std::nullopt};
        const double pv = p.eval(b), qv = q.eval(b);
        const double A = y[3] * qv - y[4] - 0.5 * y[1] * (pv - 0.5);
        const double B = qv * y[1] - 0.5 * y[2];
        return y[5] + A * x + 0.5 * B * x * x;
      }};
}

Eigen::Vector3d determining_residuals(const TimeDepModel& model,
                                      const std::function<State6(double)>& state,
                                      double t, double fd_h) {
  const Expr dp = model.p.diff(Var::T);
  const Expr dq = model.q.diff(Var::T);
  const Coeffs c = coeffs_at(model, dp, dq, t);
  const State6 y = state(t);

  // 4th-order central estimates of tau''', b'', f'
  auto fd = [&](int component) {
    const double h = fd_h;
    const double m2 = state(t - 2 * h)[component];
    const double m1 = state(t - h)[component];
    const double p1 = state(t + h)[component];
    const double p2 = state(t + 2 * h)[component];
    return (-p2 + 8 * p1 - 8 * m1 + m2) / (12 * h);
  };

  Eigen::Vector3d r;
  r[0] = fd(5) - f_p(c, y);       // f' equation
  r[1] = fd(4) - b_pp(c, y);      // b'' equation
  r[2] = fd(2) - tau_ppp(c, y);   // tau''' equation
  return r;
}

TimeDepSymmetry solve_determining(const TimeDepModel& model, double t0, double t1,
                                  const State6& init) {
  const Expr dp = model.p.diff(Var::T);
  const Expr dq = model.q.diff(Var::T);
  auto rhs = [&model, &dp, &dq](double t, const Eigen::VectorXd& yv) {
    const Coeffs c = coeffs_at(model, dp, dq, t);
    State6 y = yv;
    Eigen::VectorXd d(6);
    d[0] = y[1];
    d[1] = y[2];
    d[2] = tau_ppp(c, y);
    d[3] = y[4];
    d[4] = b_pp(c, y);
    d[5] = f_p(c, y);
    return d;
  };

  OdeOptions opt;
  opt.abs_tol = 1e-10;
  opt.rel_tol = 1e-10;
  opt.h_max = 2e-3;  // keeps the dense-output interpolation below the residual budget

  TimeDepSymmetry sym;
  sym.init = init;
  sym.trajectory = integrate_ode(rhs, t0, t1, init, opt);

  // post-hoc verification against the determining equations, with the
  // highest derivatives re-estimated from the stored trajectory
  auto state_fn = [&sym](double t) { return State6(sym.trajectory.at(t)); };
  const double fd_h = 5e-3;
  const double lo = std::min(t0, t1) + 2.5 * fd_h;
  const double hi = std::max(t0, t1) - 2.5 * fd_h;
  const int samples = 101;
  for (int i = 0; i < samples; ++i) {
    const double t = lo + (hi - lo) * i / (samples - 1);
    const Eigen::Vector3d r = determining_residuals(model, state_fn, t, fd_h);
    sym.max_r1 = std::max(sym.max_r1, std::fabs(r[0]));
    sym.max_r2 = std::max(sym.max_r2, std::fabs(r[1]));
    sym.max_r3 = std::max(sym.max_r3, std::fabs(r[2]));
    sym.state_scale = std::max(sym.state_scale, state_fn(t).cwiseAbs().maxCoeff());
  }
  return sym;
}

std::vector<TimeDepSymmetry> symmetry_basis(const TimeDepModel& model, double t0,
                                            double t1) {
  std::vector<TimeDepSymmetry> basis;
  basis.reserve(6);
  for (int k = 0; k < 6; ++k) {
    State6 init = State6::Zero();
    init[k] = 1.0;
    basis.push_back(solve_determining(model, t0, t1, init));
  }
  return basis;
}

LnSolution log_affine_solution(const TimeDepModel& model, double alpha0, double t0,
                               double t1) {
  auto rhs = [&model](double t, const Eigen::VectorXd& y) {
    const Bindings b{std::nullopt, t, std::nullopt};
    const double p = model.p.eval(b), q = model.q.eval(b);
    Eigen::VectorXd d(2);
    d[0] = -q * y[0];
    d[1] = 0.5 * y[0] * y[0] + (p - 0.5) * y[0];
    return d;
  };
  Eigen::VectorXd y0(2);
  y0 << alpha0, 0.0;
  OdeOptions opt;
  opt.abs_tol = 1e-12;
  opt.rel_tol = 1e-12;
  opt.h_max = 1e-3;
  // extend a little so residual stencils near the ends stay inside
  const double pad = 0.1 * (t1 - t0) + 0.2;
  auto traj = std::make_shared<OdeSolution>(
      integrate_ode(rhs, t0 - pad, t1 + pad, y0, opt));
  return [traj](double t, double x) {
    const Eigen::VectorXd y = traj->at(t);
    return y[0] * x + y[1];
  };
}

ResidualReport timedep_residual(const TimeDepModel& model, const LnSolution& lnF,
                                const GridSpec& grid) {
  const Expr p = model.p, q = model.q;
  return residual_coeffs(
      [](double) { return 0.5; },
      [p, q](double t, double x) {
        const Bindings b{std::nullopt, t, std::nullopt};
        return (p.eval(b) - 0.5) - x * q.eval(b);
      },
      lnF, grid);
}

}  // namespace ofsym
