#include "ofsym/pdesolve.hpp"

#include <cmath>
#include <limits>

#include "ofsym/ode.hpp"

namespace ofsym {

namespace {

// 4th-order central first/second derivative stencils on a uniform grid.
inline double d1(const Eigen::MatrixXd& g, int j, int i, double h, bool along_t) {
  auto v = [&](int k) { return along_t ? g(j + k, i) : g(j, i + k); };
  return (-v(2) + 8 * v(1) - 8 * v(-1) + v(-2)) / (12 * h);
}

inline double d2(const Eigen::MatrixXd& g, int j, int i, double h, bool along_t) {
  auto v = [&](int k) { return along_t ? g(j + k, i) : g(j, i + k); };
  return (-v(2) + 16 * v(1) - 30 * v(0) + 16 * v(-1) - v(-2)) / (12 * h * h);
}

// |F R| / max(1, |F Gt|) computed through logs so growing solutions neither
// overflow nor mask defects.
inline double relative_residual(double G, double R, double Gt) {
  if (R == 0.0) return 0.0;
  const double num_log = G + std::log(std::fabs(R));
  const double den_log = std::max(0.0, Gt == 0.0 ? -1e300 : G + std::log(std::fabs(Gt)));
  const double r = num_log - den_log;
  if (r > 700.0) return std::numeric_limits<double>::max();
  return std::exp(r);
}

}  // namespace

ResidualReport residual_coeffs(const std::function<double(double)>& half_sigma2,
                               const std::function<double(double, double)>& b_eff,
                               const LnSolution& lnF, const GridSpec& grid) {
  const int nt = grid.n_t, nx = grid.n_x;
  if (nt < 5 || nx < 5) throw Error("residual grid needs at least 5 points per axis");
  const Eigen::ArrayXd ts = grid.t_points();
  const Eigen::ArrayXd xs = grid.x_points();
  Eigen::MatrixXd G(nt, nx);
  for (int j = 0; j < nt; ++j)
    for (int i = 0; i < nx; ++i) {
      G(j, i) = lnF(ts[j], xs[i]);
      if (!std::isfinite(G(j, i)))
        throw SolveError("solution not finite at (t, x) = (" + format_double(ts[j]) +
                         ", " + format_double(xs[i]) + ")");
    }

  Eigen::ArrayXd hs2(nx);
  for (int i = 0; i < nx; ++i) hs2[i] = half_sigma2(xs[i]);

  ResidualReport rep;
  double sum_sq = 0.0;
  for (int j = 2; j < nt - 2; ++j) {
    for (int i = 2; i < nx - 2; ++i) {
      const double Gx = d1(G, j, i, grid.dx(), false);
      const double Gxx = d2(G, j, i, grid.dx(), false);
      const double Gt = d1(G, j, i, grid.dt(), true);
      const double R = hs2[i] * (Gxx + Gx * Gx) + b_eff(ts[j], xs[i]) * Gx - Gt;
      const double r = relative_residual(G(j, i), R, Gt);
      sum_sq += r * r;
      ++rep.interior_points;
      if (r > rep.max_abs) {
        rep.max_abs = r;
        rep.t_at_max = ts[j];
        rep.x_at_max = xs[i];
      }
    }
  }
  rep.l2_mean = rep.interior_points ? std::sqrt(sum_sq / rep.interior_points) : 0.0;
  return rep;
}

ResidualReport residual(const ModelSpec& model_in_x, const LnSolution& lnF,
                        const GridSpec& grid) {
  const ModelSpec model = log_transform(model_in_x);
  const DriftField drift = drift_from_model(model);
  const Expr sigma = model.sigma;
  const Expr beff = drift.b_eff;
  return residual_coeffs(
      [sigma](double x) {
        const double s = sigma.eval_x(x);
        return 0.5 * s * s;
      },
      [beff](double, double x) { return beff.eval_x(x); }, lnF, grid);
}

LnSolution GridSolution::interpolant() const {
  const GridSpec g = grid;
  const Eigen::MatrixXd values = lnF;
  return [g, values](double t, double x) {
    if (t < g.t_min || t > g.t_max || x < g.x_min || x > g.x_max)
      throw FlowDomainError("interpolation point outside the grid");
    const double ft = (t - g.t_min) / g.dt();
    const double fx = (x - g.x_min) / g.dx();
    const int j = std::min(static_cast<int>(ft), g.n_t - 2);
    const int i = std::min(static_cast<int>(fx), g.n_x - 2);
    const double at = ft - j, ax = fx - i;
    return (1 - at) * ((1 - ax) * values(j, i) + ax * values(j, i + 1)) +
           at * ((1 - ax) * values(j + 1, i) + ax * values(j + 1, i + 1));
  };
}

namespace {

// Thomas algorithm; diag/upper/lower are the interior system bands.
Eigen::ArrayXd solve_tridiagonal(Eigen::ArrayXd lower, Eigen::ArrayXd diag,
                                 Eigen::ArrayXd upper, Eigen::ArrayXd rhs) {
  const Eigen::Index n = diag.size();
  for (Eigen::Index i = 1; i < n; ++i) {
    if (std::fabs(diag[i - 1]) < 1e-300)
      throw SolveError("tridiagonal solve breakdown");
    const double w = lower[i] / diag[i - 1];
    diag[i] -= w * upper[i - 1];
    rhs[i] -= w * rhs[i - 1];
  }
  if (std::fabs(diag[n - 1]) < 1e-300) throw SolveError("tridiagonal solve breakdown");
  Eigen::ArrayXd out(n);
  out[n - 1] = rhs[n - 1] / diag[n - 1];
  for (Eigen::Index i = n - 2; i >= 0; --i)
    out[i] = (rhs[i] - upper[i] * out[i + 1]) / diag[i];
  return out;
}

}  // namespace

GridSolution solve_fd(const ModelSpec& model_in_x, const Expr& g, const GridSpec& grid,
                      double theta) {
  if (theta < 0.0 || theta > 1.0) throw Error("theta must lie in [0, 1]");
  if (grid.n_x < 5 || grid.n_t < 2) throw Error("solver grid too small");
  const ModelSpec model = log_transform(model_in_x);
  const DriftField drift = drift_from_model(model);
  const Eigen::ArrayXd xs = grid.x_points();
  const double dx = grid.dx(), dt = grid.dt();
  const int nx = grid.n_x;

  Eigen::ArrayXd hs2(nx), be(nx);
  for (int i = 0; i < nx; ++i) {
    const double s = model.sigma.eval_x(xs[i]);
    hs2[i] = 0.5 * s * s;
    be[i] = drift.b_eff.eval_x(xs[i]);
  }
  // spatial operator bands at interior nodes
  Eigen::ArrayXd lo(nx), di(nx), up(nx);
  for (int i = 1; i < nx - 1; ++i) {
    lo[i] = hs2[i] / (dx * dx) - be[i] / (2 * dx);
    di[i] = -2 * hs2[i] / (dx * dx);
    up[i] = hs2[i] / (dx * dx) + be[i] / (2 * dx);
  }

  GridSolution sol;
  sol.grid = grid;
  sol.lnF.resize(grid.n_t, nx);

  Eigen::ArrayXd F(nx);
  for (int i = 0; i < nx; ++i) {
    F[i] = g.eval_x(xs[i]);
    if (!(F[i] > 0.0)) throw SolveError("initial condition not positive on the grid");
    sol.lnF(0, i) = std::log(F[i]);
  }

  const int m = nx - 2;  // interior unknowns
  Eigen::ArrayXd sys_lo(m), sys_di(m), sys_up(m), rhs(m);
  for (int n = 1; n < grid.n_t; ++n) {
    // explicit part (boundary values at time level n are known)
    Eigen::ArrayXd expl(m);
    for (int i = 1; i < nx - 1; ++i) {
      const double LF = lo[i] * F[i - 1] + di[i] * F[i] + up[i] * F[i + 1];
      expl[i - 1] = F[i] + (1 - theta) * dt * LF;
    }
    for (int i = 1; i < nx - 1; ++i) {
      sys_lo[i - 1] = -theta * dt * lo[i];
      sys_di[i - 1] = 1.0 - theta * dt * di[i];
      sys_up[i - 1] = -theta * dt * up[i];
    }

    // Boundary closure ln F0 = 2 ln F1 - ln F2 (and mirrored), nonlinear in
    // F. Newton-linearize around the current iterate and fold the closure
    // into the first/last rows; the system stays tridiagonal and the
    // iteration converges in a few steps at any grid resolution.
    Eigen::ArrayXd interior(m);
    for (int i = 0; i < m; ++i) interior[i] = F[i + 1];
    double b_left = F[1] * F[1] / F[2];
    double b_right = F[nx - 2] * F[nx - 2] / F[nx - 3];
    const double cl = theta * dt * lo[1];        // weight of F0 in row 1
    const double cr = theta * dt * up[nx - 2];   // weight of F_{n-1} in the last row
    for (int it = 0; it < 40; ++it) {
      const double f1 = interior[0], f2 = interior[1];
      const double g1 = interior[m - 1], g2 = interior[m - 2];
      const double phi_l = f1 * f1 / f2;
      const double dl1 = 2 * f1 / f2, dl2 = -(f1 / f2) * (f1 / f2);
      const double phi_r = g1 * g1 / g2;
      const double dr1 = 2 * g1 / g2, dr2 = -(g1 / g2) * (g1 / g2);

      Eigen::ArrayXd di = sys_di, upb = sys_up, lob = sys_lo;
      rhs = expl;
      di[0] -= cl * dl1;
      upb[0] -= cl * dl2;
      rhs[0] += cl * (phi_l - dl1 * f1 - dl2 * f2);
      di[m - 1] -= cr * dr1;
      lob[m - 1] -= cr * dr2;
      rhs[m - 1] += cr * (phi_r - dr1 * g1 - dr2 * g2);

      interior = solve_tridiagonal(lob, di, upb, rhs);
      for (int i = 0; i < m; ++i)
        if (!(interior[i] > 0.0))
          throw SolveError("non-positive intermediate value at t = " +
                           format_double(grid.t_min + n * dt));
      const double new_left = interior[0] * interior[0] / interior[1];
      const double new_right =
          interior[m - 1] * interior[m - 1] / interior[m - 2];
      const double delta =
          std::fabs(std::log(new_left) - std::log(b_left)) +
          std::fabs(std::log(new_right) - std::log(b_right));
      b_left = new_left;
      b_right = new_right;
      if (delta < 1e-13) break;
    }

    F[0] = b_left;
    F[nx - 1] = b_right;
    for (int i = 0; i < m; ++i) F[i + 1] = interior[i];
    for (int i = 0; i < nx; ++i) sol.lnF(n, i) = std::log(F[i]);
  }
  return sol;
}

ResidualReport flow_transport_check(const ModelSpec& model_in_x, const FlowField& X,
                                    const LnSolution& lnF, double eps_flow,
                                    const GridSpec& grid) {
  const double x_margin = 0.5 * (grid.x_max - grid.x_min);
  const double t_margin = 0.5 * (grid.t_max - grid.t_min);

  OdeOptions opt;
  opt.abs_tol = 1e-12;
  opt.rel_tol = 1e-12;

  LnSolution transported = [&, eps_flow](double t, double x) {
    // backward characteristics: d(t,x)/dr = -xi, dA/dr = +a
    Eigen::VectorXd y0(3);
    y0 << t, x, 0.0;
    auto rhs = [&X](double, const Eigen::VectorXd& y) {
      Eigen::VectorXd d(3);
      d[0] = -X.xi_t(y[0]);
      d[1] = -X.xi_x(y[0], y[1]);
      d[2] = X.a(y[0], y[1]);
      return d;
    };
    const Eigen::VectorXd yf =
        eps_flow == 0.0 ? y0 : integrate_ode(rhs, 0.0, eps_flow, y0, opt).states().back();
    if (yf[1] < grid.x_min - x_margin || yf[1] > grid.x_max + x_margin ||
        yf[0] < grid.t_min - t_margin || yf[0] > grid.t_max + t_margin)
      throw FlowDomainError("flow leaves the grid domain");
    return lnF(yf[0], yf[1]) + yf[2];
  };
  return residual(model_in_x, transported, grid);
}

}  // namespace ofsym
