#pragma once

#include "ofsym/geometry.hpp"
#include "ofsym/model.hpp"

namespace ofsym {

struct SolveError : Error {
  using Error::Error;
};

struct FlowDomainError : Error {
  using Error::Error;
};

struct ResidualReport {
  double max_abs = 0.0;
  double l2_mean = 0.0;
  double t_at_max = 0.0;
  double x_at_max = 0.0;
  int interior_points = 0;
};

// Candidate solution supplied as ln F(t, x).
using LnSolution = std::function<double(double, double)>;

// Relative PDE residual |sigma^2/2 F_xx + b_eff F_x - F_t| / max(1, |F_t|)
// with all derivatives taken by 4th-order central differences of ln F on the
// grid. Never differentiates the candidate symbolically.
ResidualReport residual(const ModelSpec& model_in_x, const LnSolution& lnF,
                        const GridSpec& grid);

// Same, with coefficients given directly; b_eff may depend on t (used by the
// time-dependent model's cross checks).
ResidualReport residual_coeffs(const std::function<double(double)>& half_sigma2,
                               const std::function<double(double, double)>& b_eff,
                               const LnSolution& lnF, const GridSpec& grid);

struct GridSolution {
  GridSpec grid;
  Eigen::MatrixXd lnF;  // n_t rows, n_x columns

  LnSolution interpolant() const;  // bilinear, throws outside the grid
};

// theta-scheme time stepping (theta = 1/2 is Crank-Nicolson) with
// second-order central space differences. Boundary rows close the system by
// linear extrapolation of ln F. Non-positive intermediate values are an
// error, not clamped.
GridSolution solve_fd(const ModelSpec& model_in_x, const Expr& g, const GridSpec& grid,
                      double theta = 0.5);

// Point-symmetry candidate as evaluable coefficients.
struct FlowField {
  std::function<double(double)> xi_t;
  std::function<double(double, double)> xi_x;
  std::function<double(double, double)> a;
};

// Transports lnF by the time-eps flow of X (characteristics integrated with
// the shared RK45 kernel) and reports the residual of the transported
// function. A true symmetry keeps the residual at the original level.
ResidualReport flow_transport_check(const ModelSpec& model_in_x, const FlowField& X,
                                    const LnSolution& lnF, double eps_flow,
                                    const GridSpec& grid);

}  // namespace ofsym
