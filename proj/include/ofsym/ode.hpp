#pragma once

#include <Eigen/Dense>
#include <functional>
#include <vector>

#include "ofsym/expr.hpp"

namespace ofsym {

struct OdeError : Error {
  using Error::Error;
};

struct OdeOptions {
  double abs_tol = 1e-10;
  double rel_tol = 1e-10;
  double h_max = 0.0;  // 0: no cap
  double h_init = 0.0; // 0: pick automatically
};

using OdeRhs = std::function<Eigen::VectorXd(double, const Eigen::VectorXd&)>;

// Trajectory with cubic Hermite dense output between accepted steps.
class OdeSolution {
 public:
  Eigen::VectorXd at(double t) const;
  const std::vector<double>& times() const { return ts_; }
  const std::vector<Eigen::VectorXd>& states() const { return ys_; }
  double t_begin() const { return ts_.front(); }
  double t_end() const { return ts_.back(); }

 private:
  friend OdeSolution integrate_ode(const OdeRhs&, double, double, const Eigen::VectorXd&,
                                   const OdeOptions&);
  std::vector<double> ts_;
  std::vector<Eigen::VectorXd> ys_;
  std::vector<Eigen::VectorXd> fs_;  // RHS at the accepted points
};

// Adaptive embedded Runge-Kutta 5(4), Dormand-Prince coefficients.
// Integrates forward or backward depending on the sign of t1 - t0.
OdeSolution integrate_ode(const OdeRhs& rhs, double t0, double t1,
                          const Eigen::VectorXd& y0, const OdeOptions& opt = {});

}  // namespace ofsym
