#pragma once

#include <Eigen/Dense>
#include <optional>

#include "ofsym/expr.hpp"

namespace ofsym {

enum class CoordFrame { StockPrice, LogPrice };  // S, or x = ln S

// PDE coefficients. Either the four named parameters are present (functions
// of S or x per `frame`), or the first-order drift is supplied directly in
// log-price form.
struct ModelSpec {
  CoordFrame frame = CoordFrame::LogPrice;
  Expr sigma = Expr::constant(1);
  std::optional<Expr> kappa, mu, lambda;
  std::optional<Expr> drift_contra;  // C^x given directly (LogPrice only)

  static ModelSpec constant_coefficients(double kappa, double mu, double lambda,
                                         double sigma);
};

// Rewrites an S-frame model with S = e^x. Coefficients become functions of x;
// an x-frame model passes through unchanged.
ModelSpec log_transform(const ModelSpec& model);

struct GridSpec {
  double x_min = -1.0;
  double x_max = 1.0;
  int n_x = 401;
  double t_min = 0.0;
  double t_max = 2.0;
  int n_t = 201;

  Eigen::ArrayXd x_points() const {
    return Eigen::ArrayXd::LinSpaced(n_x, x_min, x_max);
  }
  Eigen::ArrayXd t_points() const {
    return Eigen::ArrayXd::LinSpaced(n_t, t_min, t_max);
  }
  double dx() const { return (x_max - x_min) / (n_x - 1); }
  double dt() const { return (t_max - t_min) / (n_t - 1); }
};

}  // namespace ofsym
