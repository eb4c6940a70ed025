#pragma once

#include "ofsym/model.hpp"

namespace ofsym {

// One-dimensional metric 2/sigma^2 dx^2 whose Laplacian reproduces the
// second-order part of the pricing equation.
struct Metric1D {
  Expr sigma;
  Expr g_xx;

  static Metric1D from_sigma(Expr sigma);
};

// Vector field Y = contra * d/dx on the metric line, with covariant component
// g_xx * contra and homothetic factor psi (0 for a Killing vector, 1 for the
// homothetic vector).
struct SpaceVectorField {
  Expr contra;
  Expr cov;
  double psi = 0.0;
  std::string name;
};

struct HomotheticBasis {
  SpaceVectorField kv;  // sigma d/dx
  SpaceVectorField hv;  // sigma * u(x) d/dx, u = antiderivative of 1/sigma
  Expr u;
};

// First-order drift of the equation written against the Laplace operator:
// Laplacian(F) - C^x F_x - F_t = 0. b_eff is the plain first-derivative
// coefficient of the same equation written without the Laplacian.
struct DriftField {
  Expr contra;  // C^x
  Expr cov;     // C_x = 2 C^x / sigma^2
  Expr b_eff;   // sigma sigma_x / 2 - C^x
};

DriftField drift_from_model(const ModelSpec& model_in_x);

HomotheticBasis homothetic_basis(const Metric1D& metric, double x_ref,
                                 double quad_tol = 1e-10);

// Covariant Lie derivative of the drift one-form along Y (one dimension):
// Y^x d_x(C_x) + C_x d_x(Y^x).
Expr lie_derivative_cov(const SpaceVectorField& y, const DriftField& drift);

// Lie derivative of g_xx along Y; equals 2 psi g_xx for a KV/HV.
Expr lie_derivative_metric(const SpaceVectorField& y, const Metric1D& metric);

// Checks sigma > 0 across the grid; throws Error otherwise.
void validate_sigma_positive(const Expr& sigma, const Eigen::ArrayXd& xs);

}  // namespace ofsym
