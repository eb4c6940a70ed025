#include "ofsym/geometry.hpp"

namespace ofsym {

ModelSpec ModelSpec::constant_coefficients(double kappa, double mu, double lambda,
                                           double sigma) {
  ModelSpec m;
  m.frame = CoordFrame::LogPrice;
  m.sigma = Expr::constant(sigma);
  m.kappa = Expr::constant(kappa);
  m.mu = Expr::constant(mu);
  m.lambda = Expr::constant(lambda);
  return m;
}

ModelSpec log_transform(const ModelSpec& model) {
  if (model.frame == CoordFrame::LogPrice) return model;
  const Expr ex = Expr::exp(Expr::variable(Var::X));
  ModelSpec out;
  out.frame = CoordFrame::LogPrice;
  out.sigma = model.sigma.subst(Var::S, ex);
  if (model.kappa) out.kappa = model.kappa->subst(Var::S, ex);
  if (model.mu) out.mu = model.mu->subst(Var::S, ex);
  if (model.lambda) out.lambda = model.lambda->subst(Var::S, ex);
  if (model.drift_contra) out.drift_contra = model.drift_contra->subst(Var::S, ex);
  return out;
}

Metric1D Metric1D::from_sigma(Expr sigma) {
  Expr g = Expr::constant(2) / (sigma * sigma);
  return Metric1D{std::move(sigma), std::move(g)};
}

DriftField drift_from_model(const ModelSpec& model) {
  if (model.frame != CoordFrame::LogPrice)
    throw Error("drift_from_model expects a log-price model; call log_transform first");
  const Expr sigma = model.sigma;
  const Expr sigma_x = sigma.diff(Var::X);
  Expr contra;
  if (model.drift_contra) {
    contra = *model.drift_contra;
  } else {
    if (!model.kappa || !model.mu || !model.lambda)
      throw Error("model needs either kappa/mu/lambda or a direct drift");
    const Expr x = Expr::variable(Var::X);
    const Expr mean_term = (*model.kappa) * ((*model.mu) -
                                             (*model.lambda) - x);
    contra = -(mean_term - sigma * sigma / 2 - sigma * sigma_x / 2);
  }
  DriftField d;
  d.contra = contra;
  d.cov = Expr::constant(2) * contra / (sigma * sigma);
  d.b_eff = sigma * sigma_x / 2 - contra;
  return d;
}

HomotheticBasis homothetic_basis(const Metric1D& metric, double x_ref, double quad_tol) {
  const Expr& sigma = metric.sigma;
  Expr u = antiderivative(Expr::constant(1) / sigma, Var::X, x_ref, quad_tol);
  HomotheticBasis basis{
      SpaceVectorField{sigma, Expr::constant(2) / sigma, 0.0, "K1"},
      SpaceVectorField{sigma * u, Expr::constant(2) * u / sigma, 1.0, "H"},
      u};
  return basis;
}

Expr lie_derivative_cov(const SpaceVectorField& y, const DriftField& drift) {
  return y.contra * drift.cov.diff(Var::X) + drift.cov * y.contra.diff(Var::X);
}

Expr lie_derivative_metric(const SpaceVectorField& y, const Metric1D& metric) {
  return y.contra * metric.g_xx.diff(Var::X) +
         Expr::constant(2) * metric.g_xx * y.contra.diff(Var::X);
}

void validate_sigma_positive(const Expr& sigma, const Eigen::ArrayXd& xs) {
  for (Eigen::Index i = 0; i < xs.size(); ++i) {
    const double v = sigma.eval_x(xs[i]);
    if (!(v > 0.0))
      throw Error("sigma is not positive at x = " + format_double(xs[i]));
  }
}

}  // namespace ofsym
