#include "ofsym/solutions.hpp"

#include <cmath>

namespace ofsym {

namespace {

Expr tvar() { return Expr::variable(Var::T); }
Expr xvar() { return Expr::variable(Var::X); }

Expr exp_of(double k) { return Expr::exp(Expr::constant(k) * tvar()); }

// ln F for the reduction along exp(mt) sigma d/dx + w F d/dF, valid for any
// antiderivative u of 1/sigma as long as the drift is sigma (m u + c) with
// the same u.
Expr invariant_lnF(const Expr& u, double m, double c, double w) {
  if (m != 0.0) {
    return Expr::constant(w) * exp_of(-m) * u +
           Expr::constant(w * c / m) * exp_of(-m) -
           Expr::constant(w * w / (4 * m)) * exp_of(-2 * m);
  }
  return Expr::constant(w) * u + Expr::constant(w * w / 2 - w * c) * tvar();
}

}  // namespace

ClosedFormSolution schwartz_solution(double kappa, double lambda, double mu,
                                     double sigma0) {
  if (!(kappa > 0.0)) throw Error("mean-reversion rate must be positive");
  const double a_star = mu - lambda - 0.5 * sigma0 * sigma0 / kappa;
  const Expr ek = exp_of(-kappa);
  const Expr e2k = exp_of(-2 * kappa);
  ClosedFormSolution sol;
  sol.lnF = ek * xvar() + Expr::constant(a_star) * (1 - ek) +
            Expr::constant(sigma0 * sigma0 / (4 * kappa)) * (1 - e2k);
  sol.family = "schwartz";
  sol.params = {{"kappa", kappa}, {"lambda", lambda}, {"mu", mu}, {"sigma0", sigma0}};
  return sol;
}

ClosedFormSolution invariant_solution(const Metric1D& metric, double m, double c,
                                      double x_ref, double weight, double quad_tol) {
  const Expr u = antiderivative(Expr::constant(1) / metric.sigma, Var::X, x_ref,
                                quad_tol);
  ClosedFormSolution sol;
  sol.lnF = invariant_lnF(u, m, c, weight);
  sol.family = m != 0.0 ? "invariant" : "invariant-static";
  sol.params = {{"m", m}, {"c", c}, {"x_ref", x_ref}, {"weight", weight}};
  return sol;
}

ExampleFamily example_family(FamilyKind kind, const FamilyParams& p) {
  ExampleFamily fam;
  const Expr x = xvar();
  Expr sigma, u;
  std::string family;
  switch (kind) {
    case FamilyKind::PowerSigma:
      // sigma = x on a positive window; u anchored at x = 1
      sigma = x;
      u = Expr::ln(x);
      family = "power-sigma";
      fam.note =
          "drift built from the maximal-symmetry condition with u = ln x; the "
          "printed condition form integrates to x ln x, not ln x";
      break;
    case FamilyKind::ExpSigma:
      sigma = Expr::exp(x);
      u = -Expr::exp(-x);
      family = "exp-sigma";
      fam.note = "u = -exp(-x); drift is -m + c e^x";
      break;
    case FamilyKind::ExpPerturbation: {
      const Expr bump = Expr::constant(p.eps) * Expr::exp(x - Expr::constant(p.x0));
      sigma = 1 + bump;
      u = (x - Expr::constant(p.x0)) - Expr::ln(1 + bump);
      family = "con02";
      break;
    }
    case FamilyKind::SinePerturbation: {
      sigma = 1 + Expr::constant(p.eps) * Expr::sin(Expr::constant(p.omega) * x);
      u = antiderivative(Expr::constant(1) / sigma, Var::X, 0.0, 1e-12);
      family = "con04-real";
      fam.note =
          "real-valued counterpart; the printed periodic form is complex-valued "
          "and drops the frequency";
      break;
    }
    default:
      throw Error("unknown example family");
  }

  fam.model.frame = CoordFrame::LogPrice;
  fam.model.sigma = sigma;
  fam.model.drift_contra = sigma * (Expr::constant(p.m) * u + Expr::constant(p.c));
  fam.u = u;
  fam.solution.lnF = invariant_lnF(u, p.m, p.c, 1.0);
  fam.solution.family = family;
  fam.solution.params = {{"m", p.m}, {"c", p.c}, {"eps", p.eps},
                         {"x0", p.x0}, {"omega", p.omega}};
  return fam;
}

std::vector<std::pair<double, double>> static_profile(const ClosedFormSolution& sol,
                                                      double t0,
                                                      const Eigen::ArrayXd& xs) {
  std::vector<std::pair<double, double>> rows;
  rows.reserve(static_cast<std::size_t>(xs.size()));
  for (Eigen::Index i = 0; i < xs.size(); ++i)
    rows.emplace_back(xs[i], sol.lnF.eval_tx(t0, xs[i]));
  return rows;
}

namespace {

double solution_residual(const ModelSpec& model, const Expr& lnF, const GridSpec& grid) {
  const Expr e = lnF;
  return residual(model, [e](double t, double x) { return e.eval_tx(t, x); }, grid)
      .max_abs;
}

}  // namespace

std::vector<PaperFormStatus> paper_form_statuses(double residual_tol) {
  std::vector<PaperFormStatus> out;
  const Expr x = xvar();
  const Expr t = tvar();

  // power-sigma, printed drift: -m ln x + c1 x. The eigen-condition it is
  // said to solve actually integrates to -m x ln x + c1 x; measured here as
  // the non-constancy of the eigenvalue ratio for the printed form.
  {
    const double m = 1.0, c1 = 0.5;
    ModelSpec model;
    model.sigma = x;
    model.drift_contra = Expr::constant(-m) * Expr::ln(x) + Expr::constant(c1) * x;
    const DriftField drift = drift_from_model(model);
    const Metric1D metric = Metric1D::from_sigma(model.sigma);
    const SpaceVectorField kv{model.sigma, Expr::constant(2) / model.sigma, 0.0, "K1"};
    const Expr lc = lie_derivative_cov(kv, drift);
    const Eigen::ArrayXd xs = Eigen::ArrayXd::LinSpaced(201, 0.5, 2.0);
    Eigen::ArrayXd ratio(xs.size());
    for (Eigen::Index i = 0; i < xs.size(); ++i)
      ratio[i] = lc.eval_x(xs[i]) / kv.cov.eval_x(xs[i]);
    const double dev = (ratio - ratio.mean()).abs().maxCoeff();
    PaperFormStatus s;
    s.id = "power-sigma-printed-drift";
    s.documented = true;
    s.residual = dev;
    s.note =
        "printed drift does not satisfy the eigen-condition it is derived from; "
        "integrating that condition gives -m x ln x + c1 x (see power-sigma family)";
    out.push_back(s);
  }

  // power-sigma, printed solution (m != 0): exact for the drift
  // x (m ln x - c1), i.e. the integrated condition with c = -c1.
  {
    const double m = 1.0, c1 = 0.5;
    FamilyParams p;
    p.m = m;
    p.c = -c1;
    ExampleFamily fam = example_family(FamilyKind::PowerSigma, p);
    const Expr printed = exp_of(-m) * Expr::ln(x) -
                         Expr::constant(c1 / m) * exp_of(-m) -
                         Expr::constant(1.0 / (4 * m)) * exp_of(-2 * m);
    const GridSpec grid{0.8, 2.2, 401, 0.0, 2.0, 201};
    PaperFormStatus s;
    s.id = "power-sigma-printed-solution";
    s.residual = solution_residual(fam.model, printed, grid);
    s.verified = s.residual <= residual_tol;
    s.note = "printed solution matches the integrated-condition drift with c = -c1";
    out.push_back(s);
  }

  // power-sigma, printed static solution (m = 0): F = x exp((c1 + 1/2) t).
  {
    const double c1 = 0.4;
    FamilyParams p;
    p.m = 0.0;
    p.c = -c1;
    ExampleFamily fam = example_family(FamilyKind::PowerSigma, p);
    const Expr printed = Expr::ln(x) + Expr::constant(c1 + 0.5) * t;
    const GridSpec grid{0.8, 2.2, 401, 0.0, 2.0, 201};
    PaperFormStatus s;
    s.id = "power-sigma-printed-solution-static";
    s.residual = solution_residual(fam.model, printed, grid);
    s.verified = s.residual <= residual_tol;
    s.note = "m = 0 branch with c = -c1";
    out.push_back(s);
  }

  // exp-sigma, printed drift: -m + c1 e^{-x}. Not of the maximal-symmetry
  // form for c1 != 0; the compatible drift is -m + c1 e^{x}.
  {
    const double m = 1.0, c1 = 0.5;
    ModelSpec model;
    model.sigma = Expr::exp(x);
    model.drift_contra = Expr::constant(-m) + Expr::constant(c1) * Expr::exp(-x);
    const DriftField drift = drift_from_model(model);
    const SpaceVectorField kv{model.sigma, Expr::constant(2) / model.sigma, 0.0, "K1"};
    const Expr lc = lie_derivative_cov(kv, drift);
    const Eigen::ArrayXd xs = Eigen::ArrayXd::LinSpaced(201, -1.0, 1.0);
    Eigen::ArrayXd ratio(xs.size());
    for (Eigen::Index i = 0; i < xs.size(); ++i)
      ratio[i] = lc.eval_x(xs[i]) / kv.cov.eval_x(xs[i]);
    const double dev = (ratio - ratio.mean()).abs().maxCoeff();
    PaperFormStatus s;
    s.id = "exp-sigma-printed-drift";
    s.documented = true;
    s.residual = dev;
    s.note = "sign of the exponent: the eigen-condition gives -m + c1 e^{+x}";
    out.push_back(s);
  }

  // exp-sigma, printed solution: exact under the corrected drift.
  {
    const double m = 1.0, c = 0.5;
    FamilyParams p;
    p.m = m;
    p.c = c;
    ExampleFamily fam = example_family(FamilyKind::ExpSigma, p);
    const Expr printed =
        -(exp_of(-m) / Expr::constant(4 * m)) *
        (Expr::constant(4 * m) * Expr::exp(-x) - Expr::constant(4 * c) + exp_of(-m));
    const GridSpec grid{-1.0, 1.0, 201, 0.0, 2.0, 201};
    PaperFormStatus s;
    s.id = "exp-sigma-printed-solution";
    s.residual = solution_residual(fam.model, printed, grid);
    s.verified = s.residual <= residual_tol;
    s.note = "verified against the corrected drift -m + c e^{x}";
    out.push_back(s);
  }

  // periodic family: the printed closed form carries an explicit imaginary
  // unit and drops the frequency, so it is recorded but not reproduced; the
  // real-valued counterpart built from the real antiderivative is verified.
  {
    FamilyParams p;
    p.m = 1.0;
    p.c = 0.5;
    p.eps = 0.1;
    p.omega = 1.0;
    ExampleFamily fam = example_family(FamilyKind::SinePerturbation, p);
    const GridSpec grid{-1.0, 1.0, 201, 0.0, 2.0, 201};
    PaperFormStatus complex_form;
    complex_form.id = "sine-printed-solution";
    complex_form.documented = true;
    complex_form.note =
        "printed form is complex-valued (explicit imaginary unit, frequency "
        "dropped); not reproduced";
    out.push_back(complex_form);

    PaperFormStatus real_form;
    real_form.id = "sine-real-counterpart";
    real_form.residual = solution_residual(fam.model, fam.solution.lnF, grid);
    real_form.verified = real_form.residual <= residual_tol;
    real_form.note = "real-valued solution from the real antiderivative of 1/sigma";
    out.push_back(real_form);
  }

  // constant-parameter heat-form example: printed g(x) disagrees with the
  // defining relation sigma g' = g; the printed ln F is exact.
  {
    const double kappa = 0.5, mu = 0.3, lambda = 0.1;
    const Expr w = Expr::constant(2 * (mu - lambda) + 1) - 2 * x;
    const Expr sigma = Expr::sqrt(Expr::constant(kappa) * w);
    ModelSpec model;
    model.sigma = sigma;
    model.kappa = Expr::constant(kappa);
    model.mu = Expr::constant(mu);
    model.lambda = Expr::constant(lambda);

    const Expr printed_g = -Expr::constant(kappa / 3.0) * w * sigma;  // ln g, one sign
    const Expr lhs = sigma * printed_g.diff(Var::X) - Expr::constant(1);
    const Eigen::ArrayXd xs = Eigen::ArrayXd::LinSpaced(101, -1.0, 0.5);
    double dev = 0;
    for (Eigen::Index i = 0; i < xs.size(); ++i)
      dev = std::max(dev, std::fabs(lhs.eval_x(xs[i])));
    PaperFormStatus g_status;
    g_status.id = "heatform-printed-initial-condition";
    g_status.documented = true;
    g_status.residual = dev;
    g_status.note =
        "printed ln g is proportional to the antiderivative of sigma, not of "
        "1/sigma; the defining relation sigma g' = g fails";
    out.push_back(g_status);

    const Expr printed_lnF =
        Expr::constant(mu / 2.0) *
        (Expr::constant(mu * kappa) * t - 2 * Expr::sqrt(w));
    const GridSpec grid{-1.0, 0.2, 401, 0.0, 2.0, 201};
    PaperFormStatus f_status;
    f_status.id = "heatform-printed-solution";
    f_status.residual = solution_residual(model, printed_lnF, grid);
    f_status.verified = f_status.residual <= residual_tol;
    f_status.note = "printed solution for the heat-form constant-parameter case";
    out.push_back(f_status);
  }

  return out;
}

}  // namespace ofsym
