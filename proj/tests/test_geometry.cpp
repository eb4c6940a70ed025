#include <doctest.h>

#include <cmath>

#include "ofsym/geometry.hpp"
#include "ofsym/ode.hpp"

using namespace ofsym;

namespace {

Expr xv() { return Expr::variable(Var::X); }

Eigen::ArrayXd grid(double a, double b, int n) {
  return Eigen::ArrayXd::LinSpaced(n, a, b);
}

// Finite difference of the pullback of the drift one-form along the flow of
// Y: (phi_eps^* C)_x = C_x(phi_eps(x)) * dphi_eps/dx. Independent of the
// symbolic derivative path.
double lie_cov_by_flow(const SpaceVectorField& y, const DriftField& drift, double x,
                       double eps) {
  auto rhs = [&y](double, const Eigen::VectorXd& state) {
    Eigen::VectorXd d(2);
    d[0] = y.contra.eval_x(state[0]);
    d[1] = y.contra.diff(Var::X).eval_x(state[0]) * state[1];  // variational part
    return d;
  };
  Eigen::VectorXd y0(2);
  y0 << x, 1.0;
  OdeOptions opt;
  opt.abs_tol = 1e-14;
  opt.rel_tol = 1e-14;
  const Eigen::VectorXd fwd = integrate_ode(rhs, 0.0, eps, y0, opt).states().back();
  const Eigen::VectorXd bwd = integrate_ode(rhs, 0.0, -eps, y0, opt).states().back();
  const double pulled_fwd = drift.cov.eval_x(fwd[0]) * fwd[1];
  const double pulled_bwd = drift.cov.eval_x(bwd[0]) * bwd[1];
  return (pulled_fwd - pulled_bwd) / (2 * eps);
}

}  // namespace

TEST_CASE("log transform: substitution of S = e^x") {
  ModelSpec m;
  m.frame = CoordFrame::StockPrice;
  m.sigma = Expr::constant(0.4);
  m.kappa = Expr::constant(2.0);
  m.mu = Expr::constant(0.3);
  m.lambda = Expr::constant(0.1);
  const ModelSpec mx = log_transform(m);
  CHECK(mx.sigma.eval_x(1.7) == 0.4);

  ModelSpec lin;
  lin.frame = CoordFrame::StockPrice;
  lin.sigma = Expr::variable(Var::S);
  const ModelSpec linx = log_transform(lin);
  CHECK(linx.sigma.eval_x(0.5) == doctest::Approx(std::exp(0.5)).epsilon(1e-15));
}

TEST_CASE("log transform: first-derivative coefficient at x = 0") {
  const double kappa = 2.0, mu = 0.3, lambda = 0.1, sigma0 = 0.4;
  ModelSpec m;
  m.frame = CoordFrame::StockPrice;
  m.sigma = Expr::constant(sigma0);
  m.kappa = Expr::constant(kappa);
  m.mu = Expr::constant(mu);
  m.lambda = Expr::constant(lambda);
  const DriftField d = drift_from_model(log_transform(m));
  CHECK(d.b_eff.eval_x(0.0) ==
        doctest::Approx(kappa * (mu - lambda) - sigma0 * sigma0 / 2).epsilon(1e-15));
}

TEST_CASE("drift: plain examples") {
  ModelSpec m;
  m.sigma = Expr::constant(std::sqrt(2.0));
  m.kappa = Expr::constant(0.0);
  m.mu = Expr::constant(0.0);
  m.lambda = Expr::constant(0.0);
  const DriftField d = drift_from_model(m);
  CHECK(d.contra.eval_x(0.3) == doctest::Approx(1.0).epsilon(1e-15));

  const double kappa = 2.0, mu = 0.3, lambda = 0.1, sigma0 = 0.2;
  const DriftField dc =
      drift_from_model(ModelSpec::constant_coefficients(kappa, mu, lambda, sigma0));
  for (double x : {-1.0, 0.0, 0.7})
    CHECK(dc.contra.eval_x(x) ==
          doctest::Approx(kappa * x - kappa * (mu - lambda) + sigma0 * sigma0 / 2)
              .epsilon(1e-14));
}

TEST_CASE("drift representations stay consistent on the grid") {
  ModelSpec m;
  m.sigma = 1 + 0.3 * Expr::exp(xv() - 1.5);
  m.kappa = 2 + 0.1 * Expr::sin(xv());
  m.mu = Expr::constant(0.3);
  m.lambda = Expr::constant(0.1);
  const DriftField d = drift_from_model(m);
  const Expr sigma = m.sigma;
  for (double x : {-0.9, 0.0, 0.4, 1.1}) {
    const double s = sigma.eval_x(x);
    CHECK(d.cov.eval_x(x) * s * s / 2 ==
          doctest::Approx(d.contra.eval_x(x)).epsilon(1e-14));
    const double lhs = d.b_eff.eval_x(x) + d.contra.eval_x(x) -
                       s * sigma.diff(Var::X).eval_x(x) / 2;
    CHECK(std::fabs(lhs) <= 1e-14);
  }
}

TEST_CASE("drift reconstruction recovers the mean-reversion term") {
  ModelSpec m;
  m.sigma = 1 + 0.2 * Expr::sin(xv());
  m.kappa = Expr::constant(1.7);
  m.mu = 0.3 + 0.05 * Expr::cos(xv());
  m.lambda = Expr::constant(0.1);
  const DriftField d = drift_from_model(m);
  const Expr sigma = m.sigma;
  const Expr recon = sigma * sigma / 2 + sigma * sigma.diff(Var::X) / 2 - d.contra;
  const Expr want = (*m.kappa) * ((*m.mu) - (*m.lambda) - xv());
  const Eigen::ArrayXd xs = grid(-1, 1, 101);
  for (Eigen::Index i = 0; i < xs.size(); ++i)
    CHECK(std::fabs(recon.eval_x(xs[i]) - want.eval_x(xs[i])) <= 1e-10);
}

TEST_CASE("homothetic basis: constant and power volatility") {
  {
    const Metric1D metric = Metric1D::from_sigma(Expr::constant(0.7));
    const HomotheticBasis b = homothetic_basis(metric, 0.0);
    CHECK(b.kv.contra.eval_x(0.3) == doctest::Approx(0.7).epsilon(1e-15));
    for (double x : {-1.0, 0.2, 1.4})
      CHECK(std::fabs(b.hv.contra.eval_x(x) - x) <= 1e-12);
  }
  {
    const Metric1D metric = Metric1D::from_sigma(xv());
    const HomotheticBasis b = homothetic_basis(metric, 1.0);
    for (double x : {0.5, 1.0, 1.8})
      CHECK(std::fabs(b.hv.contra.eval_x(x) - x * std::log(x)) <= 1e-11);
  }
}

TEST_CASE("Killing and homothetic factors read back from the metric") {
  const Metric1D metric = Metric1D::from_sigma(1 + 0.3 * Expr::exp(xv() - 1.5));
  const HomotheticBasis b = homothetic_basis(metric, 0.0);
  const Expr lk = lie_derivative_metric(b.kv, metric);
  const Expr lh = lie_derivative_metric(b.hv, metric);
  const Eigen::ArrayXd xs = grid(-1, 1, 401);
  for (Eigen::Index i = 0; i < xs.size(); ++i) {
    const double g = metric.g_xx.eval_x(xs[i]);
    CHECK(std::fabs(lk.eval_x(xs[i])) <= 1e-9 * g);
    const double psi = lh.eval_x(xs[i]) / (2 * g);
    CHECK(psi == doctest::Approx(1.0).epsilon(1e-9));
  }
}

TEST_CASE("metric invariant g_xx sigma^2 / 2 = 1") {
  const Metric1D metric = Metric1D::from_sigma(1 + 0.2 * Expr::sin(3 * xv()));
  const Eigen::ArrayXd xs = grid(-2, 2, 101);
  for (Eigen::Index i = 0; i < xs.size(); ++i) {
    const double s = metric.sigma.eval_x(xs[i]);
    CHECK(metric.g_xx.eval_x(xs[i]) * s * s / 2 == doctest::Approx(1.0).epsilon(1e-14));
  }
}

TEST_CASE("covariant Lie derivative: fixed examples") {
  {
    SpaceVectorField y{Expr::constant(2.0), Expr::constant(0.4), 0.0, "Y"};
    DriftField c{Expr::constant(1.0), Expr::constant(5.0), Expr::constant(0)};
    CHECK(lie_derivative_cov(y, c).eval_x(0.1) == 0.0);
  }
  {
    const double sigma0 = 0.5, kappa = 1.3;
    SpaceVectorField y{Expr::constant(sigma0), Expr::constant(2 / sigma0), 0.0, "K1"};
    DriftField c;
    c.cov = Expr::constant(2 / (sigma0 * sigma0)) * (Expr::constant(kappa) * xv() + 0.7);
    c.contra = c.cov * Expr::constant(sigma0 * sigma0 / 2);
    c.b_eff = Expr::constant(0);
    CHECK(lie_derivative_cov(y, c).eval_x(0.4) ==
          doctest::Approx(2 * kappa / sigma0).epsilon(1e-14));
  }
}

TEST_CASE("covariant Lie derivative agrees with the flow pullback") {
  ModelSpec m;
  m.sigma = 1 + 0.3 * Expr::exp(xv() - 1.5);
  m.kappa = Expr::constant(1.2);
  m.mu = Expr::constant(0.3);
  m.lambda = 0.1 + 0.05 * Expr::sin(xv());
  const DriftField drift = drift_from_model(m);
  const Metric1D metric = Metric1D::from_sigma(m.sigma);
  const HomotheticBasis basis = homothetic_basis(metric, 0.0);
  for (const SpaceVectorField* y : {&basis.kv, &basis.hv}) {
    const Expr sym = lie_derivative_cov(*y, drift);
    for (double x : {-0.6, 0.1, 0.8}) {
      const double flow = lie_cov_by_flow(*y, drift, x, 1e-5);
      CHECK(std::fabs(sym.eval_x(x) - flow) <= 1e-6 * (1.0 + std::fabs(flow)));
    }
  }
}

TEST_CASE("sigma positivity validation") {
  CHECK_THROWS_AS(validate_sigma_positive(xv(), grid(-1, 1, 33)), Error);
  CHECK_NOTHROW(validate_sigma_positive(1 + 0.5 * Expr::sin(xv()), grid(-1, 1, 33)));
}
