#pragma once

#include <optional>

#include "ofsym/geometry.hpp"
#include "ofsym/pdesolve.hpp"

namespace ofsym {

// One additional point symmetry: xi_t(t) d/dt + sum_i T_i(t) Y_i^x d/dx
// + a(t,x) F d/dF. The time profiles are tied to KV/HV basis fields so the
// linearized conditions can be checked term by term.
struct SymmetryTerm {
  Expr time_profile;  // T(t)
  SpaceVectorField field;
};

struct SymmetryField {
  Expr xi_t = Expr::constant(0);
  std::vector<SymmetryTerm> terms;
  Expr a = Expr::constant(0);
  std::string label;
  double m = 0.0;
  double c = 0.0;

  bool verified = false;
  double drift_condition_residual = 0.0;      // transport of the drift one-form
  double evolution_condition_residual = 0.0;  // a must itself solve the equation
  double time_consistency_residual = 0.0;     // xi_t' = 2 sum psi_i T_i

  Expr xi_x() const;
  std::string printable() const;
  FlowField flow_field() const;
};

struct ConditionDiagnostic {
  std::string name;
  double residual = 0.0;
  bool holds = false;
};

struct ClassificationReport {
  std::string case_label;  // HeatForm | Corollary/CaseA | CaseA | B1 | B2a | B2b | None
  int extra_count = 0;     // verified extra symmetries (autonomy excluded)
  int with_autonomy = 1;   // extra_count + 1
  std::string total;       // "5+1+inf" style counting string
  std::optional<double> m, c;
  std::vector<SymmetryField> fields;      // verified
  std::vector<SymmetryField> candidates;  // emitted but failing verification
  std::vector<ConditionDiagnostic> diagnostics;
  std::vector<std::string> notes;
};

// Returns the mean when the samples agree to rel_tol, otherwise nothing.
std::optional<double> detect_constant(const Eigen::ArrayXd& values, double rel_tol);

// Tests the eigen-condition L_Y C_x = m Y_x (covariant components) on the
// grid. On success builds the symmetry exp(m t) Y (plus the induced d/dt part
// when Y is homothetic).
std::optional<SymmetryField> case_a_test(const SpaceVectorField& y,
                                         const DriftField& drift,
                                         const Metric1D& metric,
                                         const Eigen::ArrayXd& xs, double tol);

// Least-squares fit of C^x / sigma = m u + c over the grid; success means the
// equation is maximally symmetric.
std::optional<std::pair<double, double>> corollary_fit(const Metric1D& metric,
                                                       const DriftField& drift,
                                                       const HomotheticBasis& basis,
                                                       const Eigen::ArrayXd& xs,
                                                       double tol);

// The four extra symmetries of a maximally symmetric equation, covering the
// regimes m != 0 and m = 0 ((0,0) being the heat form).
std::vector<SymmetryField> build_corollary_symmetries(const Metric1D& metric,
                                                      const HomotheticBasis& basis,
                                                      double m, double c);

struct ClassifyOptions {
  double cond_tol = 1e-8;
  double residual_tol = 1e-8;
  double quad_tol = 1e-10;
  double x_ref = 0.0;
  GridSpec verify_grid{-1.0, 1.0, 201, 0.0, 2.0, 201};
};

// Full decision procedure: heat form, then the maximal-symmetry fit, then the
// single-eigenvalue cases, then the separable branches with linear or
// exponential time profiles. Every emitted field is re-verified against the
// linearized symmetry conditions on a (t, x) grid.
ClassificationReport classify(const ModelSpec& model, const Eigen::ArrayXd& xs,
                              const ClassifyOptions& opt = {});

// sigma(x) with identically vanishing drift for the given forcing
// K = kappa (mu - lambda - x); c1 shifts the homogeneous part.
Expr heat_form_sigma(const Expr& K, double c1, const Eigen::ArrayXd& xs,
                     double x_ref = 0.0, double quad_tol = 1e-10);

// g with sigma g' = g: the initial-condition profile left invariant by the
// Killing-vector symmetry combined with the linear one.
Expr initial_condition_from_symmetry(const Metric1D& metric, double x_ref,
                                     double quad_tol = 1e-10);

// Residual verification of a symmetry field on the (t, x) grid; fills the
// residual fields and the verified flag.
void verify_symmetry(SymmetryField& field, const Metric1D& metric,
                     const DriftField& drift, const GridSpec& grid, double tol);

}  // namespace ofsym
