#include "ofsym/ode.hpp"

#include <algorithm>
#include <cmath>

namespace ofsym {

namespace {

// Dormand-Prince 5(4) tableau
constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
constexpr double a21 = 1.0 / 5;
constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561,
                 a54 = -212.0 / 729;
constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247,
                 a64 = 49.0 / 176, a65 = -5103.0 / 18656;
constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192,
                 b5 = -2187.0 / 6784, b6 = 11.0 / 84;
constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920,
                 e5 = -17253.0 / 339200, e6 = 22.0 / 525, e7 = -1.0 / 40;

}  // namespace

Eigen::VectorXd OdeSolution::at(double t) const {
  if (ts_.empty()) throw OdeError("empty trajectory");
  const bool fwd = ts_.back() >= ts_.front();
  const double lo = fwd ? ts_.front() : ts_.back();
  const double hi = fwd ? ts_.back() : ts_.front();
  const double span = std::max(1.0, hi - lo);
  if (t < lo - 1e-9 * span || t > hi + 1e-9 * span)
    throw OdeError("dense output queried outside the integrated span");
  t = std::clamp(t, lo, hi);

  std::size_t i = 0;
  if (fwd) {
    auto it = std::upper_bound(ts_.begin(), ts_.end(), t);
    i = static_cast<std::size_t>(std::distance(ts_.begin(), it));
  } else {
    auto it = std::upper_bound(ts_.begin(), ts_.end(), t, std::greater<double>());
    i = static_cast<std::size_t>(std::distance(ts_.begin(), it));
  }
  if (i == 0) i = 1;
  if (i >= ts_.size()) i = ts_.size() - 1;
  const double t0 = ts_[i - 1], t1 = ts_[i];
  const double h = t1 - t0;
  if (h == 0.0) return ys_[i];
  const double s = (t - t0) / h;
  // cubic Hermite on (y0, f0, y1, f1)
  const double h00 = (1 + 2 * s) * (1 - s) * (1 - s);
  const double h10 = s * (1 - s) * (1 - s);
  const double h01 = s * s * (3 - 2 * s);
  const double h11 = s * s * (s - 1);
  return h00 * ys_[i - 1] + h10 * h * fs_[i - 1] + h01 * ys_[i] + h11 * h * fs_[i];
}

OdeSolution integrate_ode(const OdeRhs& rhs, double t0, double t1,
                          const Eigen::VectorXd& y0, const OdeOptions& opt) {
  OdeSolution sol;
  Eigen::VectorXd y = y0;
  Eigen::VectorXd f = rhs(t0, y);
  if (!f.allFinite()) throw OdeError("RHS not finite at the initial point");
  sol.ts_.push_back(t0);
  sol.ys_.push_back(y);
  sol.fs_.push_back(f);
  if (t1 == t0) return sol;

  const double dir = t1 > t0 ? 1.0 : -1.0;
  const double span = std::fabs(t1 - t0);
  double h = opt.h_init > 0 ? opt.h_init : span / 100.0;
  if (opt.h_max > 0) h = std::min(h, opt.h_max);

  double t = t0;
  int rejected_in_row = 0;
  while (dir * (t1 - t) > 0) {
    const double remaining = std::fabs(t1 - t);
    if (remaining <= 1e-14 * span) break;  // endpoint reached within roundoff
    if (h < 1e-14 * span) throw OdeError("step size underflow");
    const double hstep = std::min(h, remaining);
    const double hd = dir * hstep;

    const Eigen::VectorXd k1 = f;
    const Eigen::VectorXd k2 = rhs(t + c2 * hd, y + hd * (a21 * k1));
    const Eigen::VectorXd k3 = rhs(t + c3 * hd, y + hd * (a31 * k1 + a32 * k2));
    const Eigen::VectorXd k4 = rhs(t + c4 * hd, y + hd * (a41 * k1 + a42 * k2 + a43 * k3));
    const Eigen::VectorXd k5 =
        rhs(t + c5 * hd, y + hd * (a51 * k1 + a52 * k2 + a53 * k3 + a54 * k4));
    const Eigen::VectorXd k6 =
        rhs(t + hd, y + hd * (a61 * k1 + a62 * k2 + a63 * k3 + a64 * k4 + a65 * k5));
    const Eigen::VectorXd ynew =
        y + hd * (b1 * k1 + b3 * k3 + b4 * k4 + b5 * k5 + b6 * k6);
    const Eigen::VectorXd k7 = rhs(t + hd, ynew);
    const Eigen::VectorXd err_vec =
        hd * (e1 * k1 + e3 * k3 + e4 * k4 + e5 * k5 + e6 * k6 + e7 * k7);

    if (!ynew.allFinite()) {
      h *= 0.25;
      if (++rejected_in_row > 60) throw OdeError("repeated non-finite steps");
      continue;
    }

    double err = 0.0;
    for (Eigen::Index i = 0; i < y.size(); ++i) {
      const double scale =
          opt.abs_tol + opt.rel_tol * std::max(std::fabs(y[i]), std::fabs(ynew[i]));
      err = std::max(err, std::fabs(err_vec[i]) / scale);
    }

    if (err <= 1.0) {
      t += hd;
      y = ynew;
      f = k7;
      sol.ts_.push_back(t);
      sol.ys_.push_back(y);
      sol.fs_.push_back(f);
      rejected_in_row = 0;
      double grow = err == 0.0 ? 5.0 : 0.9 * std::pow(err, -0.2);
      h = hstep * std::clamp(grow, 0.2, 5.0);
      if (opt.h_max > 0) h = std::min(h, opt.h_max);
    } else {
      h = hstep * std::max(0.2, 0.9 * std::pow(err, -0.2));
      if (++rejected_in_row > 60) throw OdeError("step control failed to converge");
    }
  }
  return sol;
}

}  // namespace ofsym
