#pragma once

// Adaptive Dormand–Prince 5(4) for small complex systems, with steps clipped
// so that every requested output abscissa is hit exactly.

#include <Eigen/Dense>
#include <cmath>
#include <complex>
#include <string>
#include <vector>

#include "blowup/errors.hpp"

namespace blowup::detail {

struct OdeOptions {
  double rtol = 1e-12;
  double atol = 1e-300;
  long max_steps = 20'000'000;
};

// Integrates y' = f(x, y) from x0 to the last entry of `outputs` (which must be
// monotone in the direction of integration); `record(k, y)` is called at each
// outputs[k]. The scale of each component is tracked as a running maximum so
// quadrature components that start at zero are still controlled relatively.
template <class V, class F, class R>
V dopri(F&& f, double x0, V y, const std::vector<double>& outputs, R&& record, const OdeOptions& opt = {}) {
  static constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
  static constexpr double a21 = 1.0 / 5;
  static constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
  static constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
  static constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561, a54 = -212.0 / 729;
  static constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247, a64 = 49.0 / 176,
                          a65 = -5103.0 / 18656;
  static constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192, b5 = -2187.0 / 6784, b6 = 11.0 / 84;
  static constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920, e5 = -17253.0 / 339200,
                          e6 = 22.0 / 525, e7 = -1.0 / 40;

  if (outputs.empty()) return y;
  const double dir = outputs.back() >= x0 ? 1.0 : -1.0;
  const double span = std::abs(outputs.back() - x0);
  double x = x0;
  double h = dir * std::min(1e-3, std::max(span, 1e-12)) * 1e-2;
  Eigen::VectorXd scale = y.cwiseAbs();
  V k1 = f(x, y), k2, k3, k4, k5, k6, k7, ynew;
  size_t next = 0;
  while (next < outputs.size() && (outputs[next] - x) * dir <= 0.0) record(next++, y);
  long steps = 0;
  while (next < outputs.size()) {
    const double target = outputs[next];
    bool clipped = false;
    double hh = h;
    if ((x + hh - target) * dir >= 0.0) {
      hh = target - x;
      clipped = true;
    }
    k2 = f(x + c2 * hh, y + hh * (a21 * k1));
    k3 = f(x + c3 * hh, y + hh * (a31 * k1 + a32 * k2));
    k4 = f(x + c4 * hh, y + hh * (a41 * k1 + a42 * k2 + a43 * k3));
    k5 = f(x + c5 * hh, y + hh * (a51 * k1 + a52 * k2 + a53 * k3 + a54 * k4));
    k6 = f(x + hh, y + hh * (a61 * k1 + a62 * k2 + a63 * k3 + a64 * k4 + a65 * k5));
    ynew = y + hh * (b1 * k1 + b3 * k3 + b4 * k4 + b5 * k5 + b6 * k6);
    k7 = f(x + hh, ynew);
    const V err = hh * (e1 * k1 + e3 * k3 + e4 * k4 + e5 * k5 + e6 * k6 + e7 * k7);
    double en = 0.0;
    for (int i = 0; i < y.size(); ++i) {
      const double sc = opt.atol + opt.rtol * std::max({scale(i), std::abs(y(i)), std::abs(ynew(i))});
      en = std::max(en, std::abs(err(i)) / sc);
    }
    if (!std::isfinite(en)) en = 1e10;
    if (++steps > opt.max_steps)
      throw Error(ErrorKind::stiff_failure, "step budget exhausted near x = " + std::to_string(x));
    if (en <= 1.0) {
      x = clipped ? target : x + hh;
      y = ynew;
      k1 = k7;
      for (int i = 0; i < y.size(); ++i) scale(i) = std::max(scale(i), std::abs(y(i)));
      while (next < outputs.size() && (outputs[next] - x) * dir <= 0.0) record(next++, y);
      const double fac = en == 0.0 ? 5.0 : std::clamp(0.9 * std::pow(en, -0.2), 0.2, 5.0);
      if (!clipped || std::abs(hh * fac) > std::abs(h)) h = hh * fac;
    } else {
      h = hh * std::max(0.2, 0.9 * std::pow(en, -0.2));
    }
    if (std::abs(h) < 1e-14 * std::max(1.0, std::abs(x)))
      throw Error(ErrorKind::stiff_failure, "step size collapsed near x = " + std::to_string(x));
  }
  return y;
}

}  // namespace blowup::detail
