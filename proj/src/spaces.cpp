#include "blowup/spaces.hpp"

#include <cmath>
#include <vector>

#include "blowup/errors.hpp"
#include "blowup/evolve.hpp"

namespace blowup {

namespace {

double recip(double x) { return std::isinf(x) ? 0.0 : 1.0 / x; }

}  // namespace

StrichartzExponents StrichartzExponents::make(double p, double q) {
  StrichartzExponents e{p, q};
  if (!e.admissible()) throw Error(ErrorKind::invalid_argument, "exponents violate 1/p + 3/q = 1/2");
  return e;
}

bool StrichartzExponents::admissible() const {
  if (!(p >= 2.0) || !(q >= 6.0)) return false;
  return std::abs(recip(p) + 3.0 * recip(q) - 0.5) < 1e-12;
}

double l2_ball(const Grid& g, const Vec& v) {
  if (v.size() != g.size()) throw Error(ErrorKind::invalid_argument, "sample length does not match grid");
  const Vec r2 = g.rho.array().square();
  return std::sqrt((g.w.array() * r2.array() * v.array().square()).sum());
}

double h1_ball(const Grid& g, const Vec& v) {
  const double a = l2_ball(g, v);
  const double b = l2_ball(g, differentiate(g, v));
  return std::sqrt(a * a + b * b);
}

double h_norm(const State& s) {
  const double a = h1_ball(*s.grid, s.phi1);
  const double b = l2_ball(*s.grid, s.phi2);
  return std::sqrt(a * a + b * b);
}

double lq_ball(const Grid& g, const Vec& v, double q) {
  if (!(q >= 1.0)) throw Error(ErrorKind::invalid_argument, "lq_ball needs q >= 1");
  if (std::isinf(q)) return sup_norm(g, v);
  if (v.size() != g.size()) throw Error(ErrorKind::invalid_argument, "sample length does not match grid");
  double s = 0.0;
  for (int j = 0; j < g.size(); ++j) s += g.w(j) * g.rho(j) * g.rho(j) * std::pow(std::abs(v(j)), q);
  return std::pow(s, 1.0 / q);
}

std::pair<Vec, Vec> g_transform(const State& s) {
  const Grid& g = *s.grid;
  Vec first = g.rho.cwiseProduct(s.phi2);
  Vec second = g.rho.cwiseProduct(differentiate(g, s.phi1)) + s.phi1;
  return {first, second};
}

double g_norm(const State& s) {
  const auto [a, b] = g_transform(s);
  const Grid& g = *s.grid;
  return std::sqrt((g.w.array() * (a.array().square() + b.array().square())).sum());
}

Mat h_gram(const Grid& g) {
  const int n = g.size();
  const Vec wr = g.w.cwiseProduct(g.rho.cwiseAbs2());
  Mat M = Mat::Zero(2 * n, 2 * n);
  M.topLeftCorner(n, n) = g.D.transpose() * wr.asDiagonal() * g.D;
  M.topLeftCorner(n, n).diagonal() += wr;
  M.bottomRightCorner(n, n).diagonal() = wr;
  return M;
}

StrichartzValue strichartz_from_norms(std::span<const double> tau, std::span<const double> norms, double p) {
  if (tau.size() != norms.size()) throw Error(ErrorKind::invalid_argument, "tau and norm series differ in length");
  for (size_t k = 1; k < tau.size(); ++k)
    if (!(tau[k] > tau[k - 1])) throw Error(ErrorKind::invalid_argument, "tau grid must be increasing");
  StrichartzValue out;
  if (tau.empty()) return out;
  if (std::isinf(p)) {
    for (double v : norms) out.value = std::max(out.value, v);
    return out;
  }
  double s = 0.0;
  for (size_t k = 1; k < tau.size(); ++k)
    s += 0.5 * (tau[k] - tau[k - 1]) * (std::pow(norms[k], p) + std::pow(norms[k - 1], p));
  out.value = std::pow(s, 1.0 / p);

  // Exponential fit of norm^p over the last tenth of the window.
  const double t0 = tau.back() - 0.1 * (tau.back() - tau.front());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  int m = 0;
  for (size_t k = 0; k < tau.size(); ++k) {
    if (tau[k] < t0 || !(norms[k] > 0.0)) continue;
    const double y = p * std::log(norms[k]);
    sx += tau[k];
    sy += y;
    sxx += tau[k] * tau[k];
    sxy += tau[k] * y;
    ++m;
  }
  if (m >= 2) {
    const double slope = (m * sxy - sx * sy) / (m * sxx - sx * sx);
    const double icpt = (sy - slope * sx) / m;
    if (slope < 0.0) {
      const double tail_p = std::exp(icpt + slope * tau.back()) / (-slope);
      out.tail = std::pow(s + tail_p, 1.0 / p) - out.value;
    } else {
      out.tail = inf;
    }
  }
  return out;
}

StrichartzValue strichartz_detail(const Trajectory& traj, const StrichartzExponents& exps) {
  if (!exps.admissible()) throw Error(ErrorKind::invalid_argument, "exponents violate 1/p + 3/q = 1/2");
  std::vector<double> norms(traj.tau.size());
  for (size_t k = 0; k < traj.tau.size(); ++k) {
    const State& s = traj.states[k];
    norms[k] = lq_ball(*s.grid, s.phi1, exps.q);
  }
  return strichartz_from_norms(traj.tau, norms, exps.p);
}

double strichartz_norm(const Trajectory& traj, const StrichartzExponents& exps) {
  return strichartz_detail(traj, exps).value;
}

}  // namespace blowup
