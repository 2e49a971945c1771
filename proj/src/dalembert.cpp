#include "blowup/dalembert.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <cmath>

#include "blowup/errors.hpp"
#include "blowup/parallel.hpp"

namespace blowup {

RadialData RadialData::constant(double a, double b) {
  return {[a](double) { return a; }, [](double) { return 0.0; }, [b](double) { return b; }};
}

RadialData RadialData::from_state(const State& s) {
  const GridPtr g = s.grid;
  const Vec p1 = s.phi1, d1 = differentiate(*g, s.phi1), p2 = s.phi2;
  return {[g, p1](double x) { return interpolate(*g, p1, x); }, [g, d1](double x) { return interpolate(*g, d1, x); },
          [g, p2](double x) { return interpolate(*g, p2, x); }};
}

Window Window::at(double tau, double rho) {
  const double h = std::exp(-tau);
  const double c = 1.0 - h;
  return {c - h * rho, c + h * rho};
}

namespace {

void check(double tau, double rho) {
  if (!(tau >= 0.0)) throw Error(ErrorKind::invalid_argument, "tau must be nonnegative");
  if (!(rho >= 0.0 && rho <= 1.0)) throw Error(ErrorKind::invalid_argument, "rho must lie in [0,1]");
}

// d/ds [s f1(|s|)] + s f2(|s|), the integrand of the combined window integral.
double kernel(const RadialData& f, double s) {
  const double m = std::abs(s);
  return f.f1(m) + m * f.df1(m) + s * f.f2(m);
}

double kernel_slope(const RadialData& f, double c) {
  const double d = 1e-5;
  const double lo = std::max(-1.0, c - d), hi = std::min(1.0, c + d);
  return (kernel(f, hi) - kernel(f, lo)) / (hi - lo);
}

double velocity_integral(const RadialData& f, double lo, double hi) {
  if (!(hi > lo)) return 0.0;
  // Integrate over [-1, 1] around the window center. On the raw interval the
  // Kronrod error estimate of a narrow window near s = 1 never drops below
  // the tolerance and the recursion runs to full depth.
  const double m = 0.5 * (lo + hi), r = 0.5 * (hi - lo);
  auto integrand = [&](double x) {
    const double s = m + r * x;
    return r * s * f.f2(s);
  };
  return boost::math::quadrature::gauss_kronrod<double, 15>::integrate(integrand, -1.0, 1.0, 12, 1e-13);
}

}  // namespace

double s0_first_component(const RadialData& f, double tau, double rho) {
  check(tau, rho);
  const double h = std::exp(-tau);
  if (rho == 0.0) return std::exp(-0.5 * tau) * kernel(f, 1.0 - h);
  const Window w = Window::at(tau, rho);
  // The position part integrates an exact derivative, so only its endpoint
  // values enter; s f1(|s|) is odd, which covers windows reaching below 0.
  const double position = w.b * f.f1(w.b) - w.a * f.f1(std::abs(w.a));
  const double velocity = velocity_integral(f, std::abs(w.a), w.b);
  return std::exp(0.5 * tau) / (2.0 * rho) * (position + velocity);
}

double s0_second_component(const RadialData& f, double tau, double rho) {
  check(tau, rho);
  const double h = std::exp(-tau);
  if (rho == 0.0) return std::exp(-0.5 * tau) * h * kernel_slope(f, 1.0 - h);
  const Window w = Window::at(tau, rho);
  return std::exp(-0.5 * tau) / (2.0 * rho) * (kernel(f, w.b) - kernel(f, w.a));
}

State s0_state(const RadialData& f, double tau, GridPtr g) {
  State s = State::zero(g);
  for (int j = 0; j < g->size(); ++j) {
    s.phi1(j) = s0_first_component(f, tau, g->rho(j));
    s.phi2(j) = s0_second_component(f, tau, g->rho(j));
  }
  return s;
}

FreeStrichartzResult free_strichartz_constant(const std::vector<State>& ensemble, const StrichartzExponents& exps,
                                              double tau_max, double dtau, int threads) {
  if (!exps.admissible()) throw Error(ErrorKind::invalid_argument, "exponents violate 1/p + 3/q = 1/2");
  if (!(tau_max > 0.0) || !(dtau > 0.0)) throw Error(ErrorKind::invalid_argument, "bad time grid");
  FreeStrichartzResult res;
  const long steps = std::lround(tau_max / dtau);
  for (long k = 0; k <= steps; ++k) res.tau.push_back(tau_max * static_cast<double>(k) / static_cast<double>(steps));
  res.ratios.assign(ensemble.size(), 0.0);
  res.lq.assign(ensemble.size(), {});
  parallel_for(ensemble.size(), threads, [&](size_t m) {
    const State& f = ensemble[m];
    const Grid& g = *f.grid;
    const RadialData data = RadialData::from_state(f);
    std::vector<double> norms(res.tau.size());
    Vec v(g.size());
    for (size_t k = 0; k < res.tau.size(); ++k) {
      for (int j = 0; j < g.size(); ++j) v(j) = s0_first_component(data, res.tau[k], g.rho(j));
      norms[k] = lq_ball(g, v, exps.q);
    }
    const double hn = h_norm(f);
    res.ratios[m] = hn > 0.0 ? strichartz_from_norms(res.tau, norms, exps.p).value / hn : 0.0;
    res.lq[m] = std::move(norms);
  });
  for (double r : res.ratios) res.constant = std::max(res.constant, r);
  return res;
}

}  // namespace blowup
