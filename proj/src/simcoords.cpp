#include "blowup/simcoords.hpp"

#include <algorithm>
#include <cmath>

#include "blowup/errors.hpp"

namespace blowup {

double blowup_constant() { return std::sqrt(std::sqrt(0.75)); }

State State::zero(GridPtr g) {
  const int n = g->size();
  return State{std::move(g), Vec::Zero(n), Vec::Zero(n)};
}

State State::constant(GridPtr g, double a, double b) {
  const int n = g->size();
  return State{std::move(g), Vec::Constant(n, a), Vec::Constant(n, b)};
}

State State::from_stacked(GridPtr g, const Vec& stacked) {
  const int n = g->size();
  if (stacked.size() != 2 * n) throw Error(ErrorKind::invalid_argument, "stacked vector has wrong length");
  return State{std::move(g), stacked.head(n), stacked.tail(n)};
}

Vec State::stacked() const {
  Vec v(phi1.size() + phi2.size());
  v << phi1, phi2;
  return v;
}

State& State::operator+=(const State& o) {
  phi1 += o.phi1;
  phi2 += o.phi2;
  return *this;
}

State& State::operator-=(const State& o) {
  phi1 -= o.phi1;
  phi2 -= o.phi2;
  return *this;
}

State& State::operator*=(double s) {
  phi1 *= s;
  phi2 *= s;
  return *this;
}

State operator+(State a, const State& b) { return a += b; }
State operator-(State a, const State& b) { return a -= b; }
State operator*(double s, State a) { return a *= s; }

PhysicalData PhysicalData::constant(double R, double f0, double g0) {
  return PhysicalData{R, [f0](double) { return f0; }, [g0](double) { return g0; }};
}

PhysicalData PhysicalData::sampled(double R, GridPtr grid, Vec f, Vec g) {
  if (f.size() != grid->size() || g.size() != grid->size())
    throw Error(ErrorKind::invalid_argument, "physical samples do not match grid");
  auto eval = [grid, R](const Vec& v) {
    return [grid, R, v](double r) { return interpolate(*grid, v, std::clamp(r / R, 0.0, 1.0)); };
  };
  return PhysicalData{R, eval(f), eval(g)};
}

PhysicalData PhysicalData::sum(const PhysicalData& a, const PhysicalData& b) {
  auto fa = a.f, fb = b.f, ga = a.g, gb = b.g;
  return PhysicalData{std::min(a.R, b.R), [fa, fb](double r) { return fa(r) + fb(r); },
                      [ga, gb](double r) { return ga(r) + gb(r); }};
}

PhysicalData gauge_data(double Tprime, double R) {
  if (!(Tprime > 0.0)) throw Error(ErrorKind::invalid_argument, "gauge blowup time must be positive");
  return PhysicalData::constant(R, c3 * std::pow(Tprime, -0.5), 0.5 * c3 * std::pow(Tprime, -1.5));
}

PhysicalData gauge_perturbation(double Tprime, double R) {
  if (!(Tprime > 0.0)) throw Error(ErrorKind::invalid_argument, "gauge blowup time must be positive");
  return PhysicalData::constant(R, c3 * (std::pow(Tprime, -0.5) - 1.0), 0.5 * c3 * (std::pow(Tprime, -1.5) - 1.0));
}

State to_similarity(const PhysicalData& data, const CoordinateFrame& frame, GridPtr g) {
  const double T = frame.T;
  if (!(T > 0.0)) throw Error(ErrorKind::invalid_argument, "frame time T must be positive");
  if (data.R < T) throw Error(ErrorKind::domain_too_small, "data radius R is smaller than T");
  State s = State::zero(g);
  const double sT = std::sqrt(T);
  for (int j = 0; j < g->size(); ++j) {
    const double r = T * g->rho(j);
    s.phi1(j) = sT * data.f(r) - c3;
    s.phi2(j) = T * sT * data.g(r) - 0.5 * c3;
  }
  return s;
}

State initial_data_map(double T, const PhysicalData& v, GridPtr g) {
  auto vf = v.f, vg = v.g;
  PhysicalData full{v.R, [vf](double r) { return c3 + vf(r); }, [vg](double r) { return 0.5 * c3 + vg(r); }};
  return to_similarity(full, CoordinateFrame{T}, std::move(g));
}

namespace {

double gauge_base(double Tprime, double T, double tau) {
  const double base = Tprime - T + T * std::exp(-tau);
  if (!(base > 0.0)) throw Error(ErrorKind::gauge_singular, "gauge solution has blown up in this frame");
  return base;
}

}  // namespace

State gauge_solution(double Tprime, const CoordinateFrame& frame, double tau, GridPtr g) {
  const double T = frame.T;
  const double base = gauge_base(Tprime, T, tau);
  // psi1 = c3 r^{1/2}, psi2 = c3/2 r^{3/2} with r = T e^{-tau} / base; r is exactly 1 when T' = T.
  const double r = T * std::exp(-tau) / base;
  return State::constant(std::move(g), c3 * (std::sqrt(r) - 1.0), 0.5 * c3 * (r * std::sqrt(r) - 1.0));
}

State gauge_solution_dtau(double Tprime, const CoordinateFrame& frame, double tau, GridPtr g) {
  const double T = frame.T;
  const double base = gauge_base(Tprime, T, tau);
  const double e = std::exp(-tau);
  // d base / d tau = -T e^{-tau}
  const double psi1 = c3 * std::sqrt(T) * std::exp(-0.5 * tau) * std::pow(base, -0.5);
  const double psi2 = 0.5 * c3 * std::pow(T, 1.5) * std::exp(-1.5 * tau) * std::pow(base, -1.5);
  const double d1 = psi1 * (-0.5 + 0.5 * T * e / base);
  const double d2 = psi2 * (-1.5 + 1.5 * T * e / base);
  return State::constant(std::move(g), d1, d2);
}

PhysicalSlice from_similarity(const State& state, const CoordinateFrame& frame, double tau) {
  if (tau < 0.0) throw Error(ErrorKind::invalid_argument, "similarity time must be nonnegative");
  const double T = frame.T;
  const double gap = T * std::exp(-tau);  // T - t
  PhysicalSlice out;
  out.t = T - gap;
  out.r = gap * state.grid->rho;
  out.u = (state.phi1.array() + c3) / std::sqrt(gap);
  return out;
}

}  // namespace blowup
