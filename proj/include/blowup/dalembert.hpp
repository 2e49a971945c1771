#pragma once

#include <functional>
#include <vector>

#include "blowup/spaces.hpp"

namespace blowup {

// Radial data (f1, f2) on [0,1] with the derivative of f1.
struct RadialData {
  std::function<double(double)> f1, df1, f2;

  static RadialData constant(double a, double b);
  // Barycentric interpolants of the state's samples (df1 from D phi1).
  static RadialData from_state(const State& s);
};

struct Window {
  double a = 0.0, b = 0.0;
  static Window at(double tau, double rho);
};

// First component of S0(tau) f at rho, from the d'Alembert window formula.
double s0_first_component(const RadialData& f, double tau, double rho);
// Second component, from the same representation (tau and rho derivatives of
// the window integral collapse to endpoint values).
double s0_second_component(const RadialData& f, double tau, double rho);

// Both components on the grid's nodes.
State s0_state(const RadialData& f, double tau, GridPtr g);

struct FreeStrichartzResult {
  double constant = 0.0;           // max over members of ratio
  std::vector<double> ratios;      // per member
  std::vector<double> tau;         // time grid
  std::vector<std::vector<double>> lq;  // per member ||[S0 f]_1||_{L^q} on the time grid
};

// Strichartz norm of [S0(.) f]_1 over [0, tau_max] divided by ||f||_H, from
// the closed form sampled on the grid's nodes every dtau.
FreeStrichartzResult free_strichartz_constant(const std::vector<State>& ensemble, const StrichartzExponents& exps,
                                              double tau_max, double dtau = 0.01, int threads = 1);

}  // namespace blowup
