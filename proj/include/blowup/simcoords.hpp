#pragma once

#include <functional>

#include "blowup/specgrid.hpp"

namespace blowup {

// c3 = (3/4)^{1/4}, the amplitude of the ODE blowup c3 (T - t)^{-1/2}.
double blowup_constant();
inline const double c3 = blowup_constant();

struct CoordinateFrame {
  double T = 1.0;
};

// Perturbation (phi1, phi2) around (c3, c3/2) at one similarity time.
struct State {
  GridPtr grid;
  Vec phi1;
  Vec phi2;

  static State zero(GridPtr g);
  static State constant(GridPtr g, double a, double b);
  static State from_stacked(GridPtr g, const Vec& stacked);
  Vec stacked() const;
  int size() const { return static_cast<int>(phi1.size()); }

  State& operator+=(const State& o);
  State& operator-=(const State& o);
  State& operator*=(double s);
};

State operator+(State a, const State& b);
State operator-(State a, const State& b);
State operator*(double s, State a);

// Radial data (f, g) on [0, R]: position and velocity of u at t = 0.
struct PhysicalData {
  double R = 1.0;
  std::function<double(double)> f;
  std::function<double(double)> g;

  static PhysicalData constant(double R, double f0, double g0);
  // Samples on the grid scaled to [0, R]; evaluated with the grid's barycentric rule.
  static PhysicalData sampled(double R, GridPtr grid, Vec f, Vec g);
  // Sum of two data sets on the common radius.
  static PhysicalData sum(const PhysicalData& a, const PhysicalData& b);
};

// u^{T'}[0] = (c3 T'^{-1/2}, c3/2 T'^{-3/2}).
PhysicalData gauge_data(double Tprime, double R);
// u^{T'}[0] - u^1[0].
PhysicalData gauge_perturbation(double Tprime, double R);

State to_similarity(const PhysicalData& data, const CoordinateFrame& frame, GridPtr g);

// U(T, v): the similarity state in frame T of the data u^1[0] + v.
State initial_data_map(double T, const PhysicalData& v, GridPtr g);

// Exact similarity representation of u^{T'} in frame T, minus (c3, c3/2).
State gauge_solution(double Tprime, const CoordinateFrame& frame, double tau, GridPtr g);

// d/dtau of gauge_solution, in closed form.
State gauge_solution_dtau(double Tprime, const CoordinateFrame& frame, double tau, GridPtr g);

struct PhysicalSlice {
  double t = 0.0;
  Vec r;  // radii (T - t) rho_j
  Vec u;
};

PhysicalSlice from_similarity(const State& state, const CoordinateFrame& frame, double tau);

}  // namespace blowup
