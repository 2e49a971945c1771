#pragma once

#include <limits>
#include <span>
#include <utility>

#include "blowup/simcoords.hpp"

namespace blowup {

struct Trajectory;

inline constexpr double inf = std::numeric_limits<double>::infinity();

// Admissible pair with 1/p + 3/q = 1/2; either entry may be infinity.
struct StrichartzExponents {
  double p = 2.0;
  double q = inf;

  static StrichartzExponents make(double p, double q);
  bool admissible() const;
};

// All ball norms drop the angular factor 4 pi.
double l2_ball(const Grid& g, const Vec& values);
double h1_ball(const Grid& g, const Vec& values);
double h_norm(const State& s);
double lq_ball(const Grid& g, const Vec& values, double q);

std::pair<Vec, Vec> g_transform(const State& s);
double g_norm(const State& s);

// Gram matrix of the quadrature H^1 x L^2 inner product on stacked samples.
Mat h_gram(const Grid& g);

struct StrichartzValue {
  double value = 0.0;
  // Estimated contribution of (tau_max, infinity) from an exponential fit to
  // the last tenth of the window; reported separately, never added.
  double tail = 0.0;
};

// norms[k] = ||phi1(tau[k])||_{L^q}; trapezoid in tau, running max for p = inf.
StrichartzValue strichartz_from_norms(std::span<const double> tau, std::span<const double> norms, double p);

double strichartz_norm(const Trajectory& traj, const StrichartzExponents& exps);
StrichartzValue strichartz_detail(const Trajectory& traj, const StrichartzExponents& exps);

}  // namespace blowup
