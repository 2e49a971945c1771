#pragma once

#include <cstdint>
#include <vector>

#include "blowup/evolve.hpp"
#include "blowup/spaces.hpp"

namespace blowup {

// Per-member RNG seed: splitmix64 of (seed, index), independent of run order.
std::uint64_t member_seed(std::uint64_t seed, std::uint64_t index);

struct RandomDataSpec {
  std::uint64_t seed = 1;
  double decay = 3.0;   // coefficient k has standard deviation (k + 1)^{-decay}
  double target = 1.0;  // h_norm of the result
  int terms = 13;       // coefficients of T_0(2 rho^2 - 1) ... T_12(2 rho^2 - 1)
};

// Both components are even polynomials in rho (so phi1'(0) = 0), scaled to the target h_norm.
State random_state(const RandomDataSpec& spec, GridPtr g);
std::vector<State> random_ensemble(const RandomDataSpec& spec, size_t count, GridPtr g);

struct StabilityConfig {
  double delta = 1e-3;
  double M = 1.0;
  double delta_T = 0.1;
  std::uint64_t seed = 1;
  int members = 20;
  std::vector<double> deltas = {1e-2, 1e-3};
  int N = 24;
  double dtau = 1e-3;
  double tau_max = 20.0;
  double threshold = 0.0;  // instability threshold for |a|; 0 selects 10 delta
  double T_tol = 1e-14;    // bisection stops below this bracket width
  int physical_checks = 5; // members that also evaluate the physical-side integral
  int threads = 1;
};

struct ShotTrial {
  double T = 0.0;
  int sign = 0;           // sign of a at the first threshold crossing, else at tau_max
  double a_end = 0.0;
  double tau_end = 0.0;
  bool crossed = false;
  bool escaped = false;
  bool decayed = false;   // sup |phi1| < delta/100 at the end
};

struct ShootingResult {
  double T_star = 1.0;
  double lo = 0.0, hi = 0.0;  // final bracket
  bool exact = false;         // a trial T produced a identically zero
  bool monotone = true;       // one sign change across the sorted trials
  std::vector<ShotTrial> trace;
};

ShootingResult find_blowup_time(const PhysicalData& v, const StabilityConfig& cfg, double delta);

// Random physical perturbation on [0, 1 + delta_T] with H^1 x L^2 size delta/M.
PhysicalData random_perturbation(const StabilityConfig& cfg, double delta, std::uint64_t member);

// int (||u - u^T||_inf / ||u^T||_inf)^2 dt / (T - t) over the recorded slices,
// trapezoid in physical time t.
double physical_side_integral(const Trajectory& traj, double T);

struct StabilityMember {
  double delta = 0.0;
  int member = 0;
  double T_star = 1.0;
  double S = 0.0;  // ||phi1||^2 in L^2((0, tau_max)) L^inf
  double S_tail = 0.0;
  double v_norm = 0.0;
  double physical = -1.0;  // physical-side integral (negative when not computed)
  int trials = 0;
  bool monotone = true;
};

struct StabilityReport {
  std::vector<StabilityMember> members;
  std::vector<double> deltas;
  std::vector<double> max_S;    // per delta
  std::vector<double> max_dev;  // per delta: max |T* - 1| / delta
  double slope = 0.0;           // log-log slope of max_S vs delta
  double max_S_over_delta2 = 0.0;
  double C = 0.0;               // max |T* - 1| / delta over all members
};

StabilityReport stability_experiment(const StabilityConfig& cfg);

// Evolve u^{T'} data in frame T and fit the slope of log psi1 on [t0, t1].
double gauge_decay_rate(double Tprime, double T, double tau_max, double t0, double t1, int N, double dtau);

enum class BoundKind { strichartz, energy };

struct LinearBoundConfig {
  BoundKind kind = BoundKind::strichartz;
  StrichartzExponents exps;
  Flow flow = Flow::linearized;  // linearized uses (I - P) f; free uses f
  double tau_max = 20.0;
  double record = 0.01;
  double dtau = 0.0;  // 0 selects default_dtau(N)
  double slope_from = 10.0;
  int threads = 1;
};

struct LinearMember {
  int index = 0;
  bool skipped = false;  // (I - P) f vanished
  double norm0 = 0.0;    // ||f~||_H
  double value = 0.0;    // Strichartz norm, or sup_tau h_norm
  double tail = 0.0;
  double ratio = 0.0;
  double slope = 0.0;    // log-slope of h_norm over [slope_from, tau_max]
};

struct LinearBoundReport {
  std::vector<LinearMember> members;
  double max_ratio = 0.0;
  double max_slope = -std::numeric_limits<double>::infinity();
  int skipped = 0;
};

LinearBoundReport linear_bound_experiment(const LinearBoundConfig& cfg, const std::vector<State>& ensemble);

}  // namespace blowup
