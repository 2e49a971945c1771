#pragma once

#include <vector>

#include "blowup/waveop.hpp"

namespace blowup {

enum class Flow { free, linearized, nonlinear };

const char* to_string(Flow f);
Flow flow_from_string(const std::string& s);

struct EvolveConfig {
  Flow mode = Flow::nonlinear;
  double dtau = 0.0;      // 0 selects the default 0.25 / N^2
  double tau_max = 10.0;
  int stride = 0;         // record every `stride` steps; 0 selects ~0.01 spacing
  double escape_cap = 10.0;
  // Stop as soon as |a(tau)| exceeds this value (0 disables). Used by shooting.
  double amplitude_stop = 0.0;
  // Apply (I - P) after every step. In exact arithmetic this does not change
  // S(tau)(I - P)f; in floating point it removes rounding error that the
  // e^tau mode would otherwise amplify.
  bool deflate = false;
  // Zero the top sixth of Chebyshev coefficients after every step.
  bool filter = false;
  const Projection* projection = nullptr;  // for a(tau); built on demand if null
};

double default_dtau(int N);

struct Trajectory {
  std::vector<double> tau;
  std::vector<State> states;
  std::vector<double> h_norm;
  std::vector<double> sup_phi1;
  std::vector<double> amplitude;
  bool escaped = false;           // sup |phi1| passed the cap
  bool amplitude_stopped = false; // |a| passed amplitude_stop

  size_t size() const { return tau.size(); }
};

double nonlinearity(double phi1);

State rhs(const State& s, Flow mode);

Trajectory integrate(const State& initial, const EvolveConfig& cfg);

// Least-squares slope of log|a(tau)| over records with tau in [t0, t1].
double growth_rate(const Trajectory& traj, double t0, double t1);

// Linear RK4 flow packaged as one matrix per record interval, for ensembles.
// Equivalent to stepping `integrate` with the same dtau, up to rounding.
class LinearPropagator {
 public:
  LinearPropagator(GridPtr g, Flow mode, double dtau, int stride);
  const Mat& record_matrix() const { return M_; }
  double record_spacing() const { return h_ * stride_; }
  double dtau() const { return h_; }
  GridPtr grid() const { return grid_; }

 private:
  GridPtr grid_;
  double h_;
  int stride_;
  Mat M_;
};

}  // namespace blowup
