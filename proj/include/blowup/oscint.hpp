#pragma once

#include <string>
#include <vector>

#include "blowup/resolvent.hpp"

namespace blowup {

enum class OscSample { odd, even, mix };

OscSample osc_sample_from_string(const std::string& s);
const char* to_string(OscSample s);

struct OscResult {
  cplx value;
  double scaled = 0.0;          // <a>^2 |value|
  bool principal_value = false; // a = 0 with the odd sample
};

// int_R e^{i a w} f(w) dw, truncated symmetrically at Omega with the
// integration-by-parts tail terms of the truncated part added back.
OscResult osc_check(OscSample sample, double a, double Omega = 1e4);
cplx osc_closed_form(OscSample sample, double a);
// sup over [a_lo, a_hi] of <a>^2 |closed form|.
double osc_sup_closed_form(OscSample sample, double a_lo, double a_hi);

// Envelope s (1 - s)^{-1/2} <tau + log(1 - s)>^{-2}.
double kernel_envelope(double s, double tau);

struct KernelSample {
  double rho = 0.0, s = 0.0, tau = 0.0;
  cplx K;
  double envelope = 0.0;
  double ratio = 0.0;
  double error_bar = 0.0;  // truncation estimate beyond Omega_max
};

struct KernelOptions {
  double omega_max = 200.0;
  Potential potential = Potential::linearized();
  int threads = 1;
  double rtol = 1e-11;
};

// Quadrature nodes on [0, Omega_max]: Gauss–Legendre panels, width 1 below 16
// and width 4 above, 20 nodes each.
struct OmegaGrid {
  std::vector<double> lo, hi;       // panel bounds
  std::vector<double> nodes;        // all panel nodes, panel-major
  static constexpr int per_panel = 20;
  static OmegaGrid make(double omega_max);
  // Weights c_i with int_0^Omega e^{i w tau} h(w) dw ~ sum_i c_i h(w_i), from a
  // degree-19 interpolant per panel integrated by a fine Gauss rule.
  std::vector<cplx> fourier_weights(double tau) const;
};

// K(rho, s; tau) = (1/2 pi) int_R e^{i w tau} [G - G0](rho, s; i w) dw for all
// combinations of the given rho, s, tau values (one resolvent solve per w).
std::vector<KernelSample> perturbation_kernel(const std::vector<double>& rhos, const std::vector<double>& ss,
                                              const std::vector<double>& taus, const KernelOptions& opt);
KernelSample perturbation_kernel(double rho, double s, double tau, const KernelOptions& opt);

struct LaplaceOptions {
  double omega_max = 100.0;
  int threads = 1;
  double rtol = 1e-8;
};

// First component of S(tau) f from the contour integral at Re(lambda) = 0:
// the d'Alembert closed form for S0 plus the inverse transform of
// R(i w) f - R0(i w) f. f must lie in the range of I - P.
std::vector<Vec> laplace_semigroup_check(const State& f, const std::vector<double>& taus, const LaplaceOptions& opt);
Vec laplace_semigroup_check(const State& f, double tau, const LaplaceOptions& opt);

}  // namespace blowup
