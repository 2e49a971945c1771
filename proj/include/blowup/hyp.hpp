#pragma once

#include <complex>
#include <vector>

namespace blowup {

using cplx = std::complex<double>;

// log Gamma on the principal sheet up to multiples of 2 pi i (only exp() of
// it is meaningful). Lanczos g = 7, reflection for Re z < 1/2.
cplx lgamma(cplx z);
cplx gamma(cplx z);
// 1/Gamma, entire: exactly zero at the poles of Gamma.
cplx rgamma(cplx z);

// Gauss hypergeometric 2F1(a, b; c; z) by direct series in whichever of
// z, 1 - z, z/(z - 1), 1/(1 - z) is smallest in modulus.
cplx f21(cplx a, cplx b, cplx c, cplx z);

struct HypParams {
  cplx a, b, c;
};
HypParams hyp_params(cplx lambda);

// Scaled Wronskian as a Gamma ratio:
// Gamma(l/2 + 1/4) Gamma(l/2 + 3/4) / (Gamma(l/2 - 1/2) Gamma(l/2 + 3/2)).
cplx w0_closed(cplx lambda);

struct ScanMinimum {
  cplx lambda;
  double value = 0.0;
};

struct ScanResult {
  std::vector<double> eps;
  std::vector<double> omega;
  std::vector<double> abs_w0;  // row-major, eps outer
  ScanMinimum minimum;
  std::vector<ScanMinimum> refined;  // local refinements, ascending value
};

struct ScanOptions {
  double eps_lo = 0.01;
  double eps_hi = 1.0 / 3.0;
  double omega_max = 50.0;
  double d_eps = 0.01;
  double d_omega = 0.05;
  int refine_count = 10;
  bool keep_grid = false;
};

ScanResult zero_scan(const ScanOptions& opt);

}  // namespace blowup
