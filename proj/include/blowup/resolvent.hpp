#pragma once

#include <functional>
#include <string>
#include <vector>

#include "blowup/hyp.hpp"
#include "blowup/simcoords.hpp"

namespace blowup {

using CVec = Eigen::VectorXcd;

// Potential V in the spectral ODE
//   -(1 - r^2) u'' - (2/r - (3 + 2 l) r) u' + (l^2 + 2 l + 3/4 + V) u = F.
struct Potential {
  std::string name = "custom";
  std::function<double(double)> V;
  bool is_constant = false;
  double constant_value = 0.0;

  double operator()(double rho) const { return is_constant ? constant_value : V(rho); }

  static Potential zero();
  static Potential linearized();  // V = -15/4
  static Potential custom(std::string name, std::function<double(double)> V);
  static Potential from_name(const std::string& name);
};

struct ResolventOptions {
  double rtol = 1e-11;
  // Require Re(lambda) in [0, 1/3]. Otherwise any Re(lambda) in (-1/2, 3/2)
  // away from the degenerate values is accepted and `in_strip` reports it.
  bool strict_strip = false;
};

// Samples of u0 (regular at 0, u0(0) = 1 - 2l) and u1 (regular at 1,
// u1(1) = 2^{1/2 - l}) at the requested points. Where a branch is singular
// (u1 at 0; u0' at 1) the entry holds its value at the launch offset.
struct FundamentalPair {
  cplx lambda;
  std::vector<double> points;
  CVec u0, du0, u1, du1;
  cplx w0;
  double spread = 0.0;  // max |S(rho) - w0| / max(|w0|, 1) over interior points
  bool in_strip = true;

  int index_of(double rho) const;  // throws invalid_argument if rho is not a sample point
};

FundamentalPair fundamental_pair(cplx lambda, const Potential& V, const std::vector<double>& points,
                                 const ResolventOptions& opt = {});
FundamentalPair fundamental_pair(cplx lambda, const Potential& V, const Grid& g, const ResolventOptions& opt = {});

struct Branch {
  CVec u, du;
};
Branch solve_u0(cplx lambda, const Potential& V, const Grid& g, const ResolventOptions& opt = {});
Branch solve_u1(cplx lambda, const Potential& V, const Grid& g, const ResolventOptions& opt = {});

// Median scaled Wronskian; throws inconsistent_wronskian when spread > 1e-6.
cplx wronskian_w0(const FundamentalPair& pair);

// G(rho, s; l) = s^2 (1 - s^2)^{l - 1/2} / ((1 - 2 l) w0) * u0(min) u1(max).
// rho and s must both be sample points of the pair.
cplx green(double rho, double s, const FundamentalPair& pair);

// Closed-form free solutions and kernel (V = 0, w0 = 1).
cplx free_u0(double rho, cplx lambda);
cplx free_u1(double rho, cplx lambda);
cplx green_free(double rho, double s, cplx lambda);

struct ResolventRHS {
  GridPtr grid;
  Vec f1, df1, f2;

  static ResolventRHS from_state(const State& s);
  // F(s) = s f1'(s) + (l + 3/2) f1(s) + f2(s) at the nodes.
  CVec F(cplx lambda) const;
};

struct ComplexState {
  GridPtr grid;
  CVec phi1, phi2;
};

// (lambda - L)^{-1} f on the grid of `rhs`, for the generator with potential V.
// The variation-of-parameters integrals are integrated alongside u0 and u1.
ComplexState apply_resolvent(cplx lambda, const ResolventRHS& rhs, const Potential& V,
                             const ResolventOptions& opt = {}, FundamentalPair* pair_out = nullptr);

// Discrete (lambda - L) applied to a complex state, L = assemble(full or free).
ComplexState apply_shifted_operator(cplx lambda, const ComplexState& u, bool free_mode);

}  // namespace blowup
