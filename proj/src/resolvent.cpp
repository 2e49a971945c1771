#include "blowup/resolvent.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <optional>

#include "blowup/errors.hpp"
#include "blowup/waveop.hpp"
#include "ode.hpp"

namespace blowup {

Potential Potential::zero() {
  Potential p;
  p.name = "zero";
  p.is_constant = true;
  p.constant_value = 0.0;
  p.V = [](double) { return 0.0; };
  return p;
}

Potential Potential::linearized() {
  Potential p;
  p.name = "linearized";
  p.is_constant = true;
  p.constant_value = -15.0 / 4.0;
  p.V = [](double) { return -15.0 / 4.0; };
  return p;
}

Potential Potential::custom(std::string name, std::function<double(double)> V) {
  Potential p;
  p.name = std::move(name);
  p.V = std::move(V);
  return p;
}

Potential Potential::from_name(const std::string& name) {
  if (name == "zero" || name == "free") return zero();
  if (name == "linearized") return linearized();
  throw Error(ErrorKind::invalid_argument, "unknown potential preset '" + name + "'");
}

int FundamentalPair::index_of(double rho) const {
  auto it = std::lower_bound(points.begin(), points.end(), rho - 1e-14);
  if (it == points.end() || std::abs(*it - rho) > 1e-14)
    throw Error(ErrorKind::invalid_argument, "point " + std::to_string(rho) + " is not a sample of this pair");
  return static_cast<int>(it - points.begin());
}

namespace {

using V3 = Eigen::Matrix<cplx, 3, 1>;

// Complex barycentric evaluation of node samples.
cplx bary_eval(const Grid& g, const CVec& v, double x) {
  cplx num = 0.0;
  double den = 0.0;
  for (int j = 0; j < g.size(); ++j) {
    const double d = x - g.rho(j);
    if (d == 0.0) return v(j);
    const double c = g.bary(j) / d;
    num += c * v(j);
    den += c;
  }
  return num / den;
}

// Everything the sweeps need for one lambda.
struct Problem {
  cplx lambda, kappa, mu_base;
  const Potential* V;
  const Grid* fgrid = nullptr;  // grid of F, if an inhomogeneity is carried
  CVec Fn;

  cplx mu(double rho) const { return mu_base + (*V)(rho); }
  cplx F(double rho) const { return fgrid ? bary_eval(*fgrid, Fn, rho) : cplx(0.0); }
  cplx weight(double rho) const {
    return rho * rho * std::exp((lambda - 0.5) * (std::log1p(-rho) + std::log1p(rho)));
  }
  // y = (u, u', integral); the integral runs with +/- u * weight * F.
  V3 rhs(double rho, const V3& y, double sign) const {
    V3 d;
    d(0) = y(1);
    d(1) = (mu(rho) * y(0) - (2.0 / rho - kappa * rho) * y(1)) / ((1.0 - rho) * (1.0 + rho));
    d(2) = fgrid ? sign * y(0) * weight(rho) * F(rho) : cplx(0.0);
    return d;
  }
};

// Frobenius coefficients at rho = 1 in x = 1 - rho for exponent sigma.
std::vector<cplx> series_at_one(const Problem& p, cplx sigma, cplx b0, int terms) {
  const cplx lam = p.lambda, kap = p.kappa, mu1 = p.mu(1.0);
  auto P = [&](cplx m) { return -m * (2.0 * m - 1.0 + 2.0 * lam); };
  auto Q = [&](cplx m) { return 3.0 * m * (m - 1.0) + 2.0 * kap * m + mu1; };
  auto R = [&](cplx m) { return -m * (m - 1.0) - kap * m - mu1; };
  std::vector<cplx> b(terms, 0.0);
  b[0] = b0;
  for (int k = 1; k < terms; ++k) {
    const cplx pk = P(double(k) + sigma);
    if (std::abs(pk) < 1e-12) throw Error(ErrorKind::degenerate_parameter, "resonant Frobenius exponents at rho = 1");
    cplx s = Q(double(k - 1) + sigma) * b[k - 1];
    if (k >= 2) s += R(double(k - 2) + sigma) * b[k - 2];
    b[k] = -s / pk;
  }
  return b;
}

// Value and d/drho of x^sigma sum b_k x^k at x.
std::pair<cplx, cplx> eval_at_one(const std::vector<cplx>& b, cplx sigma, double x) {
  cplx s = 0.0, ds = 0.0;
  for (int k = static_cast<int>(b.size()) - 1; k >= 0; --k) {
    s = s * x + b[k];
    ds = ds * x + (double(k) + sigma) * b[k];
  }
  const cplx xs = (sigma == 0.0) ? cplx(1.0) : std::pow(cplx(x), sigma);
  return {xs * s, -xs * ds / x};
}

struct Sweep {
  std::map<double, V3> at;
};

void check_lambda(cplx lambda, const ResolventOptions& opt, bool& in_strip) {
  const double e = lambda.real();
  in_strip = e >= -1e-12 && e <= 1.0 / 3.0 + 1e-12;
  if (opt.strict_strip && !in_strip)
    throw Error(ErrorKind::out_of_strip, "Re(lambda) = " + std::to_string(e) + " outside [0, 1/3]");
  if (!(e > -0.49 && e < 1.49)) throw Error(ErrorKind::out_of_strip, "Re(lambda) = " + std::to_string(e) + " outside the supported range");
  if (std::abs(lambda - 0.5) < 1e-8 || std::abs(lambda + 0.5) < 1e-8)
    throw Error(ErrorKind::degenerate_parameter, "lambda = +-1/2 makes the endpoint exponents resonant");
}

struct Solution {
  FundamentalPair pair;
  // Per interior point: A and B (and values at the endpoints) when F is present.
  std::map<double, cplx> A, B;
  cplx A1 = 0.0, B0 = 0.0;
};

Solution solve(cplx lambda, const Potential& V, const std::vector<double>& req, const ResolventOptions& opt,
               const Grid* fgrid, const CVec* Fn) {
  bool in_strip = true;
  check_lambda(lambda, opt, in_strip);
  for (size_t k = 0; k < req.size(); ++k) {
    if (!(req[k] >= 0.0 && req[k] <= 1.0)) throw Error(ErrorKind::invalid_argument, "sample points must lie in [0,1]");
    if (k > 0 && !(req[k] > req[k - 1])) throw Error(ErrorKind::invalid_argument, "sample points must be increasing");
  }

  Problem p;
  p.lambda = lambda;
  p.kappa = 3.0 + 2.0 * lambda;
  p.mu_base = lambda * lambda + 2.0 * lambda + 0.75;
  p.V = &V;
  if (fgrid) {
    p.fgrid = fgrid;
    p.Fn = *Fn;
  }
  const bool has_F = fgrid != nullptr;

  std::vector<double> interior = {0.25, 0.5, 0.75};
  for (double r : req)
    if (r > 0.0 && r < 1.0) interior.push_back(r);
  std::sort(interior.begin(), interior.end());
  interior.erase(std::unique(interior.begin(), interior.end()), interior.end());
  const bool want0 = !req.empty() && req.front() == 0.0;
  const bool want1 = !req.empty() && req.back() == 1.0;

  const double rho0 = std::min(1e-4, interior.front() / 2.0);
  const double x0 = std::min(1e-6, (1.0 - interior.back()) / 2.0);
  const bool tilde = has_F || want1 || interior.back() > 0.95;
  const double rho_c = 0.5;
  const double rho_end = tilde ? rho_c : interior.back();
  detail::OdeOptions oo;
  oo.rtol = opt.rtol;

  // Forward sweep for u0 from the Frobenius expansion at 0.
  const cplx mu0 = p.mu(0.0);
  std::vector<cplx> a(12, 0.0);
  a[0] = 1.0 - 2.0 * lambda;
  for (int k = 0; k + 2 < 12; k += 2)
    a[k + 2] = (double(k) * (k - 1) + p.kappa * double(k) + mu0) / (double(k + 2) * (k + 3)) * a[k];
  V3 y;
  {
    cplx u = 0.0, du = 0.0;
    for (int k = 10; k >= 0; k -= 2) {
      u = u * rho0 * rho0 + a[k];
      if (k >= 2) du = du * rho0 * rho0 + double(k) * a[k];
    }
    du *= rho0;  // sum k a_k rho^{k-1}
    y << u, du, has_F ? a[0] * p.F(0.0) * rho0 * rho0 * rho0 / 3.0 : cplx(0.0);
  }
  Sweep fwd;
  {
    std::vector<double> outs;
    for (double r : interior)
      if (r <= rho_end) outs.push_back(r);
    detail::dopri<V3>([&](double r, const V3& s) { return p.rhs(r, s, 1.0); }, rho0, y, outs,
                      [&](size_t k, const V3& s) { fwd.at[outs[k]] = s; }, oo);
  }

  // Backward sweep for u1 from the regular expansion at 1.
  const auto b = series_at_one(p, 0.0, std::pow(cplx(2.0), 0.5 - lambda), 8);
  const double r1 = 1.0 - x0;
  auto tail_weight = [&](double x) { return (1.0 - x) * (1.0 - x) * std::pow(cplx(2.0 - x), lambda - 0.5); };
  Sweep bwd;
  V3 u1_launch;
  {
    const auto [u, du] = eval_at_one(b, 0.0, x0);
    cplx Bt = 0.0;
    if (has_F) {
      const cplx h0 = b[0] * std::pow(cplx(2.0), lambda - 0.5) * p.F(1.0);
      const cplx hx = u * tail_weight(x0) * p.F(r1);
      const cplx h1 = (hx - h0) / x0;
      Bt = h0 * std::pow(cplx(x0), lambda + 0.5) / (lambda + 0.5) + h1 * std::pow(cplx(x0), lambda + 1.5) / (lambda + 1.5);
    }
    u1_launch << u, du, Bt;
    std::vector<double> outs(interior.rbegin(), interior.rend());
    if (has_F || want0) outs.push_back(rho0);
    detail::dopri<V3>([&](double r, const V3& s) { return p.rhs(r, s, -1.0); }, r1, u1_launch, outs,
                      [&](size_t k, const V3& s) { bwd.at[outs[k]] = s; }, oo);
  }

  // Second solution at 1 with exponent 1/2 - lambda, down to the connection point.
  Sweep til;
  V3 ut_launch;
  cplx alpha = 0.0, beta = 0.0;
  const cplx sigma = 0.5 - lambda;
  if (tilde) {
    const auto bt = series_at_one(p, sigma, 1.0, 8);
    const auto [u, du] = eval_at_one(bt, sigma, x0);
    cplx Ct = 0.0;
    if (has_F) {
      const cplx k0 = std::pow(cplx(2.0), lambda - 0.5) * p.F(1.0);
      cplx poly = 0.0;
      for (int k = static_cast<int>(bt.size()) - 1; k >= 0; --k) poly = poly * x0 + bt[k];
      const cplx kx = poly * tail_weight(x0) * p.F(r1);
      Ct = k0 * x0 + (kx - k0) / x0 * x0 * x0 / 2.0;
    }
    ut_launch << u, du, Ct;
    std::vector<double> outs;
    for (auto it = interior.rbegin(); it != interior.rend() && *it >= rho_c; ++it) outs.push_back(*it);
    detail::dopri<V3>([&](double r, const V3& s) { return p.rhs(r, s, -1.0); }, r1, ut_launch, outs,
                      [&](size_t k, const V3& s) { til.at[outs[k]] = s; }, oo);
    const V3& f = fwd.at.at(rho_c);
    const V3& g1 = bwd.at.at(rho_c);
    const V3& gt = til.at.at(rho_c);
    auto W = [](const V3& u, const V3& v) { return u(0) * v(1) - u(1) * v(0); };
    const cplx d = W(g1, gt);
    alpha = W(f, gt) / d;
    beta = W(g1, f) / d;
  }

  Solution sol;
  FundamentalPair& fp = sol.pair;
  fp.lambda = lambda;
  fp.in_strip = in_strip;

  // Samples at every interior point.
  std::map<double, std::array<cplx, 4>> vals;
  const V3* fc = tilde ? &fwd.at.at(rho_c) : nullptr;
  for (double r : interior) {
    const V3& g1 = bwd.at.at(r);
    std::array<cplx, 4> v{};
    v[2] = g1(0);
    v[3] = g1(1);
    cplx A;
    if (r <= rho_end) {
      const V3& f = fwd.at.at(r);
      v[0] = f(0);
      v[1] = f(1);
      A = f(2);
    } else {
      const V3& gt = til.at.at(r);
      v[0] = alpha * g1(0) + beta * gt(0);
      v[1] = alpha * g1(1) + beta * gt(1);
      const V3& bc = bwd.at.at(rho_c);
      const V3& tc = til.at.at(rho_c);
      A = (*fc)(2) + alpha * (bc(2) - g1(2)) + beta * (tc(2) - gt(2));
    }
    vals[r] = v;
    sol.A[r] = A;
    sol.B[r] = g1(2);
  }

  // Scaled Wronskian over the interior points.
  std::vector<double> re, im;
  std::vector<cplx> S;
  for (double r : interior) {
    const auto& v = vals[r];
    const cplx W = v[0] * v[3] - v[1] * v[2];
    const cplx s = W * r * r * std::exp((0.5 + lambda) * (std::log1p(-r) + std::log1p(r))) / (2.0 * lambda - 1.0);
    S.push_back(s);
    re.push_back(s.real());
    im.push_back(s.imag());
  }
  auto median = [](std::vector<double> v) {
    std::sort(v.begin(), v.end());
    const size_t n = v.size();
    return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
  };
  fp.w0 = cplx(median(re), median(im));
  double dev = 0.0;
  for (const cplx& s : S) dev = std::max(dev, std::abs(s - fp.w0));
  fp.spread = dev / std::max(std::abs(fp.w0), 1.0);

  // Requested samples, endpoints included.
  const int n = static_cast<int>(req.size());
  fp.points = req;
  fp.u0.resize(n);
  fp.du0.resize(n);
  fp.u1.resize(n);
  fp.du1.resize(n);
  for (int k = 0; k < n; ++k) {
    const double r = req[k];
    if (r == 0.0) {
      const V3& g1 = bwd.at.at(rho0);
      fp.u0(k) = a[0];
      fp.du0(k) = 0.0;
      fp.u1(k) = g1(0);
      fp.du1(k) = g1(1);
    } else if (r == 1.0) {
      fp.u1(k) = b[0];
      fp.du1(k) = -b[1];
      const cplx ut1 = sigma.real() > 0.0 ? cplx(0.0) : ut_launch(0);
      fp.u0(k) = alpha * b[0] + beta * ut1;
      fp.du0(k) = alpha * u1_launch(1) + beta * ut_launch(1);
    } else {
      const auto& v = vals[r];
      fp.u0(k) = v[0];
      fp.du0(k) = v[1];
      fp.u1(k) = v[2];
      fp.du1(k) = v[3];
    }
  }
  if (has_F) {
    const V3& g0 = bwd.at.at(rho0);
    sol.B0 = g0(2) + rho0 * g0(0) * p.F(0.0) * rho0 * rho0 / 2.0;
    const V3& bc = bwd.at.at(rho_c);
    const V3& tc = til.at.at(rho_c);
    sol.A1 = (*fc)(2) + alpha * bc(2) + beta * tc(2);
  }
  return sol;
}

}  // namespace

FundamentalPair fundamental_pair(cplx lambda, const Potential& V, const std::vector<double>& points,
                                 const ResolventOptions& opt) {
  return solve(lambda, V, points, opt, nullptr, nullptr).pair;
}

FundamentalPair fundamental_pair(cplx lambda, const Potential& V, const Grid& g, const ResolventOptions& opt) {
  std::vector<double> pts(g.rho.data(), g.rho.data() + g.size());
  return fundamental_pair(lambda, V, pts, opt);
}

Branch solve_u0(cplx lambda, const Potential& V, const Grid& g, const ResolventOptions& opt) {
  const FundamentalPair fp = fundamental_pair(lambda, V, g, opt);
  return {fp.u0, fp.du0};
}

Branch solve_u1(cplx lambda, const Potential& V, const Grid& g, const ResolventOptions& opt) {
  const FundamentalPair fp = fundamental_pair(lambda, V, g, opt);
  return {fp.u1, fp.du1};
}

cplx wronskian_w0(const FundamentalPair& pair) {
  if (pair.spread > 1e-6)
    throw Error(ErrorKind::inconsistent_wronskian,
                "scaled Wronskian varies by " + std::to_string(pair.spread) + " across the interior");
  return pair.w0;
}

cplx green(double rho, double s, const FundamentalPair& pair) {
  if (!(rho > 0.0 && rho < 1.0 && s > 0.0 && s < 1.0))
    throw Error(ErrorKind::invalid_argument, "green needs rho, s in (0,1)");
  if (std::abs(pair.w0) <= 1e-8)
    throw Error(ErrorKind::eigenvalue_singularity, "w0 vanishes: lambda is an eigenvalue");
  const cplx l = pair.lambda;
  const int i = pair.index_of(rho), j = pair.index_of(s);
  const cplx w = s * s * std::exp((l - 0.5) * (std::log1p(-s) + std::log1p(s))) / ((1.0 - 2.0 * l) * pair.w0);
  return rho <= s ? w * pair.u0(i) * pair.u1(j) : w * pair.u1(i) * pair.u0(j);
}

cplx free_u0(double rho, cplx lambda) {
  const cplx e = 0.5 - lambda;
  if (rho == 0.0) return 2.0 * e;
  return (std::pow(cplx(1.0 + rho), e) - std::pow(cplx(1.0 - rho), e)) / rho;
}

cplx free_u1(double rho, cplx lambda) { return std::pow(cplx(1.0 + rho), 0.5 - lambda) / rho; }

cplx green_free(double rho, double s, cplx lambda) {
  const cplx w = s * s * std::exp((lambda - 0.5) * (std::log1p(-s) + std::log1p(s))) / (1.0 - 2.0 * lambda);
  return rho <= s ? w * free_u0(rho, lambda) * free_u1(s, lambda) : w * free_u1(rho, lambda) * free_u0(s, lambda);
}

ResolventRHS ResolventRHS::from_state(const State& s) {
  return {s.grid, s.phi1, differentiate(*s.grid, s.phi1), s.phi2};
}

CVec ResolventRHS::F(cplx lambda) const {
  const CVec out = (grid->rho.cwiseProduct(df1) + f2).cast<cplx>() + (lambda + 1.5) * f1.cast<cplx>();
  return out;
}

ComplexState apply_resolvent(cplx lambda, const ResolventRHS& rhs, const Potential& V, const ResolventOptions& opt,
                             FundamentalPair* pair_out) {
  const Grid& g = *rhs.grid;
  const CVec Fn = rhs.F(lambda);
  std::vector<double> pts(g.rho.data(), g.rho.data() + g.size());
  const Solution sol = solve(lambda, V, pts, opt, &g, &Fn);
  const FundamentalPair& fp = sol.pair;
  if (std::abs(fp.w0) <= 1e-8) throw Error(ErrorKind::eigenvalue_singularity, "w0 vanishes: lambda is an eigenvalue");
  const cplx den = (1.0 - 2.0 * lambda) * fp.w0;

  ComplexState out;
  out.grid = rhs.grid;
  const int n = g.size();
  out.phi1.resize(n);
  for (int k = 0; k < n; ++k) {
    const double r = pts[k];
    if (r == 0.0)
      out.phi1(k) = fp.u0(k) * sol.B0 / den;
    else if (r == 1.0)
      out.phi1(k) = fp.u1(k) * sol.A1 / den;
    else
      out.phi1(k) = (fp.u1(k) * sol.A.at(r) + fp.u0(k) * sol.B.at(r)) / den;
  }
  const CVec d1 = g.D.cast<cplx>() * out.phi1;
  out.phi2 = g.rho.cast<cplx>().cwiseProduct(d1) + (lambda + 0.5) * out.phi1 - rhs.f1.cast<cplx>();
  if (pair_out) *pair_out = fp;
  return out;
}

ComplexState apply_shifted_operator(cplx lambda, const ComplexState& u, bool free_mode) {
  const OperatorMatrix op = assemble(u.grid, free_mode ? OpMode::free : OpMode::full);
  const int n = u.grid->size();
  CVec x(2 * n);
  x << u.phi1, u.phi2;
  const CVec y = lambda * x - op.A.cast<cplx>() * x;
  return {u.grid, y.head(n), y.tail(n)};
}

}  // namespace blowup
