#include "blowup/hyp.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include "blowup/errors.hpp"

namespace blowup {

namespace {

constexpr double pi = std::numbers::pi;

constexpr std::array<double, 9> lanczos = {
    0.99999999999980993,  676.5203681218851,     -1259.1392167224028,
    771.32342877765313,   -176.61502916214059,   12.507343278686905,
    -0.13857109526572012, 9.9843695780195716e-6, 1.5056327351493116e-7};

// sin(pi z) with the argument reduced first, so that values near integers
// keep their relative accuracy.
cplx sinpi(cplx z) {
  const double n = std::round(z.real());
  const cplx r(z.real() - n, z.imag());
  const cplx s = std::sin(pi * r);
  return (static_cast<long long>(n) % 2 == 0) ? s : -s;
}

bool near_nonpositive_integer(cplx z, double tol) {
  if (std::abs(z.imag()) > tol || z.real() > tol) return false;
  return std::abs(z.real() - std::round(z.real())) <= tol;
}

cplx lgamma_right(cplx z) {
  z -= 1.0;
  cplx x = lanczos[0];
  for (int i = 1; i < 9; ++i) x += lanczos[i] / (z + static_cast<double>(i));
  const cplx t = z + 7.5;
  return 0.5 * std::log(2.0 * pi) + (z + 0.5) * std::log(t) - t + std::log(x);
}

std::string show(cplx z) {
  std::ostringstream os;
  os.precision(12);
  os << z.real() << (z.imag() < 0 ? "-" : "+") << std::abs(z.imag()) << "i";
  return os.str();
}

// Direct series; `terminating` sums are finite polynomials.
cplx series(cplx a, cplx b, cplx c, cplx z) {
  cplx term = 1.0, sum = 1.0;
  int small = 0;
  for (int k = 0; k < 40000; ++k) {
    const double kd = k;
    term *= (a + kd) * (b + kd) / ((c + kd) * (kd + 1.0)) * z;
    sum += term;
    if (term == 0.0) return sum;
    if (std::abs(term) <= 1e-17 * std::abs(sum)) {
      if (++small >= 2) return sum;
    } else {
      small = 0;
    }
  }
  throw Error(ErrorKind::evaluation_domain, "2F1 series did not converge at z = " + show(z));
}

// 2F1(a,b;c;1-w) through the connection formula around z = 1, for
// c - a - b away from the integers.
cplx near_one_generic(cplx a, cplx b, cplx c, cplx w) {
  const cplx d = c - a - b;
  const cplx first = gamma(c) * gamma(d) * rgamma(c - a) * rgamma(c - b) * series(a, b, 1.0 - d, w);
  const cplx second = std::pow(w, d) * gamma(c) * gamma(-d) * rgamma(a) * rgamma(b) * series(c - a, c - b, d + 1.0, w);
  return first + second;
}

cplx near_one(cplx a, cplx b, cplx c, cplx w) {
  const cplx d = c - a - b;
  if (w == 0.0) {
    if (d.real() > 0.0) return gamma(c) * gamma(d) * rgamma(c - a) * rgamma(c - b);
    throw Error(ErrorKind::evaluation_domain, "2F1 diverges at z = 1 for Re(c-a-b) <= 0");
  }
  const double h = 1e-3;
  const cplx off = d - std::round(d.real());
  if (std::abs(off) >= 0.5 * h) return near_one_generic(a, b, c, w);
  // Integer c - a - b: the two terms have cancelling poles. The value is
  // analytic in a shift of b, so symmetric averages at +-h and +-2h combined
  // by Richardson extrapolation recover it to O(h^4).
  auto avg = [&](double s) { return 0.5 * (near_one_generic(a, b + s, c, w) + near_one_generic(a, b - s, c, w)); };
  return (4.0 * avg(h) - avg(2.0 * h)) / 3.0;
}

}  // namespace

cplx lgamma(cplx z) {
  if (near_nonpositive_integer(z, 0.0)) throw Error(ErrorKind::pole, "Gamma pole at " + show(z));
  if (z.real() < 0.5) return std::log(pi) - std::log(sinpi(z)) - lgamma_right(1.0 - z);
  return lgamma_right(z);
}

cplx gamma(cplx z) {
  if (near_nonpositive_integer(z, 0.0)) throw Error(ErrorKind::pole, "Gamma pole at " + show(z));
  if (z.real() < 0.5) return pi / (sinpi(z) * std::exp(lgamma_right(1.0 - z)));
  return std::exp(lgamma_right(z));
}

cplx rgamma(cplx z) {
  if (z.real() < 0.5) return sinpi(z) / pi * std::exp(lgamma_right(1.0 - z));
  return std::exp(-lgamma_right(z));
}

cplx f21(cplx a, cplx b, cplx c, cplx z) {
  if (near_nonpositive_integer(c, 1e-14)) throw Error(ErrorKind::evaluation_domain, "2F1 parameter c is a pole: " + show(c));
  if (z == 0.0) return 1.0;
  if (near_nonpositive_integer(a, 0.0) || near_nonpositive_integer(b, 0.0)) return series(a, b, c, z);

  const cplx one_minus = 1.0 - z;
  const double r0 = std::abs(z);
  const double r1 = std::abs(one_minus);
  const double r2 = one_minus == 0.0 ? std::numeric_limits<double>::infinity() : std::abs(z / (z - 1.0));
  const double r3 = one_minus == 0.0 ? std::numeric_limits<double>::infinity() : 1.0 / r1;
  const double best = std::min({r0, r1, r2, r3});
  if (best >= 0.97) throw Error(ErrorKind::evaluation_domain, "2F1 argument outside the transformed domains: " + show(z));

  if (best == r0) return series(a, b, c, z);
  if (best == r1) return near_one(a, b, c, one_minus);
  // Pfaff: F(a,b;c;z) = (1-z)^{-a} F(a, c-b; c; z/(z-1)).
  const cplx pre = std::pow(one_minus, -a);
  const cplx w = z / (z - 1.0);
  if (best == r2) return pre * series(a, c - b, c, w);
  return pre * near_one(a, c - b, c, 1.0 - w);
}

HypParams hyp_params(cplx lambda) { return {0.5 * lambda - 1.0, 0.5 * lambda + 1.0, 0.5}; }

cplx w0_closed(cplx lambda) {
  const cplx p1 = 0.5 * lambda + 0.25;
  const cplx p2 = 0.5 * lambda + 0.75;
  for (const cplx& p : {p1, p2}) {
    if (near_nonpositive_integer(p, 1e-12)) {
      const double side = lambda.real() - (2.0 * std::round(p.real()) - (p == p1 ? 0.5 : 1.5));
      throw Error(ErrorKind::pole, "w0 has a pole at lambda = " + show(lambda) + " (approached from " +
                                       (side >= 0.0 ? "above" : "below") + " on the real axis)");
    }
  }
  return gamma(p1) * gamma(p2) * rgamma(0.5 * lambda - 0.5) * rgamma(0.5 * lambda + 1.5);
}

namespace {

double abs_w0(double eps, double omega) {
  try {
    return std::abs(w0_closed(cplx(eps, omega)));
  } catch (const Error&) {
    return std::numeric_limits<double>::infinity();
  }
}

std::vector<double> axis(double lo, double hi, double step) {
  std::vector<double> v;
  const long n = static_cast<long>(std::floor((hi - lo) / step + 1e-9));
  for (long i = 0; i <= n; ++i) v.push_back(lo + static_cast<double>(i) * step);
  if (v.back() < hi - 1e-12) v.push_back(hi);
  return v;
}

// Nelder–Mead on |w0| in the box [e0,e1] x [-W,W]; points are clamped into the box.
ScanMinimum nelder_mead(double e, double w, double de, double dw, const ScanOptions& o) {
  auto clampp = [&](std::array<double, 2> p) {
    p[0] = std::clamp(p[0], o.eps_lo, o.eps_hi);
    p[1] = std::clamp(p[1], -o.omega_max, o.omega_max);
    return p;
  };
  auto f = [&](const std::array<double, 2>& p) { return abs_w0(p[0], p[1]); };
  std::array<std::array<double, 2>, 3> x = {clampp({e, w}), clampp({e + de, w}), clampp({e, w + dw})};
  std::array<double, 3> fx = {f(x[0]), f(x[1]), f(x[2])};
  for (int it = 0; it < 400; ++it) {
    std::array<int, 3> idx = {0, 1, 2};
    std::sort(idx.begin(), idx.end(), [&](int i, int j) { return fx[i] < fx[j]; });
    const auto b = x[idx[0]], m = x[idx[1]], wst = x[idx[2]];
    const double fb = fx[idx[0]], fm = fx[idx[1]], fw = fx[idx[2]];
    const double size = std::max(std::abs(m[0] - b[0]) + std::abs(m[1] - b[1]), std::abs(wst[0] - b[0]) + std::abs(wst[1] - b[1]));
    if (size < 1e-13) break;
    const std::array<double, 2> cen = {0.5 * (b[0] + m[0]), 0.5 * (b[1] + m[1])};
    auto along = [&](double t) { return clampp({cen[0] + t * (wst[0] - cen[0]), cen[1] + t * (wst[1] - cen[1])}); };
    const auto r = along(-1.0);
    const double fr = f(r);
    std::array<double, 2> next;
    double fnext;
    if (fr < fb) {
      const auto ex = along(-2.0);
      const double fe = f(ex);
      next = fe < fr ? ex : r;
      fnext = std::min(fe, fr);
    } else if (fr < fm) {
      next = r;
      fnext = fr;
    } else {
      const auto ct = along(fr < fw ? -0.5 : 0.5);
      const double fc = f(ct);
      if (fc < std::min(fr, fw)) {
        next = ct;
        fnext = fc;
      } else {
        for (int k : {idx[1], idx[2]}) {
          x[k] = {0.5 * (x[k][0] + b[0]), 0.5 * (x[k][1] + b[1])};
          fx[k] = f(x[k]);
        }
        continue;
      }
    }
    x[idx[2]] = next;
    fx[idx[2]] = fnext;
  }
  const int best = static_cast<int>(std::min_element(fx.begin(), fx.end()) - fx.begin());
  return {cplx(x[best][0], x[best][1]), fx[best]};
}

// Complex Newton on w0 once a candidate is numerically close to a zero.
ScanMinimum polish_zero(ScanMinimum m) {
  cplx z = m.lambda;
  for (int it = 0; it < 30; ++it) {
    cplx fz, fp;
    try {
      const double h = 1e-6;
      fz = w0_closed(z);
      fp = (w0_closed(z + h) - w0_closed(z - h)) / (2.0 * h);
    } catch (const Error&) {
      return m;
    }
    if (fp == 0.0) break;
    const cplx step = fz / fp;
    z -= step;
    if (std::abs(step) < 1e-15) break;
  }
  const double v = abs_w0(z.real(), z.imag());
  if (v < m.value) return {z, v};
  return m;
}

}  // namespace

ScanResult zero_scan(const ScanOptions& o) {
  if (!(o.eps_hi >= o.eps_lo) || !(o.d_eps > 0.0) || !(o.d_omega > 0.0) || !(o.omega_max >= 0.0))
    throw Error(ErrorKind::invalid_argument, "bad scan window");
  ScanResult res;
  res.eps = axis(o.eps_lo, o.eps_hi, o.d_eps);
  res.omega = axis(-o.omega_max, o.omega_max, o.d_omega);
  const size_t ne = res.eps.size(), nw = res.omega.size();
  std::vector<double> val(ne * nw);
  for (size_t i = 0; i < ne; ++i)
    for (size_t j = 0; j < nw; ++j) val[i * nw + j] = abs_w0(res.eps[i], res.omega[j]);

  // Discrete local minima, smallest first.
  std::vector<size_t> cand;
  for (size_t i = 0; i < ne; ++i)
    for (size_t j = 0; j < nw; ++j) {
      const double v = val[i * nw + j];
      bool local = true;
      for (int di = -1; di <= 1 && local; ++di)
        for (int dj = -1; dj <= 1; ++dj) {
          const long ii = static_cast<long>(i) + di, jj = static_cast<long>(j) + dj;
          if ((di == 0 && dj == 0) || ii < 0 || jj < 0 || ii >= static_cast<long>(ne) || jj >= static_cast<long>(nw)) continue;
          if (val[ii * nw + jj] < v) {
            local = false;
            break;
          }
        }
      if (local) cand.push_back(i * nw + j);
    }
  std::sort(cand.begin(), cand.end(), [&](size_t p, size_t q) { return val[p] < val[q]; });
  if (cand.size() > static_cast<size_t>(o.refine_count)) cand.resize(o.refine_count);

  size_t gbest = static_cast<size_t>(std::min_element(val.begin(), val.end()) - val.begin());
  res.minimum = {cplx(res.eps[gbest / nw], res.omega[gbest % nw]), val[gbest]};
  for (size_t k : cand) {
    ScanMinimum m = nelder_mead(res.eps[k / nw], res.omega[k % nw], 0.5 * o.d_eps, 0.5 * o.d_omega, o);
    if (m.value < 1e-6) m = polish_zero(m);
    res.refined.push_back(m);
    if (m.value < res.minimum.value) res.minimum = m;
  }
  std::sort(res.refined.begin(), res.refined.end(), [](const ScanMinimum& a, const ScanMinimum& b) { return a.value < b.value; });
  if (o.keep_grid) res.abs_w0 = std::move(val);
  return res;
}

}  // namespace blowup
