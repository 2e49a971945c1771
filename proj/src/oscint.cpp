#include "blowup/oscint.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>
#include <numbers>
#include <sstream>

#include "blowup/dalembert.hpp"
#include "blowup/errors.hpp"
#include "blowup/parallel.hpp"

namespace blowup {

namespace {

constexpr double pi = std::numbers::pi;

struct GaussRule {
  std::vector<double> x, w;
};

GaussRule gauss_legendre(int n) {
  GaussRule r;
  r.x.resize(n);
  r.w.resize(n);
  for (int i = 0; i < n; ++i) {
    double x = std::cos(pi * (i + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = x;
      for (int k = 2; k <= n; ++k) {
        const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      dp = n * (x * p1 - p0) / (x * x - 1.0);
      const double dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-16) break;
    }
    r.x[n - 1 - i] = x;
    r.w[n - 1 - i] = 2.0 / ((1.0 - x * x) * dp * dp);
  }
  return r;
}

const GaussRule& coarse_rule() {
  static const GaussRule r = gauss_legendre(OmegaGrid::per_panel);
  return r;
}

const GaussRule& fine_rule() {
  static const GaussRule r = gauss_legendre(128);
  return r;
}

// Lagrange interpolation from the coarse nodes to the fine nodes on [-1,1].
const Mat& coarse_to_fine() {
  static const Mat L = [] {
    const auto& c = coarse_rule();
    const auto& f = fine_rule();
    const int n = static_cast<int>(c.x.size()), m = static_cast<int>(f.x.size());
    std::vector<double> bw(n, 1.0);
    for (int j = 0; j < n; ++j)
      for (int k = 0; k < n; ++k)
        if (k != j) bw[j] /= (c.x[j] - c.x[k]);
    Mat out(m, n);
    for (int i = 0; i < m; ++i) {
      double den = 0.0;
      for (int j = 0; j < n; ++j) den += bw[j] / (f.x[i] - c.x[j]);
      for (int j = 0; j < n; ++j) out(i, j) = bw[j] / (f.x[i] - c.x[j]) / den;
    }
    return out;
  }();
  return L;
}

// f, f', f'' of the built-in symbol samples.
std::array<double, 3> sample_derivs(OscSample s, double w) {
  const double q = 1.0 + w * w;
  const std::array<double, 3> e = {1.0 / q, -2.0 * w / (q * q), (6.0 * w * w - 2.0) / (q * q * q)};
  const std::array<double, 3> o = {w / q, (1.0 - w * w) / (q * q), (2.0 * w * w * w - 6.0 * w) / (q * q * q)};
  switch (s) {
    case OscSample::even: return e;
    case OscSample::odd: return o;
    case OscSample::mix: return {e[0] + o[0], e[1] + o[1], e[2] + o[2]};
  }
  return e;
}

// int_W^inf e^{i a w} f(w) dw by three integration-by-parts terms.
cplx ibp_tail(double a, double W, const std::array<double, 3>& d) {
  const cplx ia(0.0, a);
  return -std::exp(ia * W) * (d[0] / ia - d[1] / (ia * ia) + d[2] / (ia * ia * ia));
}

}  // namespace

OscSample osc_sample_from_string(const std::string& s) {
  if (s == "odd") return OscSample::odd;
  if (s == "even") return OscSample::even;
  if (s == "mix") return OscSample::mix;
  throw Error(ErrorKind::invalid_argument, "unknown oscillatory sample '" + s + "'");
}

const char* to_string(OscSample s) {
  switch (s) {
    case OscSample::odd: return "odd";
    case OscSample::even: return "even";
    case OscSample::mix: return "mix";
  }
  return "?";
}

cplx osc_closed_form(OscSample s, double a) {
  const double e = pi * std::exp(-std::abs(a));
  const double sg = a > 0 ? 1.0 : (a < 0 ? -1.0 : 0.0);
  switch (s) {
    case OscSample::even: return e;
    case OscSample::odd: return cplx(0.0, sg * e);
    case OscSample::mix: return cplx(e, sg * e);
  }
  return 0.0;
}

double osc_sup_closed_form(OscSample s, double lo, double hi) {
  if (hi < lo) throw Error(ErrorKind::invalid_argument, "empty interval");
  // <a>^2 e^{-|a|} is non-increasing in |a|, so the supremum sits at the smallest |a|.
  const double amin = (lo <= 0.0 && hi >= 0.0) ? 0.0 : std::min(std::abs(lo), std::abs(hi));
  if (s == OscSample::odd && amin == 0.0) return pi;  // limit from a != 0
  return (1.0 + amin * amin) * std::abs(osc_closed_form(s, amin == 0.0 ? 0.0 : amin));
}

OscResult osc_check(OscSample s, double a, double Omega) {
  if (!(Omega > 0.0)) throw Error(ErrorKind::invalid_argument, "Omega must be positive");
  OscResult r;
  if (a == 0.0 && s != OscSample::even) {
    r.principal_value = true;
    if (s == OscSample::odd) return r;
  }
  const auto& g = coarse_rule();
  // Panels short enough to resolve cos(a w) with 20 Gauss points.
  const double width = std::min(1.0, 2.0 * pi / std::max(std::abs(a), 1e-3));
  const long panels = static_cast<long>(std::ceil(Omega / width));
  const double h = Omega / static_cast<double>(panels);
  cplx sum = 0.0;
  for (long p = 0; p < panels; ++p) {
    const double lo = p * h, mid = lo + 0.5 * h;
    for (size_t i = 0; i < g.x.size(); ++i) {
      const double w = mid + 0.5 * h * g.x[i];
      const double fe = (s == OscSample::odd) ? 0.0 : 1.0 / (1.0 + w * w);
      const double fo = (s == OscSample::even) ? 0.0 : w / (1.0 + w * w);
      // Symmetric pairing of +-w.
      sum += 0.5 * h * g.w[i] * cplx(2.0 * fe * std::cos(a * w), 2.0 * fo * std::sin(a * w));
    }
  }
  if (a == 0.0) {
    sum += 2.0 * (0.5 * pi - std::atan(Omega));
  } else {
    sum += ibp_tail(a, Omega, sample_derivs(s, Omega));
    // Left tail: int_{-inf}^{-W} e^{i a w} f(w) dw = int_W^inf e^{-i a w} f(-w) dw.
    auto d = sample_derivs(s, -Omega);
    sum += ibp_tail(-a, Omega, {d[0], -d[1], d[2]});
  }
  r.value = sum;
  r.scaled = (1.0 + a * a) * std::abs(sum);
  return r;
}

double kernel_envelope(double s, double tau) {
  const double x = tau + std::log1p(-s);
  return s / std::sqrt(1.0 - s) / (1.0 + x * x);
}

OmegaGrid OmegaGrid::make(double omega_max) {
  if (!(omega_max > 0.0)) throw Error(ErrorKind::invalid_argument, "omega_max must be positive");
  OmegaGrid g;
  double w = 0.0;
  while (w < omega_max - 1e-12) {
    const double width = w < 16.0 - 1e-12 ? 1.0 : 4.0;
    const double hi = std::min(w + width, omega_max);
    g.lo.push_back(w);
    g.hi.push_back(hi);
    w = hi;
  }
  const auto& c = coarse_rule();
  for (size_t p = 0; p < g.lo.size(); ++p)
    for (double x : c.x) g.nodes.push_back(0.5 * (g.lo[p] + g.hi[p]) + 0.5 * (g.hi[p] - g.lo[p]) * x);
  return g;
}

std::vector<cplx> OmegaGrid::fourier_weights(double tau) const {
  const auto& f = fine_rule();
  const Mat& L = coarse_to_fine();
  std::vector<cplx> c(nodes.size(), 0.0);
  const int m = static_cast<int>(f.x.size());
  Eigen::VectorXcd e(m);
  for (size_t p = 0; p < lo.size(); ++p) {
    const double half = 0.5 * (hi[p] - lo[p]), mid = 0.5 * (hi[p] + lo[p]);
    for (int i = 0; i < m; ++i) e(i) = half * f.w[i] * std::exp(cplx(0.0, (mid + half * f.x[i]) * tau));
    const Eigen::VectorXcd cp = L.transpose().cast<cplx>() * e;
    for (int j = 0; j < per_panel; ++j) c[p * per_panel + j] = cp(j);
  }
  return c;
}

namespace {

std::string list_failures(const std::map<double, std::string>& failed) {
  std::ostringstream os;
  os << failed.size() << " resolvent solve(s) failed at omega =";
  int shown = 0;
  for (const auto& [w, msg] : failed) {
    if (shown++ == 10) {
      os << " ...";
      break;
    }
    os << " " << w;
  }
  os << " (first: " << failed.begin()->second << ")";
  return os.str();
}

// Tail of int_Omega^inf e^{i w tau} c/w^2 dw bounded by c min(1/Omega, 2/(tau Omega^2)).
double tail_bound(double c, double Omega, double tau) {
  double b = c / Omega;
  if (tau > 0.0) b = std::min(b, 2.0 * c / (tau * Omega * Omega));
  return b;
}

}  // namespace

std::vector<KernelSample> perturbation_kernel(const std::vector<double>& rhos, const std::vector<double>& ss,
                                              const std::vector<double>& taus, const KernelOptions& opt) {
  for (double v : rhos)
    if (!(v >= 0.05 && v <= 0.95)) throw Error(ErrorKind::invalid_argument, "rho must lie in [0.05, 0.95]");
  for (double v : ss)
    if (!(v >= 0.05 && v <= 0.95)) throw Error(ErrorKind::invalid_argument, "s must lie in [0.05, 0.95]");
  for (double t : taus)
    if (!(t >= 0.0 && t <= 15.0)) throw Error(ErrorKind::invalid_argument, "tau must lie in [0, 15]");

  std::vector<double> pts(rhos);
  pts.insert(pts.end(), ss.begin(), ss.end());
  std::sort(pts.begin(), pts.end());
  pts.erase(std::unique(pts.begin(), pts.end()), pts.end());

  const OmegaGrid grid = OmegaGrid::make(opt.omega_max);
  const size_t nw = grid.nodes.size(), np = rhos.size() * ss.size();
  std::vector<cplx> H(nw * np);
  std::map<double, std::string> failed;
  std::mutex mu;
  ResolventOptions ro;
  ro.rtol = opt.rtol;
  parallel_for(nw, opt.threads, [&](size_t k) {
    const double w = grid.nodes[k];
    try {
      const FundamentalPair fp = fundamental_pair(cplx(0.0, w), opt.potential, pts, ro);
      size_t q = 0;
      for (double r : rhos)
        for (double s : ss) H[k * np + q++] = green(r, s, fp) - green_free(r, s, cplx(0.0, w));
    } catch (const Error& e) {
      std::lock_guard<std::mutex> lock(mu);
      failed[w] = e.what();
    }
  });
  if (!failed.empty()) throw Error(ErrorKind::partial_result, list_failures(failed));

  // c/w^2 fit on the last panel for the truncation estimate.
  std::vector<double> cfit(np, 0.0);
  for (size_t k = nw - OmegaGrid::per_panel; k < nw; ++k)
    for (size_t q = 0; q < np; ++q)
      cfit[q] = std::max(cfit[q], std::abs(H[k * np + q]) * grid.nodes[k] * grid.nodes[k]);

  std::vector<KernelSample> out;
  for (double tau : taus) {
    const auto c = grid.fourier_weights(tau);
    size_t q = 0;
    for (double r : rhos)
      for (double s : ss) {
        cplx I = 0.0;
        for (size_t k = 0; k < nw; ++k) I += c[k] * H[k * np + q];
        KernelSample ks;
        ks.rho = r;
        ks.s = s;
        ks.tau = tau;
        // Negative frequencies enter through H(-w) = conj H(w).
        ks.K = (I + std::conj(I)) / (2.0 * pi);
        ks.envelope = kernel_envelope(s, tau);
        ks.ratio = std::abs(ks.K) / ks.envelope;
        ks.error_bar = tail_bound(cfit[q], opt.omega_max, tau) / pi;
        out.push_back(ks);
        ++q;
      }
  }
  return out;
}

KernelSample perturbation_kernel(double rho, double s, double tau, const KernelOptions& opt) {
  return perturbation_kernel(std::vector<double>{rho}, std::vector<double>{s}, std::vector<double>{tau}, opt).front();
}

std::vector<Vec> laplace_semigroup_check(const State& f, const std::vector<double>& taus, const LaplaceOptions& opt) {
  for (double t : taus)
    if (!(t >= 0.5 && t <= 5.0)) throw Error(ErrorKind::invalid_argument, "tau must lie in [0.5, 5]");
  const Grid& g = *f.grid;
  const int n = g.size();
  const OmegaGrid grid = OmegaGrid::make(opt.omega_max);
  const size_t nw = grid.nodes.size();
  const ResolventRHS rhs = ResolventRHS::from_state(f);
  const bool zero = f.phi1.cwiseAbs().maxCoeff() == 0.0 && f.phi2.cwiseAbs().maxCoeff() == 0.0;

  std::vector<CVec> H(nw, CVec::Zero(n));
  std::map<double, std::string> failed;
  std::mutex mu;
  ResolventOptions ro;
  ro.rtol = opt.rtol;
  if (!zero) {
    const Potential full = Potential::linearized(), free = Potential::zero();
    parallel_for(nw, opt.threads, [&](size_t k) {
      const cplx l(0.0, grid.nodes[k]);
      try {
        H[k] = apply_resolvent(l, rhs, full, ro).phi1 - apply_resolvent(l, rhs, free, ro).phi1;
      } catch (const Error& e) {
        std::lock_guard<std::mutex> lock(mu);
        failed[grid.nodes[k]] = e.what();
      }
    });
  }
  if (!failed.empty()) throw Error(ErrorKind::partial_result, list_failures(failed));

  const RadialData data = RadialData::from_state(f);
  std::vector<Vec> out;
  for (double tau : taus) {
    const auto c = grid.fourier_weights(tau);
    CVec I = CVec::Zero(n);
    for (size_t k = 0; k < nw; ++k) I += c[k] * H[k];
    Vec u(n);
    for (int j = 0; j < n; ++j) u(j) = s0_first_component(data, tau, g.rho(j)) + I(j).real() / pi;
    out.push_back(u);
  }
  return out;
}

Vec laplace_semigroup_check(const State& f, double tau, const LaplaceOptions& opt) {
  return laplace_semigroup_check(f, std::vector<double>{tau}, opt).front();
}

}  // namespace blowup
