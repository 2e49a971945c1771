#include "blowup/evolve.hpp"

#include <cmath>
#include <optional>

#include "blowup/errors.hpp"
#include "blowup/spaces.hpp"

namespace blowup {

const char* to_string(Flow f) {
  switch (f) {
    case Flow::free: return "free";
    case Flow::linearized: return "linearized";
    case Flow::nonlinear: return "nonlinear";
  }
  return "?";
}

Flow flow_from_string(const std::string& s) {
  if (s == "free") return Flow::free;
  if (s == "linearized") return Flow::linearized;
  if (s == "nonlinear") return Flow::nonlinear;
  throw Error(ErrorKind::invalid_argument, "unknown evolution mode '" + s + "'");
}

double default_dtau(int N) { return 0.25 / (static_cast<double>(N) * N); }

double nonlinearity(double p) {
  return p * p * (10.0 * c3 * c3 * c3 + p * (10.0 * c3 * c3 + p * (5.0 * c3 + p)));
}

namespace {

// Preassembled pieces of the right-hand side for one grid.
class RhsKernel {
 public:
  RhsKernel(const Grid& g, Flow mode) : g_(g), mode_(mode), lap_(radial_laplacian(g)) {
    const int n = g.size();
    d1_.resize(n);
    d2_.resize(n);
  }

  void operator()(const Vec& x, Vec& out) {
    const int n = g_.size();
    auto x1 = x.head(n);
    auto x2 = x.tail(n);
    d1_.noalias() = g_.D * x1;
    d2_.noalias() = g_.D * x2;
    out.head(n) = -g_.rho.cwiseProduct(d1_) - 0.5 * x1 + x2;
    out.tail(n).noalias() = lap_ * x1;
    out.tail(n) += -g_.rho.cwiseProduct(d2_) - 1.5 * x2;
    if (mode_ != Flow::free) out.tail(n) += (15.0 / 4.0) * x1;
    if (mode_ == Flow::nonlinear)
      for (int j = 0; j < n; ++j) out(n + j) += nonlinearity(x1(j));
  }

 private:
  const Grid& g_;
  Flow mode_;
  Mat lap_;
  Vec d1_, d2_;
};

Mat chebyshev_filter(const Grid& g) {
  const int n = g.size();
  Mat F(n, n);
  const int keep = g.N - g.N / 6;
  for (int j = 0; j < n; ++j) {
    Vec e = Vec::Unit(n, j);
    Vec c = chebyshev_coefficients(g, e);
    for (int k = keep + 1; k < n; ++k) c(k) = 0.0;
    F.col(j) = chebyshev_values(g, c);
  }
  return F;
}

}  // namespace

State rhs(const State& s, Flow mode) {
  RhsKernel k(*s.grid, mode);
  Vec out(2 * s.size());
  k(s.stacked(), out);
  return State::from_stacked(s.grid, out);
}

Trajectory integrate(const State& initial, const EvolveConfig& cfg) {
  const GridPtr gp = initial.grid;
  const Grid& g = *gp;
  const int n = g.size();
  if (!(cfg.tau_max > 0.0)) throw Error(ErrorKind::invalid_argument, "tau_max must be positive");
  const double dt_req = cfg.dtau > 0.0 ? cfg.dtau : default_dtau(g.N);
  if (!(dt_req > 0.0)) throw Error(ErrorKind::invalid_argument, "dtau must be positive");
  const long steps = std::max<long>(1, static_cast<long>(std::ceil(cfg.tau_max / dt_req - 1e-9)));
  const double h = cfg.tau_max / steps;
  const int stride = cfg.stride > 0 ? cfg.stride : std::max(1, static_cast<int>(std::lround(0.01 / h)));

  std::optional<Projection> own;
  const Projection* P = cfg.projection;
  if (!P) {
    own = projection(assemble(gp, OpMode::full));
    P = &*own;
  }
  std::optional<Mat> filt;
  if (cfg.filter) filt = chebyshev_filter(g);

  RhsKernel f(g, cfg.mode);
  Vec x = initial.stacked();
  Vec k1(2 * n), k2(2 * n), k3(2 * n), k4(2 * n), tmp(2 * n);

  Trajectory traj;
  auto record = [&](double tau) {
    State s = State::from_stacked(gp, x);
    traj.tau.push_back(tau);
    traj.h_norm.push_back(h_norm(s));
    traj.sup_phi1.push_back(sup_norm(g, s.phi1));
    traj.amplitude.push_back(P->amplitude(s));
    traj.states.push_back(std::move(s));
  };
  auto deflate = [&] {
    if (cfg.deflate) x -= P->left.dot(x) * P->g;
  };

  deflate();
  record(0.0);
  double last_good = 0.0;
  for (long step = 1; step <= steps; ++step) {
    f(x, k1);
    tmp = x + 0.5 * h * k1;
    f(tmp, k2);
    tmp = x + 0.5 * h * k2;
    f(tmp, k3);
    tmp = x + h * k3;
    f(tmp, k4);
    x += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    if (filt) {
      x.head(n) = *filt * x.head(n);
      x.tail(n) = *filt * x.tail(n);
    }
    deflate();
    const double tau = step * h;
    if (!x.allFinite())
      throw Error(ErrorKind::integration_failure, "non-finite state; last good tau = " + std::to_string(last_good));
    last_good = tau;

    const bool escaped = x.head(n).cwiseAbs().maxCoeff() > cfg.escape_cap;
    const bool stopped = cfg.amplitude_stop > 0.0 && std::abs(P->left.dot(x)) > cfg.amplitude_stop;
    if (escaped || stopped || step % stride == 0 || step == steps) {
      record(tau);
      traj.escaped = escaped;
      traj.amplitude_stopped = stopped;
      if (escaped || stopped) break;
    }
  }
  return traj;
}

double growth_rate(const Trajectory& traj, double t0, double t1) {
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  int m = 0;
  for (size_t k = 0; k < traj.size(); ++k) {
    const double t = traj.tau[k];
    if (t < t0 || t > t1) continue;
    const double a = std::abs(traj.amplitude[k]);
    if (!(a > 0.0) || !std::isfinite(a))
      throw Error(ErrorKind::undefined_rate, "projection amplitude vanishes at tau = " + std::to_string(t));
    const double y = std::log(a);
    sx += t;
    sy += y;
    sxx += t * t;
    sxy += t * y;
    ++m;
  }
  if (m < 2) throw Error(ErrorKind::undefined_rate, "fewer than two records in the rate window");
  return (m * sxy - sx * sy) / (m * sxx - sx * sx);
}

LinearPropagator::LinearPropagator(GridPtr g, Flow mode, double dtau, int stride)
    : grid_(std::move(g)), h_(dtau), stride_(stride) {
  if (mode == Flow::nonlinear) throw Error(ErrorKind::invalid_argument, "propagator needs a linear flow");
  if (!(dtau > 0.0) || stride < 1) throw Error(ErrorKind::invalid_argument, "bad propagator step");
  const OperatorMatrix op = assemble(grid_, mode == Flow::free ? OpMode::free : OpMode::full);
  const int m = static_cast<int>(op.A.rows());
  const Mat hA = h_ * op.A;
  const Mat I = Mat::Identity(m, m);
  // RK4 amplification I + hA + (hA)^2/2 + (hA)^3/6 + (hA)^4/24 in Horner form.
  Mat R = I + hA * (I + hA * (0.5 * I + hA * (I / 6.0 + hA / 24.0)));
  M_ = I;
  Mat base = R;
  for (int e = stride_; e > 0; e >>= 1) {
    if (e & 1) M_ = M_ * base;
    if (e > 1) base = base * base;
  }
}

}  // namespace blowup
