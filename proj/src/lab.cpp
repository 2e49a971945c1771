#include "blowup/lab.hpp"

#include <algorithm>
#include <cmath>
#include <optional>
#include <random>

#include "blowup/errors.hpp"
#include "blowup/parallel.hpp"

namespace blowup {

std::uint64_t member_seed(std::uint64_t seed, std::uint64_t index) {
  std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (index + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

State random_state(const RandomDataSpec& spec, GridPtr g) {
  if (spec.terms < 1) throw Error(ErrorKind::invalid_argument, "random data needs at least one term");
  if (!(spec.target >= 0.0)) throw Error(ErrorKind::invalid_argument, "target norm must be nonnegative");
  std::mt19937_64 rng(spec.seed);
  std::normal_distribution<double> normal;
  State s = State::zero(g);
  for (Vec* v : {&s.phi1, &s.phi2}) {
    for (int k = 0; k < spec.terms; ++k) {
      const double a = normal(rng) * std::pow(k + 1.0, -spec.decay);
      for (int j = 0; j < g->size(); ++j) {
        const double x = 2.0 * g->rho(j) * g->rho(j) - 1.0;
        (*v)(j) += a * std::cos(k * std::acos(std::clamp(x, -1.0, 1.0)));
      }
    }
  }
  const double n = h_norm(s);
  if (n > 0.0) s *= spec.target / n;
  return s;
}

std::vector<State> random_ensemble(const RandomDataSpec& spec, size_t count, GridPtr g) {
  std::vector<State> out;
  out.reserve(count);
  for (size_t m = 0; m < count; ++m) {
    RandomDataSpec s = spec;
    s.seed = member_seed(spec.seed, m);
    out.push_back(random_state(s, g));
  }
  return out;
}

PhysicalData random_perturbation(const StabilityConfig& cfg, double delta, std::uint64_t member) {
  const double R = 1.0 + cfg.delta_T;
  GridPtr g = make_grid(24);
  RandomDataSpec spec;
  spec.seed = member_seed(cfg.seed, member);
  const State s = random_state(spec, g);
  // Norm of (f(r/R), g(r/R)) on the ball of radius R from the unit-ball pieces.
  const double l2f = l2_ball(*g, s.phi1), dlf = l2_ball(*g, differentiate(*g, s.phi1)), l2g = l2_ball(*g, s.phi2);
  const double norm = std::sqrt(R * R * R * (l2f * l2f + l2g * l2g) + R * dlf * dlf);
  const double scale = norm > 0.0 ? delta / cfg.M / norm : 0.0;
  return PhysicalData::sampled(R, g, scale * s.phi1, scale * s.phi2);
}

namespace {

struct Shooter {
  const PhysicalData& v;
  const StabilityConfig& cfg;
  double delta;
  GridPtr grid;
  Projection P;

  Shooter(const PhysicalData& v_, const StabilityConfig& c, double d)
      : v(v_), cfg(c), delta(d), grid(make_grid(c.N)), P(projection(assemble(grid, OpMode::full))) {}

  double threshold() const { return cfg.threshold > 0.0 ? cfg.threshold : 10.0 * delta; }

  ShotTrial shoot(double T) const {
    EvolveConfig ec;
    ec.mode = Flow::nonlinear;
    ec.dtau = cfg.dtau;
    ec.tau_max = cfg.tau_max;
    ec.amplitude_stop = threshold();
    ec.projection = &P;
    const Trajectory tr = integrate(initial_data_map(T, v, grid), ec);
    ShotTrial t;
    t.T = T;
    t.a_end = tr.amplitude.back();
    t.tau_end = tr.tau.back();
    t.crossed = tr.amplitude_stopped;
    t.escaped = tr.escaped;
    t.decayed = tr.sup_phi1.back() < delta / 100.0;
    t.sign = (t.a_end > 0.0) - (t.a_end < 0.0);
    return t;
  }
};

}  // namespace

ShootingResult find_blowup_time(const PhysicalData& v, const StabilityConfig& cfg, double delta) {
  if (!(cfg.delta_T > 0.0 && cfg.delta_T < 1.0)) throw Error(ErrorKind::invalid_argument, "delta_T must lie in (0,1)");
  const Shooter sh(v, cfg, delta);
  ShootingResult res;
  double lo = 1.0 - cfg.delta_T, hi = 1.0 + cfg.delta_T;
  const ShotTrial tl = sh.shoot(lo), th = sh.shoot(hi);
  res.trace = {tl, th};
  auto finish_exact = [&](double T) {
    res.T_star = T;
    res.lo = res.hi = T;
    res.exact = true;
    return res;
  };
  if (tl.sign == 0) return finish_exact(lo);
  if (th.sign == 0) return finish_exact(hi);
  if (tl.sign == th.sign)
    throw Error(ErrorKind::shooting_bracket,
                "both ends of [1 - delta_T, 1 + delta_T] classify with sign " + std::to_string(tl.sign));
  const int s_lo = tl.sign;
  while (hi - lo > cfg.T_tol) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    const ShotTrial t = sh.shoot(mid);
    res.trace.push_back(t);
    if (t.sign == 0) return finish_exact(mid);
    (t.sign == s_lo ? lo : hi) = mid;
  }
  res.lo = lo;
  res.hi = hi;
  res.T_star = 0.5 * (lo + hi);
  // Every trial left of the bracket must share the left sign and every trial
  // right of it the other one.
  for (const ShotTrial& t : res.trace) {
    if (t.T <= lo && t.sign != s_lo) res.monotone = false;
    if (t.T >= hi && t.sign == s_lo) res.monotone = false;
  }
  return res;
}

double physical_side_integral(const Trajectory& traj, double T) {
  if (traj.size() < 2) return 0.0;
  const CoordinateFrame frame{T};
  std::vector<double> t(traj.size()), y(traj.size());
  for (size_t k = 0; k < traj.size(); ++k) {
    const PhysicalSlice s = from_similarity(traj.states[k], frame, traj.tau[k]);
    const double gap = T - s.t;
    const double uT = c3 / std::sqrt(gap);
    const Vec diff = s.u.array() - uT;
    const double r = sup_norm(*traj.states[k].grid, diff) / uT;
    t[k] = s.t;
    y[k] = r * r / gap;
  }
  double sum = 0.0;
  for (size_t k = 1; k < t.size(); ++k) sum += 0.5 * (t[k] - t[k - 1]) * (y[k] + y[k - 1]);
  return sum;
}

StabilityReport stability_experiment(const StabilityConfig& cfg) {
  if (cfg.deltas.empty()) throw Error(ErrorKind::invalid_argument, "no delta values");
  if (cfg.members < 1) throw Error(ErrorKind::invalid_argument, "members must be positive");
  StabilityReport rep;
  rep.deltas = cfg.deltas;
  const size_t nd = cfg.deltas.size(), nm = static_cast<size_t>(cfg.members);
  rep.members.resize(nd * nm);
  GridPtr grid = make_grid(cfg.N);
  parallel_for(nd * nm, cfg.threads, [&](size_t idx) {
    const size_t di = idx / nm, m = idx % nm;
    const double delta = cfg.deltas[di];
    StabilityConfig c = cfg;
    c.threads = 1;
    const PhysicalData v = random_perturbation(c, delta, m);
    const ShootingResult sr = find_blowup_time(v, c, delta);
    EvolveConfig ec;
    ec.mode = Flow::nonlinear;
    ec.dtau = c.dtau;
    ec.tau_max = c.tau_max;
    const Trajectory tr = integrate(initial_data_map(sr.T_star, v, grid), ec);
    const StrichartzValue sv = strichartz_detail(tr, StrichartzExponents::make(2.0, inf));
    StabilityMember& out = rep.members[idx];
    out.delta = delta;
    out.member = static_cast<int>(m);
    out.T_star = sr.T_star;
    out.S = sv.value * sv.value;
    out.S_tail = sv.tail;
    out.v_norm = delta / c.M;
    out.trials = static_cast<int>(sr.trace.size());
    out.monotone = sr.monotone;
    if (static_cast<int>(m) < c.physical_checks) out.physical = physical_side_integral(tr, sr.T_star);
  });
  rep.max_S.assign(nd, 0.0);
  rep.max_dev.assign(nd, 0.0);
  for (const StabilityMember& m : rep.members) {
    const size_t di = static_cast<size_t>(std::find(cfg.deltas.begin(), cfg.deltas.end(), m.delta) - cfg.deltas.begin());
    rep.max_S[di] = std::max(rep.max_S[di], m.S);
    rep.max_dev[di] = std::max(rep.max_dev[di], std::abs(m.T_star - 1.0) / m.delta);
    rep.max_S_over_delta2 = std::max(rep.max_S_over_delta2, m.S / (m.delta * m.delta));
    rep.C = std::max(rep.C, std::abs(m.T_star - 1.0) / m.delta);
  }
  if (nd >= 2) {
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (size_t i = 0; i < nd; ++i) {
      const double x = std::log(cfg.deltas[i]), y = std::log(rep.max_S[i]);
      sx += x;
      sy += y;
      sxx += x * x;
      sxy += x * y;
    }
    const double n = static_cast<double>(nd);
    rep.slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
  }
  return rep;
}

double gauge_decay_rate(double Tprime, double T, double tau_max, double t0, double t1, int N, double dtau) {
  GridPtr g = make_grid(N);
  EvolveConfig ec;
  ec.mode = Flow::nonlinear;
  ec.dtau = dtau;
  ec.tau_max = tau_max;
  const Trajectory tr = integrate(gauge_solution(Tprime, CoordinateFrame{T}, 0.0, g), ec);
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  int m = 0;
  for (size_t k = 0; k < tr.size(); ++k) {
    const double t = tr.tau[k];
    if (t < t0 || t > t1) continue;
    const double psi = c3 + tr.states[k].phi1(0);
    if (!(psi > 0.0)) throw Error(ErrorKind::undefined_rate, "psi1 is not positive at tau = " + std::to_string(t));
    const double y = std::log(psi);
    sx += t;
    sy += y;
    sxx += t * t;
    sxy += t * y;
    ++m;
  }
  if (m < 2) throw Error(ErrorKind::undefined_rate, "fewer than two records in the rate window");
  return (m * sxy - sx * sy) / (m * sxx - sx * sx);
}

LinearBoundReport linear_bound_experiment(const LinearBoundConfig& cfg, const std::vector<State>& ensemble) {
  if (cfg.flow == Flow::nonlinear) throw Error(ErrorKind::invalid_argument, "linear bounds need a linear flow");
  if (cfg.kind == BoundKind::strichartz && !cfg.exps.admissible())
    throw Error(ErrorKind::invalid_argument, "exponents violate 1/p + 3/q = 1/2");
  if (!(cfg.tau_max > 0.0) || !(cfg.record > 0.0)) throw Error(ErrorKind::invalid_argument, "bad time grid");
  LinearBoundReport rep;
  if (ensemble.empty()) return rep;
  GridPtr g = ensemble.front().grid;
  const int n = g->size();
  const double base = cfg.dtau > 0.0 ? cfg.dtau : default_dtau(g->N);
  const int stride = std::max(1, static_cast<int>(std::ceil(cfg.record / base - 1e-9)));
  const LinearPropagator prop(g, cfg.flow, cfg.record / stride, stride);
  const long records = std::max<long>(1, std::lround(cfg.tau_max / prop.record_spacing()));
  const bool project = cfg.flow == Flow::linearized;
  std::optional<Projection> P;
  if (project) P = projection(assemble(g, OpMode::full));

  const size_t m = ensemble.size();
  Mat X(2 * n, static_cast<Eigen::Index>(m));
  rep.members.resize(m);
  for (size_t i = 0; i < m; ++i) {
    if (ensemble[i].grid->size() != n) throw Error(ErrorKind::invalid_argument, "ensemble members use different grids");
    Vec f = ensemble[i].stacked();
    const double full = h_norm(ensemble[i]);
    if (project) f -= P->left.dot(f) * P->g;
    X.col(static_cast<Eigen::Index>(i)) = f;
    rep.members[i].index = static_cast<int>(i);
    rep.members[i].norm0 = h_norm(State::from_stacked(g, f));
    rep.members[i].skipped = !(rep.members[i].norm0 > 1e-12 * full);
  }

  std::vector<double> tau(static_cast<size_t>(records) + 1);
  std::vector<std::vector<double>> series(m, std::vector<double>(tau.size()));
  auto measure = [&](size_t k) {
    parallel_for(m, cfg.threads, [&](size_t i) {
      const State s = State::from_stacked(g, X.col(static_cast<Eigen::Index>(i)));
      series[i][k] = cfg.kind == BoundKind::strichartz ? lq_ball(*g, s.phi1, cfg.exps.q) : h_norm(s);
    });
  };
  tau[0] = 0.0;
  measure(0);
  for (long k = 1; k <= records; ++k) {
    X = prop.record_matrix() * X;
    if (project) X -= P->g * (P->left.transpose() * X);
    tau[static_cast<size_t>(k)] = k * prop.record_spacing();
    measure(static_cast<size_t>(k));
  }

  for (size_t i = 0; i < m; ++i) {
    LinearMember& out = rep.members[i];
    if (out.skipped) {
      ++rep.skipped;
      continue;
    }
    const std::vector<double>& y = series[i];
    if (cfg.kind == BoundKind::strichartz) {
      const StrichartzValue sv = strichartz_from_norms(tau, y, cfg.exps.p);
      out.value = sv.value;
      out.tail = sv.tail;
    } else {
      out.value = *std::max_element(y.begin(), y.end());
    }
    out.ratio = out.value / out.norm0;
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    int cnt = 0;
    // The decay slope is an energy diagnostic; Strichartz runs leave it at 0.
    const std::vector<double> none;
    const std::vector<double>& h = cfg.kind == BoundKind::energy ? y : none;
    for (size_t k = 0; k < h.size(); ++k) {
      if (tau[k] < cfg.slope_from || !(h[k] > 0.0)) continue;
      const double ly = std::log(h[k]);
      sx += tau[k];
      sy += ly;
      sxx += tau[k] * tau[k];
      sxy += tau[k] * ly;
      ++cnt;
    }
    out.slope = cnt >= 2 ? (cnt * sxy - sx * sy) / (cnt * sxx - sx * sx) : 0.0;
    rep.max_ratio = std::max(rep.max_ratio, out.ratio);
    if (cnt >= 2) rep.max_slope = std::max(rep.max_slope, out.slope);
  }
  return rep;
}

}  // namespace blowup
