#include <doctest.h>

#include <cmath>

#include "blowup/errors.hpp"
#include "blowup/evolve.hpp"
#include "blowup/lab.hpp"

using namespace blowup;

namespace {
State random_unit(const GridPtr& g, std::uint64_t seed, double target = 1.0) {
  RandomDataSpec spec;
  spec.seed = seed;
  spec.target = target;
  return random_state(spec, g);
}

double gauge_error(double dtau, int N, double tau_max) {
  const GridPtr g = make_grid(N);
  EvolveConfig ec;
  ec.mode = Flow::nonlinear;
  ec.dtau = dtau;
  ec.tau_max = tau_max;
  const Trajectory tr = integrate(gauge_solution(1.05, CoordinateFrame{1.0}, 0.0, g), ec);
  double err = 0.0;
  for (size_t k = 0; k < tr.size(); ++k) {
    const State ex = gauge_solution(1.05, CoordinateFrame{1.0}, tr.tau[k], g);
    err = std::max(err, (tr.states[k].phi1 - ex.phi1).cwiseAbs().maxCoeff());
  }
  return err;
}
}  // namespace

TEST_SUITE("evolve") {
  TEST_CASE("right-hand sides at constant states") {
    const GridPtr g = make_grid(16);
    const State z = rhs(State::zero(g), Flow::nonlinear);
    CHECK(z.phi1.cwiseAbs().maxCoeff() == 0.0);
    CHECK(z.phi2.cwiseAbs().maxCoeff() == 0.0);
    const State e = rhs(State::constant(g, 2, 3), Flow::linearized);
    CHECK((e.phi1.array() - 2).abs().maxCoeff() < 1e-12);
    CHECK((e.phi2.array() - 3).abs().maxCoeff() < 1e-10);
    const double c = 0.1;
    const double Nc = 10 * std::pow(c3, 3) * 0.01 + 10 * c3 * c3 * 0.001 + 5 * c3 * 1e-4 + 1e-5;
    CHECK(std::abs(nonlinearity(c) - Nc) < 1e-16);
    const State n = rhs(State::constant(g, c, 0), Flow::nonlinear);
    CHECK((n.phi2.array() - (3.75 * c + Nc)).abs().maxCoeff() < 1e-12);
    CHECK((n.phi1.array() + 0.5 * c).abs().maxCoeff() < 1e-12);
  }

  TEST_CASE("zero is a fixed point of the nonlinear flow") {
    EvolveConfig ec;
    ec.tau_max = 10;
    const Trajectory tr = integrate(State::zero(make_grid(16)), ec);
    CHECK(*std::max_element(tr.h_norm.begin(), tr.h_norm.end()) <= 1e-10);
    CHECK(std::abs(tr.tau.back() - 10.0) < 1e-12);
    for (size_t k = 1; k < tr.size(); ++k) CHECK(tr.tau[k] > tr.tau[k - 1]);
  }

  TEST_CASE("gauge family is reproduced") {
    CHECK(gauge_error(0.0, 24, 5.0) < 1e-6);
  }

  TEST_CASE("RK4 order under step halving") {
    const double e1 = gauge_error(0.04, 8, 5.0), e2 = gauge_error(0.02, 8, 5.0);
    CHECK(e1 / e2 > 16 * 0.7);
    CHECK(e1 / e2 < 16 * 1.3);
  }

  TEST_CASE("free flow of the constant velocity pair") {
    const GridPtr g = make_grid(24);
    EvolveConfig ec;
    ec.mode = Flow::free;
    ec.tau_max = 10;
    const Trajectory tr = integrate(State::constant(g, 0, 1), ec);
    for (size_t k = 0; k < tr.size(); ++k) {
      const double t = tr.tau[k], ex = std::exp(-t / 2) * (1 - std::exp(-t));
      CHECK((tr.states[k].phi1.array() - ex).abs().maxCoeff() < 1e-6);
    }
  }

  TEST_CASE("growth rates") {
    const GridPtr g = make_grid(24);
    EvolveConfig ec;
    ec.mode = Flow::linearized;
    ec.tau_max = 5;
    const Trajectory up = integrate(1e-3 * State::constant(g, 2, 3), ec);
    CHECK(std::abs(growth_rate(up, 0, 5) - 1.0) < 1e-3);

    const Projection P = projection(assemble(g, OpMode::full));
    ec.tau_max = 15;
    ec.deflate = true;
    ec.projection = &P;
    const Trajectory down = integrate(P.complement(random_unit(g, 4)), ec);
    double rate = 0.0;
    // a(tau) of deflated data is pure rounding, so the decay is read off the energy.
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    int m = 0;
    for (size_t k = 0; k < down.size(); ++k)
      if (down.tau[k] >= 5) {
        const double y = std::log(down.h_norm[k]);
        sx += down.tau[k], sy += y, sxx += down.tau[k] * down.tau[k], sxy += down.tau[k] * y, ++m;
      }
    rate = (m * sxy - sx * sy) / (m * sxx - sx * sx);
    CHECK(rate <= 0.05);

    ec.deflate = false;
    ec.tau_max = 1;
    const Trajectory zero = integrate(State::zero(g), ec);
    CHECK_THROWS_AS(growth_rate(zero, 0, 1), Error);
  }

  TEST_CASE("free flow contracts the transformed norm and bounds the energy") {
    // Degree-24 data need N = 32 for the discrete flow to resolve the contraction.
    const GridPtr g = make_grid(32);
    double C = 0.0;
    for (int i = 0; i < 10; ++i) {
      EvolveConfig ec;
      ec.mode = Flow::free;
      ec.tau_max = 5;
      ec.stride = 1;
      const Trajectory tr = integrate(random_unit(g, 50 + i), ec);
      double prev = g_norm(tr.states[0]);
      for (size_t k = 1; k < tr.size(); ++k) {
        const double cur = g_norm(tr.states[k]);
        CHECK(cur <= prev + 1e-8);
        prev = cur;
      }
      for (double h : tr.h_norm) C = std::max(C, h / tr.h_norm[0]);
    }
    CHECK(C < 10.0);
  }

  TEST_CASE("nonlinear and linearized flows differ at second order") {
    const GridPtr g = make_grid(16);
    const Projection P = projection(assemble(g, OpMode::full));
    const State f = P.complement(random_unit(g, 9));
    std::vector<double> eps{1e-2, 1e-3, 1e-4}, diff;
    for (double e : eps) {
      EvolveConfig ec;
      ec.tau_max = 1;
      ec.mode = Flow::nonlinear;
      const State a = integrate(e * f, ec).states.back();
      ec.mode = Flow::linearized;
      const State b = integrate(e * f, ec).states.back();
      diff.push_back(h_norm(a - b));
    }
    const double s1 = std::log(diff[0] / diff[1]) / std::log(10.0), s2 = std::log(diff[1] / diff[2]) / std::log(10.0);
    CHECK(std::abs(s1 - 2) < 0.2);
    CHECK(std::abs(s2 - 2) < 0.2);
  }

  TEST_CASE("escape cap, amplitude stop and failures") {
    const GridPtr g = make_grid(12);
    EvolveConfig ec;
    ec.tau_max = 30;
    const Trajectory esc = integrate(State::constant(g, 0.5, 0.75), ec);
    CHECK(esc.escaped);
    CHECK(esc.tau.back() < 30);
    ec.amplitude_stop = 0.1;
    const Trajectory stop = integrate(1e-3 * State::constant(g, 2, 3), ec);
    CHECK(stop.amplitude_stopped);
    CHECK(std::abs(stop.amplitude.back()) > 0.1);
    ec.tau_max = -1;
    CHECK_THROWS_AS(integrate(State::zero(g), ec), Error);
    ec.tau_max = 500;
    ec.mode = Flow::linearized;
    ec.escape_cap = inf;
    ec.amplitude_stop = 0;
    ec.dtau = 0.5;  // far beyond the RK4 stability limit
    try {
      integrate(random_unit(g, 1), ec);
      FAIL("expected an integration failure");
    } catch (const Error& e) {
      CHECK(e.kind() == ErrorKind::integration_failure);
    }
  }

  TEST_CASE("linear propagator matches stepping") {
    const GridPtr g = make_grid(16);
    const State f = random_unit(g, 3);
    const LinearPropagator prop(g, Flow::linearized, 1e-3, 10);
    EvolveConfig ec;
    ec.mode = Flow::linearized;
    ec.dtau = 1e-3;
    ec.tau_max = 0.5;
    ec.stride = 10;
    const Trajectory tr = integrate(f, ec);
    Vec x = f.stacked();
    for (int k = 0; k < 50; ++k) x = prop.record_matrix() * x;
    CHECK((x - tr.states.back().stacked()).cwiseAbs().maxCoeff() < 1e-10);
    CHECK(std::abs(prop.record_spacing() - 0.01) < 1e-15);
  }

  TEST_CASE("optional Chebyshev filter keeps smooth data") {
    const GridPtr g = make_grid(24);
    EvolveConfig ec;
    ec.tau_max = 5;
    ec.filter = true;
    const Trajectory tr = integrate(gauge_solution(1.05, CoordinateFrame{1.0}, 0.0, g), ec);
    CHECK(std::abs(tr.states.back().phi1(5) - gauge_solution(1.05, CoordinateFrame{1.0}, 5.0, g).phi1(5)) < 1e-6);
    CHECK(std::string(to_string(Flow::linearized)) == "linearized");
    CHECK(flow_from_string("free") == Flow::free);
    CHECK_THROWS_AS(flow_from_string("fast"), Error);
  }
}
