#include <doctest.h>

#include <cmath>

#include "blowup/errors.hpp"
#include "blowup/evolve.hpp"
#include "blowup/simcoords.hpp"

using namespace blowup;

namespace {
// psi1 of u^{T'} in frame T written directly in physical time: c3 ((T - t)/(T' - t))^{1/2}.
double psi1_oracle(double Tp, double T, double tau) {
  const double t = T * (1.0 - std::exp(-tau));
  return c3 * std::sqrt((T - t) / (Tp - t));
}
// psi2 = d psi1/dtau + psi1/2 for rho-independent data, by a central difference.
double psi2_oracle(double Tp, double T, double tau) {
  const double h = 1e-5;
  return (psi1_oracle(Tp, T, tau + h) - psi1_oracle(Tp, T, tau - h)) / (2 * h) + 0.5 * psi1_oracle(Tp, T, tau);
}
}  // namespace

TEST_SUITE("simcoords") {
  TEST_CASE("blowup constant") {
    CHECK(std::abs(std::pow(c3, 4) - 0.75) < 1e-15);
    CHECK(std::abs(5 * std::pow(c3, 4) - 3.75) < 1e-14);
  }

  TEST_CASE("exact blowup data maps to the zero state") {
    const GridPtr g = make_grid(12);
    const State s = to_similarity(PhysicalData::constant(1.0, c3, 0.5 * c3), CoordinateFrame{1.0}, g);
    CHECK(s.phi1.cwiseAbs().maxCoeff() < 1e-15);
    CHECK(s.phi2.cwiseAbs().maxCoeff() < 1e-15);
  }

  TEST_CASE("gauge data in frame 1") {
    const GridPtr g = make_grid(12);
    const double Tp = 1.05;
    const State s = to_similarity(gauge_data(Tp, 1.0), CoordinateFrame{1.0}, g);
    CHECK((s.phi1.array() - c3 * (std::pow(Tp, -0.5) - 1)).abs().maxCoeff() < 1e-14);
    CHECK((s.phi2.array() - 0.5 * c3 * (std::pow(Tp, -1.5) - 1)).abs().maxCoeff() < 1e-14);
    const State t = to_similarity(PhysicalData::constant(1.2, c3, 0.5 * c3), CoordinateFrame{1.1}, g);
    CHECK((t.phi1.array() - c3 * (std::sqrt(1.1) - 1)).abs().maxCoeff() < 1e-14);
    CHECK_THROWS_AS(to_similarity(PhysicalData::constant(1.0, 0, 0), CoordinateFrame{1.1}, g), Error);
  }

  TEST_CASE("gauge solution against a physical-time oracle") {
    const GridPtr g = make_grid(8);
    for (double Tp : {0.9, 1.05, 2.0})
      for (double T : {1.0, 1.1})
        for (double tau : {0.0, 0.5, 2.0}) {
          if (Tp - T + T * std::exp(-tau) <= 0) continue;
          const State s = gauge_solution(Tp, CoordinateFrame{T}, tau, g);
          CHECK(std::abs(s.phi1(3) + c3 - psi1_oracle(Tp, T, tau)) < 1e-13);
          CHECK(std::abs(s.phi2(5) + 0.5 * c3 - psi2_oracle(Tp, T, tau)) < 1e-8);
          const State d = gauge_solution_dtau(Tp, CoordinateFrame{T}, tau, g);
          const double h = 1e-5;
          const double fd = (psi1_oracle(Tp, T, tau + h) - psi1_oracle(Tp, T, tau - h)) / (2 * h);
          CHECK(std::abs(d.phi1(0) - fd) < 1e-8);
        }
    const State z = gauge_solution(1.0, CoordinateFrame{1.0}, 3.0, g);
    CHECK(z.phi1.cwiseAbs().maxCoeff() == 0.0);
    CHECK(z.phi2.cwiseAbs().maxCoeff() == 0.0);
    CHECK_THROWS_AS(gauge_solution(0.5, CoordinateFrame{1.0}, 2.0, g), Error);
  }

  TEST_CASE("gauge solution decays like exp(-tau/2) for T' > T") {
    const GridPtr g = make_grid(4);
    const double a = gauge_solution(1.05, CoordinateFrame{1.0}, 20.0, g).phi1(0) + c3;
    const double b = gauge_solution(1.05, CoordinateFrame{1.0}, 22.0, g).phi1(0) + c3;
    CHECK(std::abs(std::log(b / a) / 2.0 + 0.5) < 1e-6);
  }

  TEST_CASE("from_similarity") {
    const GridPtr g = make_grid(6);
    PhysicalSlice s = from_similarity(State::zero(g), CoordinateFrame{1.0}, 0.0);
    CHECK(s.t == 0.0);
    CHECK((s.u.array() - c3).abs().maxCoeff() < 1e-15);
    s = from_similarity(State::zero(g), CoordinateFrame{1.0}, std::log(2.0));
    CHECK(std::abs(s.t - 0.5) < 1e-15);
    CHECK(std::abs(s.r(g->N) - 0.5) < 1e-15);
    CHECK((s.u.array() - c3 * std::sqrt(2.0)).abs().maxCoeff() < 1e-14);
    s = from_similarity(gauge_solution(2.0, CoordinateFrame{1.0}, 0.0, g), CoordinateFrame{1.0}, 0.0);
    CHECK((s.u.array() - c3 / std::sqrt(2.0)).abs().maxCoeff() < 1e-15);
  }

  TEST_CASE("round trip through similarity coordinates") {
    const GridPtr g = make_grid(24);
    const PhysicalData data{1.3, [](double r) { return std::cos(r) + 0.2 * r * r; }, [](double r) { return 1.0 / (1 + r * r); }};
    const double T = 1.2;
    const State s = to_similarity(data, CoordinateFrame{T}, g);
    const PhysicalSlice back = from_similarity(s, CoordinateFrame{T}, 0.0);
    for (int j = 0; j < g->size(); ++j) CHECK(std::abs(back.u(j) - data.f(back.r(j))) < 1e-10);
  }

  TEST_CASE("initial data map at T = 1 with zero perturbation is zero") {
    const GridPtr g = make_grid(10);
    const State s = initial_data_map(1.0, PhysicalData::constant(1.1, 0.0, 0.0), g);
    CHECK(s.phi1.cwiseAbs().maxCoeff() < 1e-15);
    CHECK(s.phi2.cwiseAbs().maxCoeff() < 1e-15);
  }

  TEST_CASE("gauge solution is a fixed point of the discrete nonlinear equation") {
    const GridPtr g = make_grid(16);
    for (double Tp : {0.9, 1.05})
      for (double tau : {0.0, 1.0, 2.0}) {
        const State s = gauge_solution(Tp, CoordinateFrame{1.0}, tau, g);
        const State r = rhs(s, Flow::nonlinear);
        const State d = gauge_solution_dtau(Tp, CoordinateFrame{1.0}, tau, g);
        CHECK((r.phi1 - d.phi1).cwiseAbs().maxCoeff() < 1e-8);
        CHECK((r.phi2 - d.phi2).cwiseAbs().maxCoeff() < 1e-8);
      }
  }
}
