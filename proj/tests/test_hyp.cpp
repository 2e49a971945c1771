#include <doctest.h>

#include <cmath>
#include <numbers>

#include "blowup/errors.hpp"
#include "blowup/hyp.hpp"

using namespace blowup;

namespace {
// Reference values below were computed once with mpmath at 30 digits.
struct F21Case {
  cplx a, b, c, z, value;
};

double rel(cplx got, cplx want) { return std::abs(got - want) / std::max(std::abs(want), 1e-300); }
}  // namespace

TEST_SUITE("hyp") {
  TEST_CASE("gamma against reference values") {
    CHECK(rel(blowup::gamma({0.3, 0.2}), {1.9803581728234425, -1.4145760083733033}) < 1e-13);
    CHECK(rel(blowup::gamma({-2.7, 1.1}), {-0.04454592969339315, -0.035800793669136182}) < 1e-12);
    CHECK(rel(blowup::gamma({5.5, -3.0}), {6.2430185174211033, 21.474963762080636}) < 1e-12);
    CHECK(rel(blowup::gamma(0.5), std::sqrt(std::numbers::pi)) < 1e-14);
    for (int n = 1; n < 12; ++n) CHECK(rel(blowup::gamma(double(n + 1)), double(n) * blowup::gamma(double(n))) < 1e-13);
  }

  TEST_CASE("reciprocal gamma vanishes at the poles") {
    for (int n = 0; n < 6; ++n) CHECK(rgamma(double(-n)) == cplx(0.0));
    CHECK_THROWS_AS(blowup::gamma(-3.0), Error);
  }

  TEST_CASE("f21 at zero is one") {
    CHECK(f21({0.3, 1.0}, {-2.0, 0.5}, {1.7, -0.2}, 0.0) == cplx(1.0));
    CHECK(f21(1.0, 1.0, 2.0, 0.0) == cplx(1.0));
  }

  TEST_CASE("classical closed forms") {
    CHECK(rel(f21(1.0, 1.0, 2.0, 0.5), 2.0 * std::log(2.0)) < 1e-12);
    CHECK(rel(f21(0.5, 0.5, 1.5, 0.25), std::numbers::pi / 3.0) < 1e-12);
    // -log(1 - z)/z off the real axis
    const cplx z{-0.4, 0.3};
    CHECK(rel(f21(1.0, 1.0, 2.0, z), -std::log(1.0 - z) / z) < 1e-12);
  }

  TEST_CASE("f21 against reference values in every region") {
    const F21Case cases[] = {
        {{0.3, 0.1}, {-0.7, 0.2}, 1.4, {0.6, 0.3}, {0.90557873662284208, -0.061870866310951429}},
        {0.5, 1.25, 1.5, -2.5, 0.58123234893592527},
        {{-0.95, 2.5}, {1.05, 2.5}, 0.5, 0.9, {-0.7015698802634793, 0.41996327168469419}},
        {1.0, 2.0, 2.5, {0.95, 0.1}, {3.8064597691802042, 3.3587890313925621}},
        {0.2, 0.3, 0.5, -0.9, 0.92404651504147051},
        {{-0.45, 5.0}, {1.55, 5.0}, 0.5, 0.99, {-11.325270093784924, 2.8704376123723288}},
    };
    for (const F21Case& k : cases) {
      CAPTURE(k.z);
      CHECK(rel(f21(k.a, k.b, k.c, k.z), k.value) < 1e-10);
    }
  }

  TEST_CASE("integer c - a - b near z = 1") {
    // c - a - b = 0 exactly: the shifted-and-extrapolated connection formula
    CHECK(rel(f21(0.5, 0.5, 1.0, 0.97), 2.0090923909474561) < 1e-8);
  }

  TEST_CASE("Gauss summation at z = 1") {
    const cplx triples[][3] = {
        {{0.2, 0.1}, {0.3, -0.4}, {1.9, 0.2}},
        {-0.5, 0.25, 1.5},
        {{1.1, 2.0}, {-0.3, -1.0}, {2.2, 1.5}},
    };
    for (const auto& t : triples) {
      const cplx a = t[0], b = t[1], c = t[2];
      REQUIRE((c - a - b).real() > 0.0);
      const cplx want = blowup::gamma(c) * blowup::gamma(c - a - b) * rgamma(c - a) * rgamma(c - b);
      CHECK(rel(f21(a, b, c, 1.0), want) < 1e-10);
    }
    CHECK_THROWS_AS(f21(1.0, 1.0, 1.5, 1.0), Error);
  }

  TEST_CASE("domain errors") {
    CHECK_THROWS_AS(f21(1.0, 1.0, -2.0, 0.3), Error);
    try {
      f21(0.3, 0.4, 1.2, cplx{0.5, 0.86});
      FAIL("expected evaluation_domain");
    } catch (const Error& e) {
      CHECK(e.kind() == ErrorKind::evaluation_domain);
    }
  }

  TEST_CASE("parameter map") {
    const HypParams p = hyp_params({0.2, 3.0});
    CHECK(p.a == cplx(-0.9, 1.5));
    CHECK(p.b == cplx(1.1, 1.5));
    CHECK(p.c == cplx(0.5));
  }

  TEST_CASE("w0 closed form") {
    CHECK(std::abs(w0_closed(1.0)) == 0.0);
    CHECK(rel(w0_closed({0.1, 5.0}), {0.92590157983206916, 0.3584248171608293}) < 1e-12);
    CHECK(rel(w0_closed({0.3, -12.0}), {0.98407647207265835, -0.15451980062496846}) < 1e-12);
    CHECK(rel(w0_closed({0.01, 50.0}), {0.99928967695100356, 0.037485309121145684}) < 1e-11);
    const cplx real = w0_closed(0.2);
    CHECK(std::abs(real.imag()) <= 1e-12);
    CHECK(real.real() == doctest::Approx(-0.85149940246613888).epsilon(1e-12));
  }

  TEST_CASE("w0 pole reports the side") {
    try {
      w0_closed(-0.5);
      FAIL("expected a pole");
    } catch (const Error& e) {
      CHECK(e.kind() == ErrorKind::pole);
    }
  }

  TEST_CASE("w0 conjugation symmetry") {
    for (double eps : {0.0, 0.1, 0.25, 1.0 / 3.0})
      for (double om : {0.3, 2.0, 17.0, 45.0}) {
        const cplx l{eps, om};
        CHECK(std::abs(w0_closed(std::conj(l)) - std::conj(w0_closed(l))) <= 1e-12);
      }
  }

  TEST_CASE("w0 tends to one at large frequency") {
    for (double eps : {0.0, 0.1, 1.0 / 3.0})
      for (double om : {-100.0, 100.0}) CHECK(std::abs(std::abs(w0_closed({eps, om})) - 1.0) < 0.15);
  }

  TEST_CASE("zero scan on the strip has a positive minimum") {
    ScanOptions opt;
    const ScanResult r = zero_scan(opt);
    CHECK(r.minimum.value > 0.0);
    CHECK(r.minimum.lambda.real() >= opt.eps_lo - 1e-12);
    CHECK(r.minimum.lambda.real() <= opt.eps_hi + 1e-12);
    REQUIRE_FALSE(r.refined.empty());
    for (size_t i = 1; i < r.refined.size(); ++i) CHECK(r.refined[i - 1].value <= r.refined[i].value);
  }

  TEST_CASE("widened scan finds the zero at one") {
    ScanOptions opt;
    opt.eps_lo = 0.8;
    opt.eps_hi = 1.2;
    opt.omega_max = 2.0;
    const ScanResult r = zero_scan(opt);
    CHECK(r.minimum.value <= 1e-6);
    CHECK(std::abs(r.minimum.lambda - 1.0) <= 1e-6);
  }
}
