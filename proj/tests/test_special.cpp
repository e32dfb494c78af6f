#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "ckn/special.hpp"

using namespace ckn;

TEST_CASE("gamma function") {
  CHECK(gamma_fn(0.5) == doctest::Approx(std::sqrt(pi)).epsilon(1e-14));
  CHECK(gamma_fn(1.0) == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(gamma_fn(5.0) == doctest::Approx(24.0).epsilon(1e-14));
  for (double s = 0.05; s < 1.0; s += 0.05)
    CHECK(gamma_fn(s) * gamma_fn(1.0 - s) ==
          doctest::Approx(pi / std::sin(pi * s)).epsilon(1e-13));
  // log_gamma continuity across the Stirling switch
  for (double x : {25.0, 29.9, 30.1, 45.0})
    CHECK(log_gamma(x) == doctest::Approx(std::lgamma(x)).epsilon(1e-12));
  CHECK_THROWS_AS(gamma_fn(0.0), Error);
}

TEST_CASE("bessel J: reference values and closed forms") {
  CHECK(bessel_j(0, 1.0) == doctest::Approx(0.7651976865579666).epsilon(1e-13));
  CHECK(bessel_j(1, 1.0) == doctest::Approx(0.4400505857449335).epsilon(1e-13));
  CHECK(bessel_j(0, 100.0) == doctest::Approx(0.019985850304223122).epsilon(1e-12));
  for (double x : {0.3, 2.0, 11.9, 12.1, 40.0, 1e3, 1e5}) {
    const double ref_half = std::sqrt(2.0 / (pi * x)) * std::sin(x);
    CHECK(std::abs(bessel_j(0.5, x) - ref_half) < 1e-12);
    const double ref_3half = std::sqrt(2.0 / (pi * x)) * (std::sin(x) / x - std::cos(x));
    CHECK(std::abs(bessel_j(1.5, x) - ref_3half) < 1e-12);
  }
}

TEST_CASE("bessel J: recurrence consistency across branches") {
  for (double nu : {1.0, 2.5, 7.0, 12.0, 16.0})
    for (double x : {5.0, 11.5, 12.5, 18.0, 25.0, 60.0, 500.0}) {
      const double lhs = bessel_j(nu + 1.0, x);
      const double rhs = (2.0 * nu / x) * bessel_j(nu, x) - bessel_j(nu - 1.0, x);
      const double scale = std::max({std::abs(lhs), std::abs(bessel_j(nu, x)), 1e-8});
      CHECK(std::abs(lhs - rhs) / scale < 1e-10);
    }
}

TEST_CASE("bessel K and the extension multiplier") {
  CHECK(bessel_k(0, 1.0) == doctest::Approx(0.4210244382407085).epsilon(1e-12));
  CHECK(bessel_k(1, 1.0) == doctest::Approx(0.6019072301972346).epsilon(1e-12));
  for (double t : {0.003, 0.2, 2.0, 12.0, 29.5, 30.5, 200.0}) {
    const double ref = std::sqrt(pi / (2.0 * t)) * std::exp(-t);
    CHECK(bessel_k(0.5, t) == doctest::Approx(ref).epsilon(1e-12));
  }
  // K_{-nu} = K_nu
  CHECK(bessel_k(0.25, 0.7) == doctest::Approx(bessel_k(-0.25, 0.7)).epsilon(1e-14));
  // psi_{1/2}(t) = exp(-t); psi_s(0+) = 1; derivative closed form at s = 1/2
  for (double t : {1e-5, 0.1, 1.0, 8.0}) {
    CHECK(cs_multiplier(0.5, t) == doctest::Approx(std::exp(-t)).epsilon(1e-12));
    CHECK(cs_multiplier_deriv(0.5, t) == doctest::Approx(-std::exp(-t)).epsilon(1e-12));
  }
  for (double s : {0.25, 0.75}) CHECK(std::abs(cs_multiplier(s, 1e-14) - 1.0) < 1e-3);
  CHECK(cs_multiplier(0.3, 0.0) == 1.0);
}

TEST_CASE("quadrature rules") {
  auto gl = gauss_legendre(20);
  double sum = 0.0;
  for (std::size_t i = 0; i < gl.nodes.size(); ++i)
    sum += gl.weights[i] * std::pow(gl.nodes[i], 10);
  CHECK(sum == doctest::Approx(2.0 / 11.0).epsilon(1e-13));

  CHECK(tanh_sinh([](double x) { return 1.0 / std::sqrt(x); }) ==
        doctest::Approx(2.0).epsilon(1e-12));
  CHECK(tanh_sinh([](double x) { return std::log(x); }) ==
        doctest::Approx(-1.0).epsilon(1e-12));

  CHECK(sphere_area(2) == doctest::Approx(2.0 * pi).epsilon(1e-14));
  CHECK(sphere_area(3) == doctest::Approx(4.0 * pi).epsilon(1e-14));
  CHECK(sphere_area(4) == doctest::Approx(2.0 * pi * pi).epsilon(1e-14));
}
