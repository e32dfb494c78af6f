#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "ckn/checks.hpp"
#include "ckn/energy.hpp"

using namespace ckn;

TEST_CASE("parameter validation") {
  auto p = validate_params({.n = 4, .s = 0.5, .q = 2.5, .lambda = 1.0, .m = 1, .k = 4});
  CHECK(p.b == doctest::Approx(0.1).epsilon(1e-14));
  CHECK(p.critical_q() == doctest::Approx(8.0 / 3.0).epsilon(1e-14));
  CHECK(p.c_hat == 1.0);

  auto p2 = validate_params({.n = 4, .s = 0.75, .q = 3.0, .lambda = 0.0, .m = 1});
  CHECK(p2.b == doctest::Approx(1.0 / 12.0).epsilon(1e-13));

  CHECK_THROWS_WITH_AS(
      (void)validate_params({.n = 4, .s = 0.5, .q = 3.0, .lambda = 0.0, .m = 1}),
      doctest::Contains("QOutOfRange"), Error);
  CHECK_THROWS_WITH_AS(
      (void)validate_params({.n = 4, .s = 0.5, .q = 2.5, .lambda = -2.0, .m = 1}),
      doctest::Contains("LambdaBelowHardy"), Error);
  CHECK_THROWS_WITH_AS(
      (void)validate_params({.n = 4, .s = 0.5, .q = 2.5, .lambda = 0.0, .m = 3}),
      doctest::Contains("BadFactorization"), Error);
  // n = 3, s > 1/2 has no default c_hat
  CHECK_THROWS_WITH_AS(
      (void)validate_params({.n = 3, .s = 0.75, .q = 2.5, .lambda = 0.0, .m = 1}),
      doctest::Contains("CHatUnjustified"), Error);
  auto p3 = validate_params({.n = 3, .s = 0.75, .q = 2.5, .lambda = 0.0, .m = 1, .k = 3,
                             .c_hat = 2.0});
  CHECK(p3.c_hat == 2.0);
}

TEST_CASE("hardy constant") {
  CHECK(hardy_constant(4, 0.5) == doctest::Approx(1.094219807613239).epsilon(1e-12));
  // s -> 1 recovers the classical constant (n-2)^2/4
  for (int n : {3, 4, 5})
    CHECK(hardy_constant(n, 1.0 - 1e-9) ==
          doctest::Approx(sq(n - 2.0) / 4.0).epsilon(1e-6));
  CHECK(hardy_constant(2, 0.9) > 0.0);
  CHECK_THROWS_AS(hardy_constant(2, 1.0), Error);  // s out of range
}

TEST_CASE("extension constant C_s") {
  CHECK(cs_constant(0.5) == doctest::Approx(1.0).epsilon(1e-14));
  for (double a : {0.1, 0.25, 0.4})
    CHECK(cs_constant(a) * cs_constant(1.0 - a) == doctest::Approx(1.0).epsilon(1e-13));
  // Gamma(s) ~ 1/s drives C_s to +infinity toward s = 0 (and to 0 toward
  // s = 1 by the product identity)
  CHECK(cs_constant(1e-3) > cs_constant(1e-2));
  CHECK(cs_constant(1e-3) > 100.0);
  CHECK(cs_constant(1.0 - 1e-3) < 1e-2);
}

TEST_CASE("gamma constant") {
  CHECK(gamma_constant(0.5, 1.0) == doctest::Approx(0.5 * pi).epsilon(1e-14));
  CHECK(gamma_constant(0.25, 1.0) == doctest::Approx(pi / std::sqrt(2.0)).epsilon(1e-13));
  CHECK(gamma_constant(0.5, 2.0) == doctest::Approx(pi).epsilon(1e-14));
}

TEST_CASE("c_mu and the breaking threshold") {
  auto p = validate_params({.n = 4, .s = 0.5, .q = 2.5, .lambda = 1.0, .m = 1});
  CHECK(c_mu(p, 3.0) == doctest::Approx(2.0 * pi).epsilon(1e-13));
  // mu = n - 1 at s = 1/2, c_hat = 1 gives n pi / 2
  for (int n : {4, 6}) {
    auto pn = validate_params({.n = n, .s = 0.5, .q = 2.2, .lambda = 0.0, .m = 1});
    CHECK(c_mu(pn, n - 1.0) == doctest::Approx(n * pi / 2.0).epsilon(1e-13));
  }
  CHECK(c_mu(p, 4.0) > c_mu(p, 3.0));
  CHECK_THROWS_WITH_AS((void)c_mu(p, 0.0), doctest::Contains("MuNonpositive"), Error);

  CHECK(breaking_threshold(p, 3.0) ==
        doctest::Approx(4.0 * pi - hardy_constant(4, 0.5)).epsilon(1e-12));
  // pole of 1/(q-2)
  auto pq = validate_params({.n = 4, .s = 0.5, .q = 2.0 + 1e-6, .lambda = 0.0, .m = 1});
  CHECK(breaking_threshold(pq, 3.0) > 1e5);
  CHECK(breaking_threshold(p, 4.0) > breaking_threshold(p, 3.0));
}

TEST_CASE("closed-form constants acceptance grid") {
  for (const auto& row : checks::constants()) {
    INFO(row.name);
    CHECK(row.pass);
  }
}

TEST_CASE("sobolev constant vs the extremal quotient") {
  CHECK(sobolev_constant(4, 0.5) > 0.0);
  for (auto [n, s] : {std::pair{4, 0.5}, std::pair{3, 0.25}}) {
    auto g = RadialGrid::log_spaced(1e-5, 1e3, 1024);
    const double alpha = 0.5 * (n - 2.0 * s);
    auto u = RadialProfile::sample(
        g, n, [alpha](double r) { return std::pow(1.0 + r * r, -alpha); });
    const double sn = seminorm(u, s, 0, /*enforce_decay=*/false);
    const double qc = critical_exponent(n, s);
    const double lq = weighted_norm_detail(u, 0.0, qc).value;
    const double quotient = sn / std::pow(lq, 2.0 / qc);
    CHECK(quotient == doctest::Approx(sobolev_constant(n, s)).epsilon(0.02));
  }
  // j_lambda at lambda = 0 approaches the Sobolev constant as q nears the
  // critical exponent (evaluated slightly inside, where b > 0)
  {
    const int n = 4;
    const double s = 0.5;
    const double qc = critical_exponent(n, s);
    auto p = validate_params({.n = n, .s = s, .q = qc - 0.01, .lambda = 0.0, .m = 1});
    auto g = RadialGrid::log_spaced(1e-5, 1e3, 1024);
    const double alpha = 0.5 * (n - 2.0 * s);
    auto u = RadialProfile::sample(
        g, n, [alpha](double r) { return std::pow(1.0 + r * r, -alpha); });
    const double sn = seminorm(u, s, 0, false);
    const double lq = weighted_norm_detail(u, p.b, p.q).value;
    const double j0 = sn / std::pow(lq, 2.0 / p.q);
    CHECK(j0 == doctest::Approx(sobolev_constant(n, s)).epsilon(0.02));
  }
  // scale invariance of the quotient under u -> alpha u(beta .)
  auto g = RadialGrid::log_spaced(1e-5, 1e3, 768);
  const int n = 4;
  const double s = 0.5, qc = critical_exponent(n, s);
  auto u = RadialProfile::sample(g, n, [](double r) { return std::exp(-0.5 * r * r); });
  auto u2 = RadialProfile::sample(
      g, n, [](double r) { return 2.5 * std::exp(-0.5 * sq(1.7 * r)); });
  const double q1 = seminorm(u, s) / std::pow(weighted_norm_detail(u, 0.0, qc).value, 2.0 / qc);
  const double q2 =
      seminorm(u2, s) / std::pow(weighted_norm_detail(u2, 0.0, qc).value, 2.0 / qc);
  CHECK(q1 == doctest::Approx(q2).epsilon(1e-8));
}
